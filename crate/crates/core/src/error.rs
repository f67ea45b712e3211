use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not {expected}: max asymmetry {deviation:.3e}")]
    SymmetryViolation {
        expected: &'static str,
        deviation: f64,
    },

    #[error("matrix is numerically singular: smallest eigenvalue {min_eig:.3e}, tolerance {tolerance:.3e}")]
    Singular { min_eig: f64, tolerance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("iteration diverges: spectral radius {0} >= 1")]
    Divergence(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported Bessel order {0}; order must be >= 0")]
    UnsupportedOrder(f64),

    #[error("non-finite kernel value in Fredholm determinant (order={order}, s={s}, m={m})")]
    NonFinite { order: f64, s: f64, m: usize },

    #[error("halting bound violated at trial {trial_index} (n={n}): {detail}")]
    BoundViolation {
        trial_index: u64,
        n: usize,
        detail: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
