//! Neumann series iteration `x_k = A x_{k-1} + b` for `(I - A) x = b`, the two
//! measured halting times, and the closed-form upper bounds `K_eps`, `K*_eps`
//! that depend only on the extreme eigenvalues of a symmetric `A`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eig, DenseMatrix, EigenDecomposition, Scalar};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E[log X]` for `X ~ Exp(rate 1/2)`, i.e. `log 2 - γ`.
pub const MEAN_LOG_EXP_HALF: f64 = std::f64::consts::LN_2 - EULER_GAMMA;

/// Multiplier applied to `K_eps` for the default iteration cap.
pub const DEFAULT_CAP_FACTOR: u64 = 50;

const UNIT_NORM_TOL: f64 = 1e-12;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )))
    }
}

fn check_extremes(lambda_min: f64, lambda_max: f64) -> Result<()> {
    if !(lambda_min > -1.0 && lambda_max < 1.0) {
        return Err(Error::Domain(format!(
            "extreme eigenvalues must lie in (-1, 1), got ({lambda_min}, {lambda_max})"
        )));
    }
    if lambda_min > lambda_max {
        return Err(Error::Domain(format!(
            "lambda_min {lambda_min} exceeds lambda_max {lambda_max}"
        )));
    }
    Ok(())
}

/// `‖Σ_{i≥k} Mⁱ‖ = max(|λ₁|ᵏ/|1-λ₁|, |λₙ|ᵏ/|1-λₙ|)` for symmetric `M` with
/// extreme eigenvalues `λ₁ ≤ λₙ`.
pub fn tail_norm(lambda_min: f64, lambda_max: f64, k: u64) -> Result<f64> {
    check_extremes(lambda_min, lambda_max)?;
    Ok(tail_branch(lambda_min, k).max(tail_branch(lambda_max, k)))
}

fn tail_branch(lambda: f64, k: u64) -> f64 {
    // 0^0 = 1
    let p = if k == 0 {
        1.0
    } else {
        lambda.abs().powf(k as f64)
    };
    p / (1.0 - lambda).abs()
}

/// Continuous crossing point of one branch: `(log ε + log|1-λ|) / log|λ|`.
/// A zero eigenvalue has identically zero tail for `k ≥ 1`; its value is 0.
fn branch_crossing(lambda: f64, epsilon: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        (epsilon.ln() + (1.0 - lambda).abs().ln()) / lambda.abs().ln()
    }
}

/// Closed form of `K_eps` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KBound {
    pub k_eps: u64,
    pub k1: f64,
    pub kn: f64,
    /// Ceiling defect `⌈max(k₁,kₙ)⌉ - max(k₁,kₙ)`.
    pub sigma: f64,
}

/// Moves a closed-form candidate onto the exact first `k` with `f(k) < ε`
/// for a nonincreasing `f`. Only ever moves a step or two at float ties.
fn settle(mut k: u64, epsilon: f64, f: impl Fn(u64) -> f64) -> u64 {
    while f(k) >= epsilon {
        k += 1;
    }
    while k > 0 && f(k - 1) < epsilon {
        k -= 1;
    }
    k
}

/// `K_eps = ⌈max(k₁, kₙ)⌉` for a unit right-hand side.
pub fn bound_k(lambda_min: f64, lambda_max: f64, epsilon: f64) -> Result<KBound> {
    check_extremes(lambda_min, lambda_max)?;
    check_epsilon(epsilon)?;
    let k1 = branch_crossing(lambda_min, epsilon);
    let kn = branch_crossing(lambda_max, epsilon);
    let top = k1.max(kn).max(0.0);
    let ceiling = top.ceil();
    let k_eps = settle(ceiling as u64, epsilon, |k| {
        tail_branch(lambda_min, k).max(tail_branch(lambda_max, k))
    });
    Ok(KBound {
        k_eps,
        k1,
        kn,
        sigma: ceiling - top,
    })
}

/// `K*_eps`: first `k` with `max(|λ₁|,|λₙ|)ᵏ < ε`, because
/// `(I-A) Σ_{i≥k} Aⁱ = Aᵏ`.
pub fn bound_k_star(lambda_min: f64, lambda_max: f64, epsilon: f64) -> Result<u64> {
    check_extremes(lambda_min, lambda_max)?;
    check_epsilon(epsilon)?;
    let rho = lambda_min.abs().max(lambda_max.abs());
    let power = |k: u64| if k == 0 { 1.0 } else { rho.powf(k as f64) };
    let guess = if rho == 0.0 {
        1
    } else {
        (epsilon.ln() / rho.ln()).ceil().max(0.0) as u64
    };
    Ok(settle(guess, epsilon, power))
}

fn scale_log(n: f64, alpha: f64, epsilon: f64) -> f64 {
    (n / epsilon.powf(1.0 / alpha)).ln()
}

/// `K / (α log(n/ε^{1/α}) n^α)`.
pub fn scaled_k(k: f64, n: usize, alpha: f64, epsilon: f64) -> f64 {
    let n = n as f64;
    k / (alpha * scale_log(n, alpha, epsilon) * n.powf(alpha))
}

/// Accelerated statistic built from the continuous `kₙ`:
/// `((αL - E[log ξ]) / (αL)) · (αL n^α / kₙ)` with `L = log(n/ε^{1/α})`.
pub fn refined_statistic(
    kn: f64,
    n: usize,
    alpha: f64,
    epsilon: f64,
    mean_log_xi: f64,
) -> Result<f64> {
    if !(kn > 0.0) {
        return Err(Error::Domain(format!("k_n must be positive, got {kn}")));
    }
    let nf = n as f64;
    let al = alpha * scale_log(nf, alpha, epsilon);
    Ok((al - mean_log_xi) / al * (al * nf.powf(alpha) / kn))
}

/// `|1/(N log|1 - x/N|) + 1/x|` with `N = n^α`; bounded by `8/N` for
/// `0 < x ≤ N/2`.
pub fn log_reciprocal_gap(x: f64, n: f64, alpha: f64) -> f64 {
    let big = n.powf(alpha);
    let y = x / big;
    let log_rho = if y < 1.0 {
        (-y).ln_1p()
    } else {
        (1.0 - y).abs().ln()
    };
    (1.0 / (big * log_rho) + 1.0 / x).abs()
}

/// Outcome of a halting criterion within the iteration cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Halt {
    At(u64),
    /// Criterion not met after this many iterations.
    Saturated(u64),
}

impl Halt {
    pub fn count(self) -> u64 {
        match self {
            Halt::At(k) | Halt::Saturated(k) => k,
        }
    }

    pub fn is_saturated(self) -> bool {
        matches!(self, Halt::Saturated(_))
    }
}

/// `(I - A) x = b` with `A` symmetric/Hermitian, unit `b`.
#[derive(Debug, Clone)]
pub struct IterationProblem<T: Scalar> {
    matrix: DenseMatrix<T>,
    rhs: DVector<T>,
    epsilon: f64,
    max_iterations: u64,
    eig: EigenDecomposition<T>,
}

impl<T: Scalar> IterationProblem<T> {
    /// `max_iterations = None` selects `50 · K_eps`.
    pub fn new(
        matrix: DenseMatrix<T>,
        rhs: DVector<T>,
        epsilon: f64,
        max_iterations: Option<u64>,
    ) -> Result<Self> {
        let eig = symmetric_eig(&matrix)?;
        Self::with_eigendecomposition(matrix, eig, rhs, epsilon, max_iterations)
    }

    /// As [`IterationProblem::new`], reusing an existing decomposition of `matrix`.
    pub fn with_eigendecomposition(
        matrix: DenseMatrix<T>,
        eig: EigenDecomposition<T>,
        rhs: DVector<T>,
        epsilon: f64,
        max_iterations: Option<u64>,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        if rhs.len() != matrix.dim() || eig.dim() != matrix.dim() {
            return Err(Error::Dimension(format!(
                "rhs length {} / decomposition size {} vs matrix dimension {}",
                rhs.len(),
                eig.dim(),
                matrix.dim()
            )));
        }
        let norm = rhs.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Precondition(format!(
                "right-hand side must be a unit vector, norm is {norm}"
            )));
        }
        let rho = eig.lambda_min().abs().max(eig.lambda_max().abs());
        if rho >= 1.0 {
            return Err(Error::Divergence(rho));
        }
        let cap = match max_iterations {
            Some(c) => c,
            None => {
                let k = bound_k(eig.lambda_min(), eig.lambda_max(), epsilon)?.k_eps;
                k.saturating_mul(DEFAULT_CAP_FACTOR).max(1)
            }
        };
        Ok(Self {
            matrix,
            rhs,
            epsilon,
            max_iterations: cap,
            eig,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<T> {
        &self.rhs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn max_iterations(&self) -> u64 {
        self.max_iterations
    }

    pub fn eigendecomposition(&self) -> &EigenDecomposition<T> {
        &self.eig
    }

    /// `x* = U (I - Λ)^{-1} Uᴴ b`.
    pub fn exact_solution(&self) -> DVector<T> {
        let coeffs = self.eig.basis.ad_mul(&self.rhs);
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.eig.eigenvalues)
                .map(|(&c, &lam)| c * T::from_real(1.0 / (1.0 - lam))),
        );
        &self.eig.basis * scaled
    }
}

#[derive(Debug, Clone)]
pub struct IterationOutcome<T: Scalar> {
    /// Last iterate computed.
    pub solution: DVector<T>,
    pub k_eps: Halt,
    pub k_star_eps: Halt,
    /// `‖x* - x_k‖` for `k = 0, 1, …`.
    pub error_trace: Vec<f64>,
    /// `‖(I - A) x_k - b‖` for `k = 0, 1, …`.
    pub residual_trace: Vec<f64>,
}

/// Runs `x₀ = 0, x_k = A x_{k-1} + b` until both halting criteria hold or the
/// cap is reached. Both use strict `< ε`.
pub fn iterate<T: Scalar>(problem: &IterationProblem<T>) -> IterationOutcome<T> {
    let a = problem.matrix.entries();
    let b = &problem.rhs;
    let eps = problem.epsilon;
    let exact = problem.exact_solution();

    let mut x = DVector::<T>::zeros(b.len());
    let mut k_eps = None;
    let mut k_star = None;
    let mut error_trace = Vec::new();
    let mut residual_trace = Vec::new();

    let mut k = 0u64;
    loop {
        let next = a * &x + b;
        let residual = (&x - &next).norm();
        let error = (&exact - &x).norm();
        error_trace.push(error);
        residual_trace.push(residual);
        if k_eps.is_none() && error < eps {
            k_eps = Some(k);
        }
        if k_star.is_none() && residual < eps {
            k_star = Some(k);
        }
        if (k_eps.is_some() && k_star.is_some()) || k >= problem.max_iterations {
            break;
        }
        x = next;
        k += 1;
    }

    let resolve = |h: Option<u64>| h.map_or(Halt::Saturated(k), Halt::At);
    IterationOutcome {
        solution: x,
        k_eps: resolve(k_eps),
        k_star_eps: resolve(k_star),
        error_trace,
        residual_trace,
    }
}

/// Measured halting times (when the iteration was run) next to the
/// closed-form bounds for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaltingRecord {
    pub k_eps: Option<Halt>,
    pub k_star_eps: Option<Halt>,
    pub big_k_eps: u64,
    pub big_k_star_eps: u64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub sigma: f64,
    pub k1: f64,
    pub kn: f64,
}

impl HaltingRecord {
    /// Bounds only.
    pub fn from_extremes(lambda_min: f64, lambda_max: f64, epsilon: f64) -> Result<Self> {
        let kb = bound_k(lambda_min, lambda_max, epsilon)?;
        Ok(Self {
            k_eps: None,
            k_star_eps: None,
            big_k_eps: kb.k_eps,
            big_k_star_eps: bound_k_star(lambda_min, lambda_max, epsilon)?,
            lambda_min,
            lambda_max,
            sigma: kb.sigma,
            k1: kb.k1,
            kn: kb.kn,
        })
    }

    /// Runs the iteration and records both measured halting times.
    pub fn measure<T: Scalar>(problem: &IterationProblem<T>) -> Result<Self> {
        let eig = problem.eigendecomposition();
        let mut rec = Self::from_extremes(eig.lambda_min(), eig.lambda_max(), problem.epsilon())?;
        let out = iterate(problem);
        rec.k_eps = Some(out.k_eps);
        rec.k_star_eps = Some(out.k_star_eps);
        Ok(rec)
    }

    pub fn saturated(&self) -> bool {
        self.k_eps.is_some_and(Halt::is_saturated)
            || self.k_star_eps.is_some_and(Halt::is_saturated)
    }

    /// `k_eps ≤ K_eps` and `k*_eps ≤ K*_eps`, for every criterion that was
    /// measured and not saturated.
    pub fn bounds_hold(&self) -> bool {
        let ok = |h: Option<Halt>, bound: u64| match h {
            Some(Halt::At(k)) => k <= bound,
            _ => true,
        };
        ok(self.k_eps, self.big_k_eps) && ok(self.k_star_eps, self.big_k_star_eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpnessTarget {
    /// Eigenvector of the largest eigenvalue of `A`.
    MaxEig,
    /// Eigenvector of the largest eigenvalue of `I - A` (smallest of `A`).
    OneMinusAMax,
}

/// Right-hand side that makes a halting time meet its bound.
///
/// With `MaxEig`, `k_eps = K_eps` whenever the `λₙ` branch dominates the tail
/// norm. With `OneMinusAMax`, `k*_eps = K*_eps` whenever `|λ₁|` is the spectral
/// radius.
pub fn sharpness_rhs<T: Scalar>(
    eig: &EigenDecomposition<T>,
    which: SharpnessTarget,
) -> Result<DVector<T>> {
    let idx = match which {
        SharpnessTarget::MaxEig => {
            let top = eig.lambda_max();
            if top <= 0.0 {
                return Err(Error::Precondition(format!(
                    "largest eigenvalue must be positive, got {top}"
                )));
            }
            eig.dim() - 1
        }
        SharpnessTarget::OneMinusAMax => 0,
    };
    let v = eig.eigenvector(idx);
    let norm = v.norm();
    Ok(v / T::from_real(norm))
}
