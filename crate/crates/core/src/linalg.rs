//! Dense symmetric / Hermitian linear algebra shared by the ensemble samplers
//! and the iteration engine.
//!
//! Storage and the underlying symmetric eigensolver come from `nalgebra`; this
//! module fixes the contract on top of it (ascending eigenvalues, orthonormal
//! basis, symmetry checks on construction).

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for the symmetry tags.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative eigenvalue floor below which a PSD matrix is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Entry type of a [`DenseMatrix`]: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}

impl Scalar for f64 {}

impl Scalar for Complex64 {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Symmetric,
    Hermitian,
    General,
}

/// Square matrix with a symmetry tag that is checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T: Scalar> {
    entries: DMatrix<T>,
    symmetry: Symmetry,
}

fn max_abs<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.modulus()))
}

/// Largest entrywise deviation from `m[i][j] == f(m[j][i])`, relative to the
/// largest entry (absolute for the zero matrix).
fn asymmetry<T: Scalar>(m: &DMatrix<T>, conj: bool) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            let mirror = if conj {
                m[(j, i)].conjugate()
            } else {
                m[(j, i)]
            };
            dev = dev.max((m[(i, j)] - mirror).modulus());
        }
    }
    let scale = max_abs(m);
    if scale > 0.0 {
        dev / scale
    } else {
        dev
    }
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(entries: DMatrix<T>, symmetry: Symmetry) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::Dimension("matrix dimension must be positive".into()));
        }
        let check = match symmetry {
            Symmetry::Symmetric => Some(("symmetric", false)),
            Symmetry::Hermitian => Some(("hermitian", true)),
            Symmetry::General => None,
        };
        if let Some((expected, conj)) = check {
            let deviation = asymmetry(&entries, conj);
            if deviation > SYMMETRY_TOL {
                return Err(Error::SymmetryViolation {
                    expected,
                    deviation,
                });
            }
        }
        Ok(Self { entries, symmetry })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
            symmetry: Symmetry::Hermitian,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| T::from_real(x)));
        Self {
            entries: DMatrix::from_diagonal(&d),
            symmetry: Symmetry::Hermitian,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<T> {
        self.entries
    }

    /// Largest modulus of any entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }
}

/// Ascending eigenvalues together with an orthonormal basis of eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Scalar> {
    pub eigenvalues: Vec<f64>,
    pub basis: DMatrix<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Eigenvector for the `i`-th smallest eigenvalue.
    pub fn eigenvector(&self, i: usize) -> DVector<T> {
        self.basis.column(i).into_owned()
    }

    /// `U f(Λ) Uᴴ` for a real function applied to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> DMatrix<T> {
        let mut scaled = self.basis.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = T::from_real(f(lam));
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        scaled * self.basis.adjoint()
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        self.map_spectrum(|x| x)
    }
}

/// Eigen-decomposition of a symmetric (real) or Hermitian (complex) matrix.
pub fn symmetric_eig<T: Scalar>(m: &DenseMatrix<T>) -> Result<EigenDecomposition<T>> {
    let a = &m.entries;
    let deviation = asymmetry(a, true);
    if deviation > SYMMETRY_TOL {
        return Err(Error::SymmetryViolation {
            expected: "hermitian",
            deviation,
        });
    }
    // the solver reads one triangle; hand it the exactly Hermitian part
    let herm = (a + a.adjoint()) * T::from_real(0.5);
    let eig = herm.symmetric_eigen();

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let n = order.len();
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let basis = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition { eigenvalues, basis })
}

/// `m^{-1/2}` for a Hermitian positive definite matrix.
pub fn inv_sqrt_psd<T: Scalar>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let eig = symmetric_eig(m)?;
    let largest = eig.eigenvalues.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let tolerance = SINGULAR_TOL * largest;
    let min_eig = eig.lambda_min();
    if !(min_eig > tolerance) {
        return Err(Error::Singular { min_eig, tolerance });
    }
    let r = eig.map_spectrum(|x| 1.0 / x.sqrt());
    Ok(DenseMatrix {
        entries: hermitian_part(&r),
        symmetry: Symmetry::Hermitian,
    })
}

/// Matrix-vector product.
pub fn apply<T: Scalar>(m: &DenseMatrix<T>, x: &DVector<T>) -> Result<DVector<T>> {
    if x.len() != m.dim() {
        return Err(Error::Dimension(format!(
            "vector of length {} does not conform to {}x{} matrix",
            x.len(),
            m.dim(),
            m.dim()
        )));
    }
    Ok(&m.entries * x)
}

/// `(m + mᴴ) / 2`.
pub fn hermitian_part<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.adjoint()) * T::from_real(0.5)
}

/// Spectral norm of a Hermitian matrix from its spectrum.
pub fn spectral_norm_from_eigs(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
}
