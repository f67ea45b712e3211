//! Limit laws for the scaled extreme eigenvalues: the exponential law of the
//! uniform-spectrum ensemble and the hard-edge Bessel law
//! `1 - det(I - 𝕁_{α,2t})` of the Jacobi unitary ensemble.

pub mod bessel;
pub mod fredholm;
pub mod laws;
pub mod quadrature;

pub use bessel::{bessel_j, bessel_kernel, BesselKernel};
pub use fredholm::{fredholm_det, nystrom_matrix, DEFAULT_QUADRATURE};
pub use laws::{exp_cdf, jue_limit_cdf, numeric_pdf, CdfRow, CdfTable, LimitLaw};
pub use quadrature::{gauss_legendre_rule, transplant, QuadratureRule};
