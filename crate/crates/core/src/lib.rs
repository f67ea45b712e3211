//! Halting-time analysis of the Neumann series iteration on random matrices.
//!
//! - [`linalg`]: dense symmetric / Hermitian primitives.
//! - [`ensembles`]: uniform-spectrum Haar model and the Jacobi unitary ensemble.
//! - [`neumann`]: the iteration, measured halting times and closed-form bounds.
//! - [`hard_edge`]: exponential and Bessel hard-edge limit laws.
//! - [`harness`]: Monte Carlo driver, statistics and reports.

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensembles;
pub mod error;
pub mod hard_edge;
pub mod harness;
pub mod linalg;
pub mod neumann;

pub use error::{Error, Result};
