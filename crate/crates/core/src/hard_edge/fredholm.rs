//! Nyström discretisation of `det(I - 𝕁_{α,s})` on `L²(0, s)`.

use nalgebra::DMatrix;

use super::bessel::BesselKernel;
use super::quadrature::gauss_legendre_rule;
use crate::error::{Error, Result};

/// Default Gauss–Legendre size for determinant evaluations.
pub const DEFAULT_QUADRATURE: usize = 40;

/// `√w_i 𝕁_α(x_i, x_j) √w_j` over the rule transplanted to `(0, s)`.
pub fn nystrom_matrix(order: f64, s: f64, m: usize) -> Result<DMatrix<f64>> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!(
            "interval endpoint must be > 0, got {s}"
        )));
    }
    if m < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 quadrature nodes, got {m}"
        )));
    }
    let kernel = BesselKernel::new(order)?;
    let rule = gauss_legendre_rule(m)?.transplant(0.5 * s)?;
    let nodes = rule
        .nodes
        .iter()
        .map(|&u| kernel.node(u))
        .collect::<Result<Vec<_>>>()?;
    let root_w: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut k = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = root_w[i] * kernel.entry(&nodes[i], &nodes[j]) * root_w[j];
            if !v.is_finite() {
                return Err(Error::NonFinite { order, s, m });
            }
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Nyström approximation of `det(I - 𝕁_{α,s})`.
pub fn fredholm_det(order: f64, s: f64, m: usize) -> Result<f64> {
    let k = nystrom_matrix(order, s, m)?;
    let det = (DMatrix::identity(m, m) - k).lu().determinant();
    if det.is_finite() {
        Ok(det)
    } else {
        Err(Error::NonFinite { order, s, m })
    }
}
