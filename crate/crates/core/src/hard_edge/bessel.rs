//! Bessel functions of the first kind for real order `ν ≥ 0` and the Bessel
//! kernel `𝕁_α(u, v)`.
//!
//! `J_ν` uses the power series for small arguments and Miller's backward
//! recurrence otherwise, normalised with
//! `(x/2)^μ / Γ(μ+1) = Σ_j c_j J_{μ+2j}(x)` where `μ` is the fractional part
//! of the order.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 1.0;
const RESCALE_AT: f64 = 1e250;

fn check_order(order: f64) -> Result<()> {
    if order >= 0.0 && order.is_finite() {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(order))
    }
}

fn series(order: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0.0 { 1.0 } else { 0.0 };
    }
    let q = -0.25 * x * x;
    let mut term = (order * (0.5 * x).ln() - ln_gamma(order + 1.0)).exp();
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (order + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `(J_ν(x), J_{ν+1}(x))` by a single backward recurrence.
fn miller_pair(order: f64, x: f64) -> (f64, f64) {
    let base = order.floor();
    let mu = order - base;
    let n = base as usize;
    let reach = (n as f64).max(x);
    let top = n + 2 + (reach + 30.0 + (50.0 * reach).sqrt()).ceil() as usize;
    let top = top + (top % 2);

    // coefficients of J_{μ+2j} in the normalising sum
    let mut coeff = Vec::with_capacity(top / 2 + 1);
    coeff.push(1.0);
    let mut q = 1.0;
    for j in 1..=top / 2 {
        let jf = j as f64;
        if j > 1 {
            q *= (mu + jf - 1.0) / jf;
        }
        coeff.push((mu + 2.0 * jf) * q);
    }

    let mut above = 0.0; // f_{k+1}
    let mut here = 1e-300; // f_k
    let mut norm = if top.is_multiple_of(2) {
        coeff[top / 2] * here
    } else {
        0.0
    };
    let mut at_n = if top == n { here } else { 0.0 };
    let mut at_n1 = if top == n + 1 { here } else { 0.0 };
    for k in (1..=top).rev() {
        let below = 2.0 * (mu + k as f64) / x * here - above;
        above = here;
        here = below;
        let idx = k - 1;
        if idx == n {
            at_n = here;
        }
        if idx == n + 1 {
            at_n1 = here;
        }
        if idx % 2 == 0 {
            norm += coeff[idx / 2] * here;
        }
        if here.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            here *= s;
            above *= s;
            norm *= s;
            at_n *= s;
            at_n1 *= s;
        }
    }
    let lhs = (mu * (0.5 * x).ln() - ln_gamma(mu + 1.0)).exp();
    let scale = lhs / norm;
    (at_n * scale, at_n1 * scale)
}

/// `(J_ν(x), J_{ν+1}(x))` for `ν ≥ 0`, `x ≥ 0`.
pub fn bessel_j_pair(order: f64, x: f64) -> Result<(f64, f64)> {
    check_order(order)?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "Bessel argument must be >= 0, got {x}"
        )));
    }
    if x <= SERIES_LIMIT {
        Ok((series(order, x), series(order + 1.0, x)))
    } else {
        Ok(miller_pair(order, x))
    }
}

pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    bessel_j_pair(order, x).map(|p| p.0)
}

/// `(J_α(x), J'_α(x), J''_α(x))` for `x > 0` via
/// `J'_α = J_{α-1} - (α/x) J_α` and
/// `J''_α = J'_{α-1} - (α/x) J'_α + (α/x²) J_α`.
/// Lower orders come from the downward three-term recurrence.
pub fn bessel_j_derivatives(order: f64, x: f64) -> Result<(f64, f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("derivatives need x > 0, got {x}")));
    }
    let (j, j_up) = bessel_j_pair(order, x)?;
    let a = order;
    let j_m1 = 2.0 * a / x * j - j_up;
    let j_m2 = 2.0 * (a - 1.0) / x * j_m1 - j;
    let d = j_m1 - a / x * j;
    let d_m1 = j_m2 - (a - 1.0) / x * j_m1;
    let dd = d_m1 - a / x * d + a / (x * x) * j;
    Ok((j, d, dd))
}

/// `𝕁_α(u,u) = ¼ ∫₀¹ J_α(√(su))² ds`, expanded with the product series of
/// `J_α²`. Used near `u = 0` where the derivative form cancels.
fn diagonal_series(order: f64, u: f64) -> f64 {
    if u == 0.0 {
        return if order == 0.0 { 0.25 } else { 0.0 };
    }
    let q = u / 4.0;
    let mut sum = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        let log_coeff = ln_gamma(2.0 * order + 2.0 * kf + 1.0)
            - ln_gamma(kf + 1.0)
            - ln_gamma(2.0 * order + kf + 1.0)
            - 2.0 * ln_gamma(order + kf + 1.0);
        let mag = (log_coeff + (order + kf) * q.ln()).exp() / (order + kf + 1.0);
        let term = if k % 2 == 0 { mag } else { -mag };
        sum += term;
        if mag <= 1e-17 * sum.abs() {
            break;
        }
    }
    0.25 * sum
}

/// Per-node Bessel data reused across all kernel entries touching that node.
#[derive(Debug, Clone, Copy)]
pub struct KernelNode {
    pub u: f64,
    /// `J_α(√u)`
    pub j: f64,
    /// `√u J'_α(√u)`
    pub scaled_derivative: f64,
    /// `𝕁_α(u, u)`
    pub diagonal: f64,
}

/// The Bessel kernel of fixed order.
#[derive(Debug, Clone, Copy)]
pub struct BesselKernel {
    order: f64,
}

/// Relative gap below which `(u, v)` is evaluated on the diagonal.
pub const DIAGONAL_SWITCH: f64 = 1e-9;

impl BesselKernel {
    pub fn new(order: f64) -> Result<Self> {
        check_order(order)?;
        Ok(Self { order })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn node(&self, u: f64) -> Result<KernelNode> {
        if !(u >= 0.0) {
            return Err(Error::Domain(format!(
                "kernel argument must be >= 0, got {u}"
            )));
        }
        let x = u.sqrt();
        let (j, j_up) = bessel_j_pair(self.order, x)?;
        // x J'_α(x) = α J_α(x) - x J_{α+1}(x)
        let scaled_derivative = self.order * j - x * j_up;
        let diagonal = if u <= 1.0 {
            diagonal_series(self.order, u)
        } else {
            let (j, d, dd) = bessel_j_derivatives(self.order, x)?;
            // L'Hôpital on the off-diagonal quotient as v → u
            0.25 * (d * d - j * dd - j * d / x)
        };
        Ok(KernelNode {
            u,
            j,
            scaled_derivative,
            diagonal,
        })
    }

    /// Kernel entry from precomputed node data.
    pub fn entry(&self, a: &KernelNode, b: &KernelNode) -> f64 {
        let gap = a.u - b.u;
        if gap.abs() <= DIAGONAL_SWITCH * a.u.max(b.u).max(1.0) {
            return a.diagonal;
        }
        (a.j * b.scaled_derivative - b.j * a.scaled_derivative) / (2.0 * gap)
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let a = self.node(u)?;
        let b = self.node(v)?;
        Ok(self.entry(&a, &b))
    }
}

/// `𝕁_α(u, v)`.
pub fn bessel_kernel(order: f64, u: f64, v: f64) -> Result<f64> {
    BesselKernel::new(order)?.eval(u, v)
}
