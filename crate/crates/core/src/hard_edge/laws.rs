use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fredholm::{fredholm_det, DEFAULT_QUADRATURE};
use super::quadrature::gauss_legendre_rule;
use crate::error::{Error, Result};
use crate::neumann::EULER_GAMMA;

/// CDF of the exponential law with the given rate.
pub fn exp_cdf(t: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("rate must be > 0, got {rate}")));
    }
    Ok(if t < 0.0 { 0.0 } else { -(-rate * t).exp_m1() })
}

/// Limit of `P(n²(1 - λₙ) ≤ t)` for the Jacobi unitary ensemble:
/// `1 - det(I - 𝕁_{α,2t})`.
pub fn jue_limit_cdf(t: f64, order: f64, m: usize) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let det = fredholm_det(order, 2.0 * t, m)?;
    Ok((1.0 - det).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LimitLaw {
    Exponential { rate: f64 },
    BesselHardEdge { order: f64, quadrature: usize },
}

impl LimitLaw {
    /// `Exp(1/2)`, the edge law of the uniform-spectrum ensemble.
    pub fn exp_half() -> Self {
        LimitLaw::Exponential { rate: 0.5 }
    }

    pub fn hard_edge(order: f64) -> Self {
        LimitLaw::BesselHardEdge {
            order,
            quadrature: DEFAULT_QUADRATURE,
        }
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        match *self {
            LimitLaw::Exponential { rate } => exp_cdf(t, rate),
            LimitLaw::BesselHardEdge { order, quadrature } => jue_limit_cdf(t, order, quadrature),
        }
    }

    /// `E[log X]`: closed form for the exponential law, numerical otherwise.
    pub fn mean_log(&self) -> Result<f64> {
        match *self {
            LimitLaw::Exponential { rate } => {
                exp_cdf(0.0, rate)?;
                Ok(-EULER_GAMMA - rate.ln())
            }
            LimitLaw::BesselHardEdge { .. } => mean_log_numeric(|t| self.cdf(t), MEAN_LOG_UPPER),
        }
    }

    /// Tabulates `(t, cdf, pdf)` on `0, step, …, tmax`. The pdf column uses
    /// the central difference with `h = step`, one-sided at `t = 0`.
    pub fn tabulate(&self, tmax: f64, step: f64) -> Result<CdfTable> {
        if !(step > 0.0) || !(tmax >= 0.0) {
            return Err(Error::Domain(format!(
                "need step > 0 and tmax >= 0, got step={step}, tmax={tmax}"
            )));
        }
        let count = (tmax / step + 1e-9).floor() as usize + 1;
        let grid: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
        let values = grid
            .iter()
            .map(|&t| self.cdf(t))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(count);
        for i in 0..count {
            let pdf = if i == 0 {
                (values[1] - values[0]) / step
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * step)
            };
            rows.push(CdfRow {
                t: grid[i],
                cdf: values[i],
                pdf,
            });
        }
        Ok(CdfTable { law: *self, rows })
    }
}

const MEAN_LOG_UPPER: f64 = 80.0;

/// `E[log X] = -∫₀¹ F(t)/t dt + ∫₁^∞ (1 - F(t))/t dt`, truncated at `upper`,
/// with 16-point Gauss–Legendre panels of unit length.
fn mean_log_numeric(cdf: impl Fn(f64) -> Result<f64>, upper: f64) -> Result<f64> {
    let rule = gauss_legendre_rule(16)?;
    let mut acc = 0.0;
    let panels = upper.ceil() as usize;
    for p in 0..panels {
        let (a, b) = (p as f64, (p as f64 + 1.0).min(upper));
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + half * x;
            let f = cdf(t)?;
            let g = if p == 0 { -f } else { 1.0 - f };
            acc += half * w * g / t;
        }
    }
    Ok(acc)
}

/// `(CDF(t+h) - CDF(t-h)) / 2h`.
pub fn numeric_pdf(law: &LimitLaw, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || t < h {
        return Err(Error::Domain(format!(
            "central difference needs t >= h > 0 (t={t}, h={h})"
        )));
    }
    Ok((law.cdf(t + h)? - law.cdf(t - h)?) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub t: f64,
    pub cdf: f64,
    pub pdf: f64,
}

/// Precomputed CDF grid; read-only once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    pub law: LimitLaw,
    pub rows: Vec<CdfRow>,
}

impl CdfTable {
    /// Linear interpolation of the tabulated CDF, clamped to the grid ends.
    pub fn cdf_at(&self, t: f64) -> f64 {
        let rows = &self.rows;
        if t <= rows[0].t {
            return if t < 0.0 { 0.0 } else { rows[0].cdf };
        }
        let last = rows[rows.len() - 1];
        if t >= last.t {
            return last.cdf;
        }
        let i = rows.partition_point(|r| r.t <= t);
        let (a, b) = (rows[i - 1], rows[i]);
        a.cdf + (b.cdf - a.cdf) * (t - a.t) / (b.t - a.t)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
