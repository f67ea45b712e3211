use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::hard_edge::{LimitLaw, DEFAULT_QUADRATURE};

/// Per-trial quantity recorded by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    /// `K_eps / (α L n^α)`, with `L = log(n/ε^{1/α})`.
    #[serde(rename = "K_scaled")]
    KScaled,
    /// `α L n^α / K_eps`.
    #[serde(rename = "K_reciprocal_scaled")]
    KReciprocalScaled,
    /// Mean-corrected reciprocal statistic built from `kₙ`.
    #[serde(rename = "Z_refined")]
    ZRefined,
    /// Measured `k_eps` from running the iteration.
    #[serde(rename = "k_measured")]
    KMeasured,
    /// `n^α (1 - λₙ)`, with `n^β (1 + λ₁)` as the bottom-edge value.
    #[serde(rename = "extreme_eig_scaled")]
    ExtremeEigScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsMode {
    #[default]
    RandomUnitSphere,
    BasisE1,
    MaxEigvec,
}

fn default_epsilon() -> f64 {
    1e-3
}

fn default_bins() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Template; `n` and `seed` are replaced per trial.
    pub ensemble: EnsembleSpec,
    pub n_values: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Top-edge scaling exponent; 1 for the uniform ensemble and 2 for JUE
    /// when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Bottom-edge scaling exponent; defaults to `alpha`.
    #[serde(default)]
    pub beta: Option<f64>,
    pub statistic: Statistic,
    #[serde(default)]
    pub rhs_mode: RhsMode,
    #[serde(default)]
    pub master_seed: u64,
    /// Run the iteration on every trial (always on for `k_measured`).
    #[serde(default)]
    pub measure: bool,
    /// `E[log ξ]` for `Z_refined`; taken from the top-edge limit law when absent.
    #[serde(default)]
    pub mean_log_xi: Option<f64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

impl ExperimentConfig {
    pub fn new(
        ensemble: EnsembleSpec,
        n_values: Vec<usize>,
        trials: usize,
        statistic: Statistic,
    ) -> Self {
        Self {
            ensemble,
            n_values,
            trials,
            epsilon: default_epsilon(),
            alpha: None,
            beta: None,
            statistic,
            rhs_mode: RhsMode::default(),
            master_seed: 0,
            measure: false,
            mean_log_xi: None,
            bins: default_bins(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1/2), got {}",
                self.epsilon
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("{name} must be > 0, got {v}")));
                }
            }
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be >= 1".into()));
        }
        if self.measures() && self.ensemble.kind == EnsembleKind::EigenvaluesOnlyUniform {
            return Err(Error::Config(
                "measured halting times need a matrix ensemble, not eigenvalues-only".into(),
            ));
        }
        for &n in &self.n_values {
            if n < 2 {
                return Err(Error::Config(format!("dimension must be >= 2, got {n}")));
            }
            self.ensemble_for(n, 0).validate()?;
        }
        Ok(())
    }

    pub fn measures(&self) -> bool {
        self.measure || self.statistic == Statistic::KMeasured
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(match self.ensemble.kind {
            EnsembleKind::Jue => 2.0,
            _ => 1.0,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or_else(|| self.alpha())
    }

    pub fn ensemble_for(&self, n: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            n,
            seed,
            ..self.ensemble.clone()
        }
    }

    /// Limit laws of the scaled top and bottom edge gaps at dimension `n`.
    pub fn edge_laws(&self, n: usize) -> (LimitLaw, LimitLaw) {
        match self.ensemble.kind {
            EnsembleKind::Jue => {
                let (n1, n2) = self.ensemble_for(n, 0).jue_rows();
                let law = |rows: usize| LimitLaw::BesselHardEdge {
                    order: (rows - n) as f64,
                    quadrature: DEFAULT_QUADRATURE,
                };
                (law(n1), law(n2))
            }
            _ => (LimitLaw::exp_half(), LimitLaw::exp_half()),
        }
    }

    /// Law that `statistic` approaches at dimension `n`, with the bottom-edge
    /// law for `extreme_eig_scaled`.
    pub fn reference(&self, n: usize) -> (Option<Reference>, Option<Reference>) {
        let (top, bottom) = self.edge_laws(n);
        match self.statistic {
            Statistic::KScaled => (Some(Reference::Reciprocal(top)), None),
            Statistic::KReciprocalScaled | Statistic::ZRefined => {
                (Some(Reference::Direct(top)), None)
            }
            Statistic::ExtremeEigScaled => (
                Some(Reference::Direct(top)),
                Some(Reference::Direct(bottom)),
            ),
            Statistic::KMeasured => (None, None),
        }
    }

    pub fn resolved_mean_log_xi(&self, n: usize) -> Result<f64> {
        match self.mean_log_xi {
            Some(v) => Ok(v),
            None => self.edge_laws(n).0.mean_log(),
        }
    }
}

/// A limit law `X`, or the law of `1/X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "transform", content = "law", rename_all = "snake_case")]
pub enum Reference {
    Direct(LimitLaw),
    Reciprocal(LimitLaw),
}

impl Reference {
    pub fn cdf(&self, t: f64) -> Result<f64> {
        match self {
            Reference::Direct(law) => law.cdf(t),
            Reference::Reciprocal(law) => {
                if t <= 0.0 {
                    Ok(0.0)
                } else {
                    Ok(1.0 - law.cdf(1.0 / t)?)
                }
            }
        }
    }

    /// Density by central difference; `f_X(1/t)/t²` for the reciprocal.
    pub fn pdf(&self, t: f64, h: f64) -> Result<f64> {
        use crate::hard_edge::numeric_pdf;
        match self {
            Reference::Direct(law) => {
                if t < h {
                    Ok(0.0)
                } else {
                    numeric_pdf(law, t, h)
                }
            }
            Reference::Reciprocal(law) => {
                let x = 1.0 / t;
                if !(t > 0.0) || x < h {
                    Ok(0.0)
                } else {
                    Ok(numeric_pdf(law, x, h)? * x * x)
                }
            }
        }
    }
}

impl super::stats::Cdf for Reference {
    fn cdf(&self, t: f64) -> Result<f64> {
        Reference::cdf(self, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_names() {
        let cfg = ExperimentConfig::from_json(
            r#"{"ensemble": {"kind": "uniform-eig-haar", "n": 10},
                "n_values": [10, 20], "trials": 5, "statistic": "K_scaled"}"#,
        )
        .unwrap();
        assert_eq!(cfg.epsilon, 1e-3);
        assert_eq!(cfg.rhs_mode, RhsMode::RandomUnitSphere);
        assert_eq!(cfg.alpha(), 1.0);
        assert_eq!(cfg.beta(), 1.0);
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"rhs_mode\":\"random_unit_sphere\""));
        assert!(text.contains("\"master_seed\":0"));
        for (s, name) in [
            (Statistic::KReciprocalScaled, "\"K_reciprocal_scaled\""),
            (Statistic::ZRefined, "\"Z_refined\""),
            (Statistic::KMeasured, "\"k_measured\""),
            (Statistic::ExtremeEigScaled, "\"extreme_eig_scaled\""),
        ] {
            assert_eq!(serde_json::to_string(&s).unwrap(), name);
        }
    }

    #[test]
    fn invalid_configs() {
        let base =
            ExperimentConfig::new(EnsembleSpec::uniform(4, 0), vec![4], 3, Statistic::KScaled);
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.trials = 0;
        assert!(c.validate().is_err());
        for eps in [0.0, 0.5, -1.0, f64::NAN] {
            let mut c = base.clone();
            c.epsilon = eps;
            assert!(c.validate().is_err(), "{eps}");
        }
        let mut c = base.clone();
        c.ensemble = EnsembleSpec::eigenvalues_only(4, 0);
        c.statistic = Statistic::KMeasured;
        assert!(c.validate().is_err());
        let mut c = base;
        c.n_values = vec![1];
        assert!(c.validate().is_err());
    }

    #[test]
    fn jue_defaults() {
        let cfg = ExperimentConfig::new(
            EnsembleSpec::jue(8, 10, 11, 0),
            vec![8],
            1,
            Statistic::ExtremeEigScaled,
        );
        assert_eq!(cfg.alpha(), 2.0);
        let (top, bottom) = cfg.edge_laws(8);
        assert_eq!(
            top,
            LimitLaw::BesselHardEdge {
                order: 2.0,
                quadrature: DEFAULT_QUADRATURE
            }
        );
        assert_eq!(
            bottom,
            LimitLaw::BesselHardEdge {
                order: 3.0,
                quadrature: DEFAULT_QUADRATURE
            }
        );
    }

    #[test]
    fn reciprocal_reference() {
        let r = Reference::Reciprocal(LimitLaw::exp_half());
        // P(1/X ≤ t) = exp(-1/(2t))
        for t in [0.2, 1.0, 4.0] {
            assert!((r.cdf(t).unwrap() - (-0.5 / t).exp()).abs() < 1e-14);
            let exact = (-0.5 / t).exp() * 0.5 / (t * t);
            assert!((r.pdf(t, 1e-5).unwrap() - exact).abs() < 1e-6);
        }
        assert_eq!(r.cdf(0.0).unwrap(), 0.0);
    }
}
