//! Self-checks behind `neumann verify`. Each check is deterministic (fixed
//! seeds) and reports its measured value next to the threshold it must meet.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Statistic};
use super::run::{run_experiment, run_trial, TrialTable};
use super::stats::{ks_distance, EmpiricalDistribution};
use crate::ensembles::{rng_from_seed, sample_haar_orthogonal, EnsembleSpec};
use crate::error::{Error, Result};
use crate::hard_edge::{fredholm_det, LimitLaw};
use crate::linalg::{symmetric_eig, DenseMatrix, Symmetry};
use crate::neumann::{
    bound_k, iterate, log_reciprocal_gap, sharpness_rhs, tail_norm, Halt, IterationProblem,
    SharpnessTarget, MEAN_LOG_EXP_HALF,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "lemma41")]
    Lemma41,
    #[serde(rename = "prop25")]
    Prop25,
    #[serde(rename = "prop34")]
    Prop34,
    #[serde(rename = "thm32")]
    Thm32,
    #[serde(rename = "jue-hard-edge")]
    JueHardEdge,
    #[serde(rename = "appendixA")]
    AppendixA,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Lemma41,
        Suite::Prop25,
        Suite::Prop34,
        Suite::Thm32,
        Suite::JueHardEdge,
        Suite::AppendixA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma41 => "lemma41",
            Suite::Prop25 => "prop25",
            Suite::Prop34 => "prop34",
            Suite::Thm32 => "thm32",
            Suite::JueHardEdge => "jue-hard-edge",
            Suite::AppendixA => "appendixA",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// How a check compares `value` with `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn below(name: &str, value: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::Below,
            passed: value < threshold,
            detail,
        }
    }

    pub fn at_most(name: &str, value: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            passed: value <= threshold,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run_suite(suite: Suite) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::Lemma41 => vec![tail_norm_oracle(200, 41)?, bound_k_exactness(100, 42)?],
        Suite::Prop25 => vec![halting_bound_audit(100, 50, 25)?, sharpness(50, 26)?],
        Suite::Prop34 => extreme_edge_ks(10_000, 2000, 34)?,
        Suite::Thm32 => {
            let batch = jue_batch(200, 500, 32)?;
            let mut checks = vec![log_gap_grid()];
            checks.extend(jue_scaling(&batch, 60)?);
            checks
        }
        Suite::JueHardEdge => {
            let mut checks = fredholm_convergence()?;
            checks.extend(jue_edges(&jue_batch(200, 500, 35)?, 60)?);
            checks
        }
        Suite::AppendixA => {
            let mut checks = vec![mean_log_xi_check()];
            checks.extend(refined_vs_unrefined(1000, 1000, 1e-3, 7)?);
            checks
        }
    };
    Ok(VerifyReport {
        suite,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Haar-rotated symmetric matrix with the given spectrum.
fn rotated<R: Rng>(spectrum: &[f64], rng: &mut R) -> Result<DenseMatrix<f64>> {
    let q = sample_haar_orthogonal(spectrum.len(), rng)?.into_entries();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(spectrum));
    let a = &q * d * q.transpose();
    DenseMatrix::new((&a + a.transpose()) * 0.5, Symmetry::Symmetric)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// `‖Σ_{i=k}^{2000} Mⁱ‖` by explicit powers against the closed-form tail norm,
/// `k = 0..=30`, on random symmetric matrices of size ≤ 8 with spectrum in
/// `(-0.95, 0.95)`.
pub fn tail_norm_oracle(count: usize, seed: u64) -> Result<Check> {
    const TOP: usize = 2000;
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n = rng.random_range(1..=8);
        let spectrum = sorted((0..n).map(|_| rng.random_range(-0.95..0.95)).collect());
        let m = rotated(&spectrum, &mut rng)?.into_entries();
        let mut powers = Vec::with_capacity(TOP + 1);
        powers.push(DMatrix::<f64>::identity(n, n));
        for i in 1..=TOP {
            powers.push(&powers[i - 1] * &m);
        }
        let mut suffix = DMatrix::<f64>::zeros(n, n);
        for k in (0..=TOP).rev() {
            suffix += &powers[k];
            if k <= 30 {
                let brute = suffix.clone().singular_values().max();
                let closed = tail_norm(spectrum[0], spectrum[n - 1], k as u64)?;
                worst = worst.max((brute - closed).abs());
            }
        }
    }
    Ok(Check::below(
        "tail norm vs brute-force power sums",
        worst,
        1e-8,
        format!("{count} matrices, k = 0..=30"),
    ))
}

/// Closed-form `K_eps` against the first `k` with `tail_norm < ε`.
pub fn bound_k_exactness(count: usize, seed: u64) -> Result<Check> {
    let mut rng = rng_from_seed(seed);
    let mut mismatches = 0usize;
    for _ in 0..count {
        let a = rng.random_range(-0.99..0.99);
        let b = rng.random_range(-0.99..0.99);
        let (lmin, lmax) = if a <= b { (a, b) } else { (b, a) };
        let eps = 10f64.powf(rng.random_range(-8.0..(0.49f64).log10()));
        let closed = bound_k(lmin, lmax, eps)?.k_eps;
        let mut k = 0u64;
        while tail_norm(lmin, lmax, k)? >= eps {
            k += 1;
        }
        if k != closed {
            mismatches += 1;
        }
    }
    Ok(Check::at_most(
        "closed-form K_eps equals direct search",
        mismatches as f64,
        0.0,
        format!("{count} random (λ₁, λₙ, ε) triples"),
    ))
}

/// `k_eps ≤ K_eps` and `k*_eps ≤ K*_eps` on measured uniform-ensemble trials.
pub fn halting_bound_audit(count: usize, n: usize, seed: u64) -> Result<Check> {
    let mut cfg = ExperimentConfig::new(
        EnsembleSpec::uniform(n, 0),
        vec![n],
        count,
        Statistic::KMeasured,
    );
    cfg.master_seed = seed;
    let mut violations = 0usize;
    let mut saturated = 0usize;
    for idx in 0..count as u64 {
        match run_trial(&cfg, n, idx) {
            Ok(row) => saturated += row.record.saturated() as usize,
            Err(Error::BoundViolation { .. }) => violations += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(Check::at_most(
        "measured halting times within bounds",
        violations as f64,
        0.0,
        format!("{count} instances of size {n}, {saturated} saturated"),
    ))
}

/// `k_eps = K_eps` when `b` is the top eigenvector and the `λₙ` branch
/// dominates (`λₙ ≥ 0.8`, `|λ₁| ≤ 0.5`).
pub fn sharpness(count: usize, seed: u64) -> Result<Check> {
    let mut rng = rng_from_seed(seed);
    let mut mismatches = 0usize;
    for _ in 0..count {
        let n = rng.random_range(2..=12);
        let top = rng.random_range(0.8..0.95);
        let bottom = rng.random_range(-0.5..=0.5);
        let mut spectrum = vec![bottom, top];
        spectrum.extend((2..n).map(|_| rng.random_range(bottom..top)));
        let spectrum = sorted(spectrum);
        let eps = 10f64.powf(rng.random_range(-8.0..-2.0));
        let matrix = rotated(&spectrum, &mut rng)?;
        let eig = symmetric_eig(&matrix)?;
        let expected = bound_k(eig.lambda_min(), eig.lambda_max(), eps)?.k_eps;
        let rhs = sharpness_rhs(&eig, SharpnessTarget::MaxEig)?;
        let problem = IterationProblem::with_eigendecomposition(matrix, eig, rhs, eps, None)?;
        if iterate(&problem).k_eps != Halt::At(expected) {
            mismatches += 1;
        }
    }
    Ok(Check::at_most(
        "k_eps attains K_eps for the top eigenvector",
        mismatches as f64,
        0.0,
        format!("{count} constructed instances"),
    ))
}

fn uniform_table(
    n: usize,
    trials: usize,
    statistic: Statistic,
    epsilon: f64,
    seed: u64,
) -> Result<TrialTable> {
    let mut cfg = ExperimentConfig::new(
        EnsembleSpec::eigenvalues_only(n, 0),
        vec![n],
        trials,
        statistic,
    );
    cfg.master_seed = seed;
    cfg.epsilon = epsilon;
    run_experiment(&cfg)
}

fn ks_of(values: Vec<f64>, law: &LimitLaw) -> Result<f64> {
    ks_distance(&EmpiricalDistribution::new(values)?, law)
}

/// `n(1 - λₙ)` and `n(1 + λ₁)` against `Exp(1/2)`.
pub fn extreme_edge_ks(n: usize, trials: usize, seed: u64) -> Result<Vec<Check>> {
    let table = uniform_table(n, trials, Statistic::ExtremeEigScaled, 1e-3, seed)?;
    let law = LimitLaw::exp_half();
    let top = ks_of(table.rows.iter().map(|r| r.value).collect(), &law)?;
    let bottom = ks_of(
        table.rows.iter().filter_map(|r| r.value_bottom).collect(),
        &law,
    )?;
    let detail = format!("n = {n}, {trials} trials");
    Ok(vec![
        Check::below("KS of n(1 - λₙ) vs Exp(1/2)", top, 0.05, detail.clone()),
        Check::below("KS of n(1 + λ₁) vs Exp(1/2)", bottom, 0.05, detail),
    ])
}

/// Mean-corrected statistic against the plain reciprocal one, both against
/// `Exp(1/2)` on the same spectra.
pub fn refined_vs_unrefined(
    n: usize,
    trials: usize,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<Check>> {
    let law = LimitLaw::exp_half();
    let refined = uniform_table(n, trials, Statistic::ZRefined, epsilon, seed)?;
    let plain = uniform_table(n, trials, Statistic::KReciprocalScaled, epsilon, seed)?;
    let ks_refined = ks_of(refined.rows.iter().map(|r| r.value).collect(), &law)?;
    let ks_plain = ks_of(plain.rows.iter().map(|r| r.value).collect(), &law)?;
    let detail = format!("n = {n}, ε = {epsilon}, {trials} trials, unrefined KS {ks_plain:.4}");
    Ok(vec![
        Check::below(
            "KS of refined statistic vs Exp(1/2)",
            ks_refined,
            0.1,
            detail.clone(),
        ),
        Check::below(
            "refined KS minus unrefined KS",
            ks_refined - ks_plain,
            0.0,
            detail,
        ),
    ])
}

/// Simpson quadrature of `log(x) · ½e^{-x/2}` against `log 2 - γ`, after
/// `x = eʸ` (smooth, doubly exponential decay).
pub fn mean_log_xi_check() -> Check {
    let g = |y: f64| y * 0.5 * y.exp() * (-0.5 * y.exp()).exp();
    let (a, b, steps) = (-40.0, 6.0, 20_000);
    let h = (b - a) / steps as f64;
    let mut acc = g(a) + g(b);
    for i in 1..steps {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(a + i as f64 * h);
    }
    let numeric = acc * h / 3.0;
    Check::below(
        "E[log ξ] for Exp(1/2) by quadrature",
        (numeric - MEAN_LOG_EXP_HALF).abs(),
        1e-8,
        format!("quadrature {numeric:.12}, closed form {MEAN_LOG_EXP_HALF:.12}"),
    )
}

/// `|1/(N log|1 - x/N|) + 1/x| ≤ 8/N` on a log grid of `x ∈ (0, N/2]`.
pub fn log_gap_grid() -> Check {
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for n in [10.0, 100.0, 1000.0f64] {
        for alpha in [1.0, 2.0] {
            let big = n.powf(alpha);
            let (lo, hi) = (1e-6f64.ln(), (big / 2.0).ln());
            for i in 0..1000 {
                let x = if i == 999 {
                    big / 2.0
                } else {
                    (lo + (hi - lo) * i as f64 / 999.0).exp()
                };
                let ratio = log_reciprocal_gap(x, n, alpha) * big / 8.0;
                worst = worst.max(ratio);
                if ratio > 1.0 {
                    violations += 1;
                }
            }
        }
    }
    Check::at_most(
        "reciprocal-log gap within 8/n^α",
        violations as f64,
        0.0,
        format!("largest gap / bound {worst:.4}"),
    )
}

/// Fredholm determinant: self-convergence in `m`, behaviour on a vanishing
/// interval and monotonicity in `s`.
pub fn fredholm_convergence() -> Result<Vec<Check>> {
    let mut spread = 0.0f64;
    for order in [0.0, 1.0, 2.0] {
        for s in [1.0, 5.0, 20.0] {
            spread = spread.max((fredholm_det(order, s, 40)? - fredholm_det(order, s, 80)?).abs());
        }
    }
    let small = [1.0, 2.0]
        .iter()
        .map(|&o| fredholm_det(o, 0.01, 40).map(|d| (d - 1.0).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    // 𝕁₀(0,0) = 1/4, so det(I - 𝕁_{0,s}) = 1 - s/4 + O(s²)
    let order0 = (fredholm_det(0.0, 0.01, 40)? - (1.0 - 0.01 / 4.0)).abs();
    let mut increases = 0usize;
    for order in [0.0, 1.0, 2.0] {
        let mut prev = 1.0;
        for i in 1..=60 {
            let d = fredholm_det(order, 0.5 * i as f64, 40)?;
            if d > prev {
                increases += 1;
            }
            prev = d;
        }
    }
    Ok(vec![
        Check::below(
            "Fredholm determinant m = 40 vs m = 80",
            spread,
            1e-8,
            "orders 0, 1, 2; s = 1, 5, 20".into(),
        ),
        Check::below(
            "Fredholm determinant near 1 at s = 0.01",
            small,
            1e-3,
            "orders 1, 2".into(),
        ),
        Check::below(
            "Fredholm determinant at s = 0.01 vs 1 - s/4",
            order0,
            1e-4,
            "order 0".into(),
        ),
        Check::at_most(
            "Fredholm determinant nonincreasing in s",
            increases as f64,
            0.0,
            "orders 0, 1, 2; s = 0.5, 1, …, 30".into(),
        ),
    ])
}

/// JUE extreme eigenvalues with `n1 = n2 = n + 2`.
pub fn jue_batch(n: usize, trials: usize, seed: u64) -> Result<TrialTable> {
    let spec = EnsembleSpec::jue(n, n + 2, n + 2, 0);
    let mut cfg = ExperimentConfig::new(spec, vec![n], trials, Statistic::ExtremeEigScaled);
    cfg.master_seed = seed;
    run_experiment(&cfg)
}

fn hard_edge_law(order: f64, quadrature: usize) -> LimitLaw {
    LimitLaw::BesselHardEdge { order, quadrature }
}

/// `n²(1 - λₙ)` and `n²(1 + λ₁)` against the order-2 hard-edge law.
pub fn jue_edges(batch: &TrialTable, quadrature: usize) -> Result<Vec<Check>> {
    let law = hard_edge_law(2.0, quadrature);
    let top = ks_of(batch.rows.iter().map(|r| r.value).collect(), &law)?;
    let bottom = ks_of(
        batch.rows.iter().filter_map(|r| r.value_bottom).collect(),
        &law,
    )?;
    let detail = format!("{} trials, m = {quadrature}", batch.rows.len());
    Ok(vec![
        Check::below(
            "KS of n²(1 - λₙ) vs hard-edge law",
            top,
            0.1,
            detail.clone(),
        ),
        Check::below("KS of n²(1 + λ₁) vs hard-edge law", bottom, 0.1, detail),
    ])
}

/// `2n² log(n/√ε) / K_eps` against the order-2 hard-edge law.
pub fn jue_scaling(batch: &TrialTable, quadrature: usize) -> Result<Vec<Check>> {
    let eps = batch.config.epsilon;
    let values: Vec<f64> = batch
        .rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            2.0 * n * n * (n / eps.sqrt()).ln() / r.record.big_k_eps as f64
        })
        .collect();
    let negative = values.iter().filter(|&&v| !(v >= 0.0)).count();
    let ks = ks_of(values, &hard_edge_law(2.0, quadrature))?;
    let detail = format!("{} trials, ε = {eps}", batch.rows.len());
    Ok(vec![
        Check::at_most(
            "reciprocal JUE statistic nonnegative",
            negative as f64,
            0.0,
            detail.clone(),
        ),
        Check::below(
            "KS of reciprocal JUE statistic vs hard-edge law",
            ks,
            0.15,
            detail,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(
                serde_json::to_string(&s).unwrap(),
                format!("\"{}\"", s.name())
            );
        }
        assert!("lemma42".parse::<Suite>().is_err());
    }

    #[test]
    fn check_comparisons() {
        assert!(Check::below("a", 0.5, 1.0, String::new()).passed);
        assert!(!Check::below("a", 1.0, 1.0, String::new()).passed);
        assert!(Check::at_most("a", 0.0, 0.0, String::new()).passed);
        assert!(!Check::at_most("a", f64::NAN, 0.0, String::new()).passed);
    }

    #[test]
    fn small_scale_checks_pass() {
        assert!(tail_norm_oracle(5, 1).unwrap().passed);
        assert!(bound_k_exactness(50, 2).unwrap().passed);
        assert!(halting_bound_audit(5, 10, 3).unwrap().passed);
        assert!(sharpness(10, 4).unwrap().passed);
        assert!(log_gap_grid().passed);
        assert!(mean_log_xi_check().passed);
    }

    #[test]
    fn jue_checks_run_on_small_batch() {
        let batch = jue_batch(6, 4, 9).unwrap();
        assert_eq!(batch.rows.len(), 4);
        let checks = jue_scaling(&batch, 20).unwrap();
        assert!(checks[0].passed);
        assert!(checks[1].value >= 0.0 && checks[1].value <= 1.0);
    }
}
