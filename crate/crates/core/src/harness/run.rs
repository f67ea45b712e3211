use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, RhsMode, Statistic};
use crate::ensembles::{
    random_unit_vector, rng_from_seed, sample_eigenvalues_only_uniform, trial_seed, EnsembleKind,
    EnsembleSample, SampleMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eig, DenseMatrix, Scalar};
use crate::neumann::{
    refined_statistic, scaled_k, sharpness_rhs, HaltingRecord, IterationProblem, SharpnessTarget,
};

/// Salt separating the right-hand-side stream from the matrix stream.
const RHS_STREAM: u64 = 0x6a09_e667_f3bc_c909;

/// One trial: its seed, halting data and the configured statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRow {
    /// Global index across all `n` values.
    pub trial_index: u64,
    pub n: usize,
    pub seed: u64,
    pub record: HaltingRecord,
    pub value: f64,
    /// Bottom-edge value for `extreme_eig_scaled`.
    pub value_bottom: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialTable {
    pub config: ExperimentConfig,
    /// In trial-index order.
    pub rows: Vec<TrialRow>,
}

impl TrialTable {
    pub fn rows_for(&self, n: usize) -> impl Iterator<Item = &TrialRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }

    pub fn saturated_count(&self, n: usize) -> usize {
        self.rows_for(n).filter(|r| r.record.saturated()).count()
    }
}

/// Runs `trials` independent draws for every `n`. Trials run in parallel and
/// are collected in index order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TrialTable> {
    config.validate()?;
    let trials = config.trials as u64;
    let jobs: Vec<(u64, usize)> = config
        .n_values
        .iter()
        .enumerate()
        .flat_map(|(pos, &n)| (0..trials).map(move |t| (pos as u64 * trials + t, n)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(idx, n)| run_trial(config, n, idx))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialTable {
        config: config.clone(),
        rows,
    })
}

/// Recomputes trial `trial_index` at dimension `n` from the master seed.
pub fn run_trial(config: &ExperimentConfig, n: usize, trial_index: u64) -> Result<TrialRow> {
    let seed = trial_seed(config.master_seed, trial_index);
    let spec = config.ensemble_for(n, seed);
    let measured = config.measures();
    // the eigenvalue-only sampler reproduces the Haar model's spectrum
    let sample = if !measured && spec.kind == EnsembleKind::UniformEigHaar {
        sample_eigenvalues_only_uniform(n, seed)?
    } else {
        spec.sample()?
    };
    let record = if measured {
        measure(config, &sample, seed)?
    } else {
        HaltingRecord::from_extremes(sample.lambda_min(), sample.lambda_max(), config.epsilon)?
    };
    if !record.bounds_hold() {
        return Err(Error::BoundViolation {
            trial_index,
            n,
            detail: format!(
                "k_eps={:?} K_eps={} k*_eps={:?} K*_eps={}",
                record.k_eps, record.big_k_eps, record.k_star_eps, record.big_k_star_eps
            ),
        });
    }
    let (value, value_bottom) = statistic(config, n, &record)?;
    Ok(TrialRow {
        trial_index,
        n,
        seed,
        record,
        value,
        value_bottom,
    })
}

fn statistic(
    config: &ExperimentConfig,
    n: usize,
    rec: &HaltingRecord,
) -> Result<(f64, Option<f64>)> {
    let (alpha, eps) = (config.alpha(), config.epsilon);
    let nf = n as f64;
    Ok(match config.statistic {
        Statistic::KScaled => (scaled_k(rec.big_k_eps as f64, n, alpha, eps), None),
        Statistic::KReciprocalScaled => (1.0 / scaled_k(rec.big_k_eps as f64, n, alpha, eps), None),
        Statistic::ZRefined => (
            refined_statistic(rec.kn, n, alpha, eps, config.resolved_mean_log_xi(n)?)?,
            None,
        ),
        Statistic::KMeasured => {
            let k = rec
                .k_eps
                .ok_or_else(|| Error::Config("trial was not measured".into()))?;
            (k.count() as f64, None)
        }
        Statistic::ExtremeEigScaled => (
            nf.powf(alpha) * (1.0 - rec.lambda_max),
            Some(nf.powf(config.beta()) * (1.0 + rec.lambda_min)),
        ),
    })
}

fn measure(config: &ExperimentConfig, sample: &EnsembleSample, seed: u64) -> Result<HaltingRecord> {
    match &sample.matrix {
        Some(SampleMatrix::Real(m)) => measure_with(config, m, seed, |x| x),
        Some(SampleMatrix::Complex(m)) => measure_with(config, m, seed, |x| Complex64::new(x, 0.0)),
        None => Err(Error::Config(
            "sample carries no matrix to iterate on".into(),
        )),
    }
}

fn measure_with<T: Scalar>(
    config: &ExperimentConfig,
    matrix: &DenseMatrix<T>,
    seed: u64,
    lift: impl Fn(f64) -> T,
) -> Result<HaltingRecord> {
    let eig = symmetric_eig(matrix)?;
    let n = matrix.dim();
    let rhs: DVector<T> = match config.rhs_mode {
        RhsMode::RandomUnitSphere => {
            let mut rng = rng_from_seed(seed ^ RHS_STREAM);
            random_unit_vector(n, &mut rng).map(&lift)
        }
        RhsMode::BasisE1 => DVector::from_fn(n, |i, _| lift(if i == 0 { 1.0 } else { 0.0 })),
        RhsMode::MaxEigvec => sharpness_rhs(&eig, SharpnessTarget::MaxEig)?,
    };
    let problem =
        IterationProblem::with_eigendecomposition(matrix.clone(), eig, rhs, config.epsilon, None)?;
    HaltingRecord::measure(&problem)
}
