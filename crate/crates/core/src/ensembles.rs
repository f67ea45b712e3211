//! Random matrix ensembles: the uniform-spectrum Haar-rotated model, its
//! eigenvalue-only fast path, and the Jacobi unitary ensemble built as
//! `W = I - 2 (A+B)^{-1/2} A (A+B)^{-1/2}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, inv_sqrt_psd, symmetric_eig, DenseMatrix, Symmetry};

/// Generator used for every trial stream.
pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master_seed`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    UniformEigHaar,
    Jue,
    EigenvaluesOnlyUniform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    #[serde(default)]
    pub n1: Option<usize>,
    #[serde(default)]
    pub n2: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn uniform(n: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::UniformEigHaar,
            n,
            n1: None,
            n2: None,
            seed,
        }
    }

    pub fn eigenvalues_only(n: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::EigenvaluesOnlyUniform,
            ..Self::uniform(n, seed)
        }
    }

    pub fn jue(n: usize, n1: usize, n2: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::Jue,
            n,
            n1: Some(n1),
            n2: Some(n2),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    /// Jacobi factor row counts, defaulting to `n + 2` when unset.
    pub fn jue_rows(&self) -> (usize, usize) {
        (self.n1.unwrap_or(self.n + 2), self.n2.unwrap_or(self.n + 2))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Dimension("ensemble dimension must be >= 1".into()));
        }
        if self.kind == EnsembleKind::Jue {
            let (n1, n2) = self.jue_rows();
            if n1 < self.n || n2 < self.n {
                return Err(Error::Dimension(format!(
                    "JUE factors need n1, n2 >= n (got n={}, n1={n1}, n2={n2})",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Draws one sample from this spec's seed.
    pub fn sample(&self) -> Result<EnsembleSample> {
        self.validate()?;
        let mut sample = match self.kind {
            EnsembleKind::UniformEigHaar => sample_uniform_eig_matrix(self.n, self.seed)?,
            EnsembleKind::EigenvaluesOnlyUniform => {
                sample_eigenvalues_only_uniform(self.n, self.seed)?
            }
            EnsembleKind::Jue => {
                let (n1, n2) = self.jue_rows();
                sample_jue_matrix(self.n, n1, n2, self.seed)?
            }
        };
        sample.spec = self.clone();
        Ok(sample)
    }
}

#[derive(Debug, Clone)]
pub enum SampleMatrix {
    Real(DenseMatrix<f64>),
    Complex(DenseMatrix<Complex64>),
}

#[derive(Debug, Clone)]
pub struct EnsembleSample {
    pub spec: EnsembleSpec,
    pub matrix: Option<SampleMatrix>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub seed_used: u64,
}

impl EnsembleSample {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Dimension("ensemble dimension must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Haar-distributed orthogonal matrix: QR of an iid standard normal matrix
/// followed by `Q <- Q diag(sign(R_ii))`, with `sign(0) = +1`.
pub fn sample_haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseMatrix<f64>> {
    check_dim(n)?;
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    DenseMatrix::new(q, Symmetry::General)
}

/// Uniform(-1, 1) on the open interval.
fn open_uniform<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    let dist = Uniform::new(-1.0, 1.0).expect("valid bounds");
    (0..count)
        .map(|_| loop {
            let x: f64 = dist.sample(rng);
            if x > -1.0 {
                break x;
            }
        })
        .collect()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// `A = Q Λ Qᵀ` with `Q` Haar and `Λ` iid Uniform(-1, 1).
pub fn sample_uniform_eig_matrix(n: usize, seed: u64) -> Result<EnsembleSample> {
    check_dim(n)?;
    let mut rng = rng_from_seed(seed);
    let spectrum = open_uniform(&mut rng, n);
    let q = sample_haar_orthogonal(n, &mut rng)?.into_entries();
    let mut scaled = q.clone();
    for (j, &lam) in spectrum.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lam);
    }
    let a = hermitian_part(&(scaled * q.transpose()));
    Ok(EnsembleSample {
        spec: EnsembleSpec::uniform(n, seed),
        matrix: Some(SampleMatrix::Real(DenseMatrix::new(
            a,
            Symmetry::Symmetric,
        )?)),
        eigenvalues: sorted(spectrum),
        seed_used: seed,
    })
}

/// Sorted iid Uniform(-1, 1) spectrum without building the matrix. Uses the
/// same stream layout as [`sample_uniform_eig_matrix`], so both return the
/// same spectrum for the same seed.
pub fn sample_eigenvalues_only_uniform(n: usize, seed: u64) -> Result<EnsembleSample> {
    check_dim(n)?;
    let mut rng = rng_from_seed(seed);
    Ok(EnsembleSample {
        spec: EnsembleSpec::eigenvalues_only(n, seed),
        matrix: None,
        eigenvalues: sorted(open_uniform(&mut rng, n)),
        seed_used: seed,
    })
}

/// Standard complex normal: real and imaginary parts iid N(0, 1/2).
fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

fn jue_attempt<R: Rng + ?Sized>(
    n: usize,
    n1: usize,
    n2: usize,
    rng: &mut R,
) -> Result<DenseMatrix<Complex64>> {
    let v = complex_gaussian(n1, n, rng);
    let w = complex_gaussian(n2, n, rng);
    let a = hermitian_part(&v.ad_mul(&v));
    let b = hermitian_part(&w.ad_mul(&w));
    let sum = DenseMatrix::new(hermitian_part(&(&a + &b)), Symmetry::Hermitian)?;
    let r = inv_sqrt_psd(&sum)?.into_entries();
    let v_mat = &r * a * &r;
    let w_mat = DMatrix::<Complex64>::identity(n, n) - v_mat * Complex64::new(2.0, 0.0);
    DenseMatrix::new(hermitian_part(&w_mat), Symmetry::Hermitian)
}

/// Jacobi unitary ensemble matrix `W_n = I - 2V`. Exponents of the eigenvalue
/// density are `a = n1 - n` at `+1` and `b = n2 - n` at `-1`.
pub fn sample_jue_matrix(n: usize, n1: usize, n2: usize, seed: u64) -> Result<EnsembleSample> {
    let spec = EnsembleSpec::jue(n, n1, n2, seed);
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let w = match jue_attempt(n, n1, n2, &mut rng) {
        Err(Error::Singular { .. }) => jue_attempt(n, n1, n2, &mut rng)?,
        other => other?,
    };
    let eig = symmetric_eig(&w)?;
    Ok(EnsembleSample {
        spec,
        matrix: Some(SampleMatrix::Complex(w)),
        eigenvalues: eig.eigenvalues,
        seed_used: seed,
    })
}

/// Uniformly distributed unit vector (normalised iid Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 0.0 {
            return g / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm_from_eigs;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.amax()
    }

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = rng_from_seed(1);
        for n in [1, 2, 5, 20] {
            let q = sample_haar_orthogonal(n, &mut rng).unwrap().into_entries();
            let gram = q.transpose() * &q;
            assert!(max_abs(&(gram - DMatrix::identity(n, n))) < 1e-10);
        }
        assert!(sample_haar_orthogonal(0, &mut rng).is_err());
    }

    #[test]
    fn haar_one_by_one_signs_balanced() {
        let mut rng = rng_from_seed(2);
        let draws = 10_000;
        let plus = (0..draws)
            .filter(|_| sample_haar_orthogonal(1, &mut rng).unwrap().entries()[(0, 0)] > 0.0)
            .count();
        let p = plus as f64 / draws as f64;
        let sigma = (0.25 / draws as f64).sqrt();
        assert!((p - 0.5).abs() < 3.0 * sigma, "p = {p}");
    }

    #[test]
    fn haar_two_by_two_angle_uniform() {
        let mut rng = rng_from_seed(3);
        let mut angles: Vec<f64> = (0..1000)
            .map(|_| {
                let q = sample_haar_orthogonal(2, &mut rng).unwrap();
                let (c, s) = (q.entries()[(0, 0)], q.entries()[(1, 0)]);
                s.atan2(c).rem_euclid(std::f64::consts::TAU)
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let n = angles.len() as f64;
        let d = angles
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let f = a / std::f64::consts::TAU;
                ((i as f64 + 1.0) / n - f)
                    .abs()
                    .max((f - i as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 0.05, "KS = {d}");
    }

    #[test]
    fn uniform_matrix_spectrum_matches_construction() {
        for seed in 0..5 {
            let s = sample_uniform_eig_matrix(12, seed).unwrap();
            let Some(SampleMatrix::Real(m)) = &s.matrix else {
                panic!("matrix expected")
            };
            let eig = symmetric_eig(m).unwrap();
            for (a, b) in eig.eigenvalues.iter().zip(&s.eigenvalues) {
                assert!((a - b).abs() < 1e-9);
            }
            assert!(spectral_norm_from_eigs(&eig.eigenvalues) < 1.0);
            assert!(s.eigenvalues.iter().all(|&x| x > -1.0 && x < 1.0));
        }
    }

    #[test]
    fn fast_path_shares_spectrum_with_full_sampler() {
        let a = sample_uniform_eig_matrix(9, 42).unwrap();
        let b = sample_eigenvalues_only_uniform(9, 42).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert!(b.matrix.is_none());
    }

    #[test]
    fn fast_path_sorted() {
        for seed in 0..20 {
            let s = sample_eigenvalues_only_uniform(50, seed).unwrap();
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn max_order_statistic_mean() {
        let n = 100;
        let draws = 2000;
        let mean = (0..draws)
            .map(|i| {
                sample_eigenvalues_only_uniform(n, trial_seed(9, i))
                    .unwrap()
                    .lambda_max()
            })
            .sum::<f64>()
            / draws as f64;
        let nf = n as f64;
        let expected = 1.0 - 2.0 / (nf + 1.0);
        // Var(max of n U(0,1)) = n / ((n+1)^2 (n+2)), scaled by 2
        let sd = 2.0 * (nf / ((nf + 1.0).powi(2) * (nf + 2.0))).sqrt();
        let se = sd / (draws as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn jue_properties() {
        let s = sample_jue_matrix(8, 10, 10, 77).unwrap();
        let Some(SampleMatrix::Complex(w)) = &s.matrix else {
            panic!("matrix expected")
        };
        let e = w.entries();
        let dev = (e - e.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10);
        assert!(s
            .eigenvalues
            .iter()
            .all(|&x| (-1.0 - 1e-9..=1.0 + 1e-9).contains(&x)));
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jue_rejects_short_factors() {
        assert!(matches!(
            sample_jue_matrix(5, 4, 6, 0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn determinism() {
        let a = sample_jue_matrix(6, 8, 8, 5).unwrap();
        let b = sample_jue_matrix(6, 8, 8, 5).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        let a = sample_uniform_eig_matrix(6, 5).unwrap();
        let b = sample_uniform_eig_matrix(6, 5).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn spec_json_keys() {
        let spec = EnsembleSpec::jue(10, 12, 13, 99);
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["kind"], "jue");
        assert_eq!(json["n"], 10);
        assert_eq!(json["n1"], 12);
        assert_eq!(json["n2"], 13);
        assert_eq!(json["seed"], 99);
        let back: EnsembleSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, spec);

        let parsed: EnsembleSpec =
            serde_json::from_str(r#"{"kind":"uniform-eig-haar","n":4,"seed":1}"#).unwrap();
        assert_eq!(parsed, EnsembleSpec::uniform(4, 1));
    }
}
