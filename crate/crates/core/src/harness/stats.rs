use serde::Serialize;

use crate::error::{Error, Result};
use crate::hard_edge::{CdfTable, LimitLaw};

/// Something with a cumulative distribution function.
pub trait Cdf {
    fn cdf(&self, t: f64) -> Result<f64>;

    /// `F(t⁻)`; equals [`Cdf::cdf`] for continuous laws.
    fn cdf_left(&self, t: f64) -> Result<f64> {
        self.cdf(t)
    }
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, t: f64) -> Result<f64> {
        Ok(self(t))
    }
}

impl Cdf for LimitLaw {
    fn cdf(&self, t: f64) -> Result<f64> {
        LimitLaw::cdf(self, t)
    }
}

impl Cdf for CdfTable {
    fn cdf(&self, t: f64) -> Result<f64> {
        Ok(self.cdf_at(t))
    }
}

/// Sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {bad}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.samples.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.samples.last().copied()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.samples.iter().sum::<f64>() / self.count() as f64)
    }

    /// Type-7 quantile (linear interpolation between order statistics).
    pub fn quantile(&self, p: f64) -> Option<f64> {
        if self.is_empty() || !(0.0..=1.0).contains(&p) {
            return None;
        }
        let h = p * (self.count() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        let (a, b) = (self.samples[lo], self.samples[hi]);
        Some(a + (b - a) * (h - lo as f64))
    }
}

/// Fraction of samples `≤ t`.
pub fn empirical_cdf(dist: &EmpiricalDistribution, t: f64) -> f64 {
    if dist.is_empty() {
        return 0.0;
    }
    dist.samples.partition_point(|&x| x <= t) as f64 / dist.count() as f64
}

impl Cdf for EmpiricalDistribution {
    fn cdf(&self, t: f64) -> Result<f64> {
        Ok(empirical_cdf(self, t))
    }

    fn cdf_left(&self, t: f64) -> Result<f64> {
        if self.is_empty() {
            return Ok(0.0);
        }
        Ok(self.samples.partition_point(|&x| x < t) as f64 / self.count() as f64)
    }
}

/// `sup_i max(|F̂(xᵢ) - F(xᵢ)|, |F̂(xᵢ⁻) - F(xᵢ⁻)|)` over distinct sample values.
pub fn ks_distance<C: Cdf + ?Sized>(dist: &EmpiricalDistribution, law: &C) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::Precondition("KS distance of an empty sample".into()));
    }
    let n = dist.count() as f64;
    let xs = &dist.samples;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let end = i + xs[i..].partition_point(|&y| y == x);
        sup = sup
            .max((end as f64 / n - law.cdf(x)?).abs())
            .max((i as f64 / n - law.cdf_left(x)?).abs());
        i = end;
    }
    Ok(sup.min(1.0))
}

/// Normalised histogram over `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bin_count + 1` edges.
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    /// All samples were equal; a single bin of machine-epsilon width is used.
    pub degenerate: bool,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.densities.len()
    }

    /// `Σ density · width`, 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }
}

pub fn histogram(dist: &EmpiricalDistribution, bin_count: usize) -> Result<Histogram> {
    if bin_count == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    let (Some(lo), Some(hi)) = (dist.min(), dist.max()) else {
        return Err(Error::Domain("histogram of an empty sample".into()));
    };
    let n = dist.count() as f64;
    if hi == lo {
        let right = lo + lo.abs().max(1.0) * f64::EPSILON;
        return Ok(Histogram {
            edges: vec![lo, right],
            densities: vec![1.0 / (right - lo)],
            degenerate: true,
        });
    }
    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0usize; bin_count];
    for &x in dist.samples() {
        let b = (((x - lo) / width) as usize).min(bin_count - 1);
        counts[b] += 1;
    }
    let mut edges: Vec<f64> = (0..bin_count).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    Ok(Histogram {
        edges,
        densities: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, Exp};

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sorted_and_counted() {
        let d = dist(&[3.0, 1.0, 2.0]);
        assert_eq!(d.samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.count(), 3);
        for (i, &x) in d.samples().iter().enumerate() {
            assert_eq!(empirical_cdf(&d, x), (i + 1) as f64 / 3.0);
        }
        assert!(EmpiricalDistribution::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn empirical_cdf_cases() {
        let d = dist(&[1.0, 2.0, 3.0]);
        assert_eq!(empirical_cdf(&d, 2.5), 2.0 / 3.0);
        assert_eq!(empirical_cdf(&d, 0.5), 0.0);
        assert_eq!(empirical_cdf(&d, 3.0), 1.0);
        let odd = dist(&[5.0, 1.0, 4.0, 2.0, 3.0]);
        assert_eq!(empirical_cdf(&odd, 3.0), 6.0 / 10.0);
        assert_eq!(empirical_cdf(&dist(&[]), 1.0), 0.0);
    }

    #[test]
    fn quantiles() {
        let d = dist(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(d.quantile(0.0), Some(1.0));
        assert_eq!(d.quantile(1.0), Some(4.0));
        assert_eq!(d.quantile(0.5), Some(2.5));
        assert_eq!(dist(&[]).quantile(0.5), None);
    }

    #[test]
    fn ks_single_sample_at_median() {
        let law = LimitLaw::exp_half();
        let median = 2.0 * std::f64::consts::LN_2;
        let ks = ks_distance(&dist(&[median]), &law).unwrap();
        assert!((ks - 0.5).abs() < 1e-12, "{ks}");
    }

    #[test]
    fn ks_against_itself_is_zero() {
        let d = dist(&[0.3, 1.0, 1.0, 2.5, 7.0]);
        assert_eq!(ks_distance(&d, &d).unwrap(), 0.0);
        assert!(ks_distance(&dist(&[]), &d).is_err());
    }

    #[test]
    fn ks_closure_reference() {
        // uniform(0,1) sample at the grid midpoints: distance 1/(2n)
        let n = 10;
        let d = dist(
            &(0..n)
                .map(|i| (i as f64 + 0.5) / n as f64)
                .collect::<Vec<_>>(),
        );
        let ks = ks_distance(&d, &|t: f64| t.clamp(0.0, 1.0)).unwrap();
        assert!((ks - 0.05).abs() < 1e-12);
    }

    #[test]
    fn ks_self_test_exponential() {
        let count = 1000;
        let critical = 1.63 / (count as f64).sqrt();
        let law = LimitLaw::exp_half();
        let exp = Exp::new(0.5).unwrap();
        let mut rng = rng_from_seed(2024);
        let below = (0..100)
            .filter(|_| {
                let d =
                    EmpiricalDistribution::new((0..count).map(|_| exp.sample(&mut rng)).collect())
                        .unwrap();
                ks_distance(&d, &law).unwrap() < critical
            })
            .count();
        assert!(below >= 99, "{below}");
    }

    #[test]
    fn histogram_uniform_within_three_sigma() {
        let mut rng = rng_from_seed(7);
        let n = 10_000;
        let d = EmpiricalDistribution::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap();
        let h = histogram(&d, 10).unwrap();
        assert_eq!(h.bin_count(), 10);
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        // bin count ~ Binomial(n, 1/10); density = count / (n · width)
        let width = (d.max().unwrap() - d.min().unwrap()) / 10.0;
        let sigma = (n as f64 * 0.1 * 0.9).sqrt() / (n as f64 * width);
        for &den in &h.densities {
            assert!((den - 1.0).abs() < 3.0 * sigma + 0.01, "{den}");
        }
    }

    #[test]
    fn histogram_single_bin() {
        let d = dist(&[1.0, 2.0, 5.0]);
        let h = histogram(&d, 1).unwrap();
        assert_eq!(h.edges, vec![1.0, 5.0]);
        assert_eq!(h.densities, vec![0.25]);
        assert!(!h.degenerate);
    }

    #[test]
    fn histogram_degenerate_and_errors() {
        let h = histogram(&dist(&[2.0, 2.0, 2.0]), 5).unwrap();
        assert!(h.degenerate);
        assert_eq!(h.bin_count(), 1);
        assert!((h.total_mass() - 1.0).abs() < 1e-9);
        assert!(histogram(&dist(&[]), 3).is_err());
        assert!(histogram(&dist(&[1.0]), 0).is_err());
    }

    #[test]
    fn max_sample_lands_in_last_bin() {
        let h = histogram(&dist(&[0.0, 0.1, 0.2, 1.0]), 4).unwrap();
        assert_eq!(h.densities, vec![3.0, 0.0, 0.0, 1.0]);
    }

    proptest::proptest! {
        #[test]
        fn cdf_steps_and_ks_bounds(
            v in proptest::collection::vec(-50.0f64..50.0, 1..60),
            t in -60.0f64..60.0,
        ) {
            let d = EmpiricalDistribution::new(v).unwrap();
            for (i, &x) in d.samples().iter().enumerate() {
                proptest::prop_assert!(empirical_cdf(&d, x) >= (i + 1) as f64 / d.count() as f64);
            }
            let c = empirical_cdf(&d, t);
            proptest::prop_assert!((0.0..=1.0).contains(&c));
            proptest::prop_assert!(c <= empirical_cdf(&d, t + 1.0));
            let ks = ks_distance(&d, &|x: f64| 1.0 / (1.0 + (-x).exp())).unwrap();
            proptest::prop_assert!((1.0 / (2.0 * d.count() as f64) - 1e-12..=1.0).contains(&ks));
        }

        #[test]
        fn histogram_mass_is_one(
            v in proptest::collection::vec(-5.0f64..5.0, 1..200),
            bins in 1usize..30,
        ) {
            let h = histogram(&EmpiricalDistribution::new(v).unwrap(), bins).unwrap();
            proptest::prop_assert!((h.total_mass() - 1.0).abs() < 1e-9);
            proptest::prop_assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
