//! Posterior distributions of average effects in the bivariate normal
//! potential-outcome model with known variances, known correlation and a
//! flat prior on the two means.
//!
//! All three posteriors are normal and centered at `Ȳ1 − Ȳ0`; they differ
//! in how much of the population the estimand averages over.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesModel {
    pub sigma1: f64,
    pub sigma0: f64,
    pub kappa: f64,
    /// Treated and control counts in the population.
    pub treated: usize,
    pub control: usize,
    /// Treated and control counts in the sample.
    pub sample_treated: usize,
    pub sample_control: usize,
    pub ybar1: f64,
    pub ybar0: f64,
}

impl BayesModel {
    /// Standard deviations may be zero (a degenerate outcome distribution).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sigma1: f64,
        sigma0: f64,
        kappa: f64,
        treated: usize,
        control: usize,
        sample_treated: usize,
        sample_control: usize,
        ybar1: f64,
        ybar0: f64,
    ) -> Result<Self> {
        let m = Self {
            sigma1,
            sigma0,
            kappa,
            treated,
            control,
            sample_treated,
            sample_control,
            ybar1,
            ybar0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("sigma1", self.sigma1), ("sigma0", self.sigma0)] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::invalid(format!("{name} must be a finite nonnegative number")));
            }
        }
        if !(self.kappa.is_finite() && self.kappa.abs() <= 1.0) {
            return Err(Error::invalid("kappa must lie in [-1, 1]"));
        }
        if !(self.ybar1.is_finite() && self.ybar0.is_finite()) {
            return Err(Error::invalid("group means must be finite"));
        }
        if self.sample_treated == 0 || self.sample_control == 0 {
            return Err(Error::invalid("both sample groups must be nonempty"));
        }
        if self.sample_treated > self.treated || self.sample_control > self.control {
            return Err(Error::invalid(format!(
                "sample counts ({}, {}) exceed population counts ({}, {})",
                self.sample_treated, self.sample_control, self.treated, self.control
            )));
        }
        Ok(())
    }

    pub fn population_size(&self) -> usize {
        self.treated + self.control
    }

    pub fn sample_size(&self) -> usize {
        self.sample_treated + self.sample_control
    }

    fn difference(&self) -> f64 {
        self.ybar1 - self.ybar0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BayesEstimand {
    /// Mean effect in the superpopulation, `μ1 − μ0`.
    SuperCausal,
    /// Difference in population means by treatment status.
    DescriptiveN,
    /// Average effect over the `n` population units.
    CausalN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub estimand: BayesEstimand,
    pub mean: f64,
    pub variance: f64,
}

pub fn posterior_super_causal(m: &BayesModel) -> PosteriorSummary {
    let (f1, f0) = (m.sample_treated as f64, m.sample_control as f64);
    PosteriorSummary {
        estimand: BayesEstimand::SuperCausal,
        mean: m.difference(),
        variance: m.sigma1 * m.sigma1 / f1 + m.sigma0 * m.sigma0 / f0,
    }
}

pub fn posterior_descriptive_n(m: &BayesModel) -> PosteriorSummary {
    let (f1, f0) = (m.sample_treated as f64, m.sample_control as f64);
    let (p1, p0) = (m.treated as f64, m.control as f64);
    PosteriorSummary {
        estimand: BayesEstimand::DescriptiveN,
        mean: m.difference(),
        variance: m.sigma1 * m.sigma1 / f1 * (1.0 - f1 / p1) + m.sigma0 * m.sigma0 / f0 * (1.0 - f0 / p0),
    }
}

pub fn posterior_causal_n(m: &BayesModel) -> PosteriorSummary {
    let (s1, s0, k) = (m.sigma1, m.sigma0, m.kappa);
    let (f1, f0) = (m.sample_treated as f64, m.sample_control as f64);
    let n = m.population_size() as f64;
    let big_n = f1 + f0;
    let n2 = n * n;
    // Missing potential outcomes of sampled units, given the means.
    let imputation = (f0 * s1 * s1 + f1 * s0 * s0) * (1.0 - k * k) / n2;
    // Unsampled units contribute their whole effect.
    let unsampled = (n - big_n) * (s1 * s1 + s0 * s0 - 2.0 * k * s1 * s0) / n2;
    // Uncertainty about the means, shrunk by the observed share. Written
    // as (σ1 − (σ1 − κσ0)N1/n)² / N1 so a zero σ needs no division.
    let shrink1 = s1 - (s1 - k * s0) * f1 / n;
    let shrink0 = s0 - (s0 - k * s1) * f0 / n;
    PosteriorSummary {
        estimand: BayesEstimand::CausalN,
        mean: m.difference(),
        variance: imputation + unsampled + shrink1 * shrink1 / f1 + shrink0 * shrink0 / f0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(s1: f64, s0: f64, k: f64, n1: usize, n0: usize, b1: usize, b0: usize) -> BayesModel {
        BayesModel::new(s1, s0, k, n1, n0, b1, b0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn super_causal_example() {
        let p = posterior_super_causal(&model(1.0, 1.0, 0.0, 10, 10, 4, 4));
        assert_eq!((p.mean, p.variance), (2.0, 0.5));
        assert_eq!(posterior_super_causal(&model(0.0, 0.0, 0.0, 10, 10, 4, 4)).variance, 0.0);
        let big = posterior_super_causal(&model(1.0, 1.0, 0.0, 1 << 30, 1 << 30, 1 << 29, 1 << 29));
        assert!(big.variance < 1e-8);
    }

    #[test]
    fn descriptive_examples() {
        assert_eq!(posterior_descriptive_n(&model(1.0, 1.0, 0.3, 8, 8, 4, 4)).variance, 0.25);
        assert_eq!(posterior_descriptive_n(&model(2.0, 1.0, 0.3, 5, 7, 5, 7)).variance, 0.0);
        let m = model(1.3, 0.7, 0.0, 1 << 40, 1 << 40, 4, 4);
        let gap = posterior_super_causal(&m).variance - posterior_descriptive_n(&m).variance;
        assert!(gap.abs() < 1e-10);
    }

    #[test]
    fn causal_examples() {
        for n in [8usize, 9, 20, 1000] {
            let m = model(1.0, 1.0, 1.0, n / 2, n - n / 2, 4, 4);
            assert!((posterior_causal_n(&m).variance - 0.5).abs() < 1e-12);
        }
        // Census with uncorrelated outcomes.
        let m = model(1.0, 1.0, 0.0, 3, 5, 3, 5);
        let (f1, f0, n) = (3.0, 5.0, 8.0);
        let expected = (f0 + f1) / (n * n)
            + (1.0 / f1) * (1.0 - f1 / n) * (1.0 - f1 / n)
            + (1.0 / f0) * (1.0 - f0 / n) * (1.0 - f0 / n);
        assert!((posterior_causal_n(&m).variance - expected).abs() < 1e-15);
        let m = model(1.4, 0.6, -0.3, 500_000_000, 500_000_000, 4, 4);
        let gap = posterior_causal_n(&m).variance - posterior_super_causal(&m).variance;
        assert!(gap.abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(BayesModel::new(1.0, 1.0, 1.5, 4, 4, 2, 2, 0.0, 0.0).is_err());
        assert!(BayesModel::new(-1.0, 1.0, 0.0, 4, 4, 2, 2, 0.0, 0.0).is_err());
        assert!(BayesModel::new(1.0, 1.0, 0.0, 4, 4, 5, 2, 0.0, 0.0).is_err());
        assert!(BayesModel::new(1.0, 1.0, 0.0, 4, 4, 0, 2, 0.0, 0.0).is_err());
    }

    fn models() -> impl Strategy<Value = BayesModel> {
        (0.0..3.0f64, 0.0..3.0f64, -1.0..=1.0f64, 1usize..30, 1usize..30, 0usize..50, 0usize..50, -5.0..5.0f64, -5.0..5.0f64)
            .prop_map(|(s1, s0, k, b1, b0, e1, e0, y1, y0)| {
                BayesModel::new(s1, s0, k, b1 + e1, b0 + e0, b1, b0, y1, y0).unwrap()
            })
    }

    proptest! {
        #[test]
        fn common_mean_and_ordering(m in models()) {
            let (a, b, c) = (posterior_super_causal(&m), posterior_descriptive_n(&m), posterior_causal_n(&m));
            prop_assert_eq!(a.mean, b.mean);
            prop_assert_eq!(a.mean, c.mean);
            prop_assert!(b.variance <= a.variance + 1e-15);
            prop_assert!(b.variance >= -1e-15 && c.variance >= -1e-15);
        }

        #[test]
        fn constant_effects_special_case(s in 0.0..3.0f64, b1 in 1usize..30, b0 in 1usize..30, e1 in 0usize..50, e0 in 0usize..50) {
            let m = BayesModel::new(s, s, 1.0, b1 + e1, b0 + e0, b1, b0, 0.0, 0.0).unwrap();
            let gap = posterior_causal_n(&m).variance - posterior_super_causal(&m).variance;
            prop_assert!(gap.abs() <= 1e-12 * (1.0 + s * s));
        }

        #[test]
        fn descriptive_nonincreasing_in_sample(m in models()) {
            let v = posterior_descriptive_n(&m).variance;
            if m.sample_treated < m.treated {
                let mut up = m;
                up.sample_treated += 1;
                prop_assert!(posterior_descriptive_n(&up).variance <= v + 1e-15);
            }
            if m.sample_control < m.control {
                let mut up = m;
                up.sample_control += 1;
                prop_assert!(posterior_descriptive_n(&up).variance <= v + 1e-15);
            }
        }
    }
}
