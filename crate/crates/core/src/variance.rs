//! Variance formulas and estimators.
//!
//! The binary-cause functions give exact finite-population variances and
//! their decompositions. The general functions assemble the feasible
//! sandwich estimators from a least squares fit; reported standard errors
//! divide the sandwich by the sample size.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimands::{general_estimands, PopulationMoments};
use crate::linalg::{inverse, sandwich, symmetrize};
use crate::population::{AttributeMatrix, CauseDistributionSpec, PotentialOutcomes};
use crate::regression::{partial_out, FitResult};

/// Divisor `n − 1` variances of `Y(1)`, `Y(0)` and the unit effects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationDispersions {
    pub s2_1: f64,
    pub s2_0: f64,
    pub s2_theta: f64,
}

pub fn population_dispersions(y1: &[f64], y0: &[f64]) -> Result<PopulationDispersions> {
    if y1.len() != y0.len() {
        return Err(Error::dim("length mismatch: y1 and y0"));
    }
    if y1.len() < 2 {
        return Err(Error::invalid("dispersions need at least two units"));
    }
    let effects: Vec<f64> = y1.iter().zip(y0).map(|(a, b)| a - b).collect();
    Ok(PopulationDispersions {
        s2_1: sample_variance(y1),
        s2_0: sample_variance(y0),
        s2_theta: sample_variance(&effects),
    })
}

/// Two-pass variance with divisor `len − 1`.
pub(crate) fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryVarianceComponents {
    pub v_total: f64,
    pub v_sampling: f64,
    pub v_design_given_sampling: f64,
    pub v_design: f64,
    pub v_sampling_given_design: f64,
}

fn recip(size: Option<usize>) -> f64 {
    size.map_or(0.0, |s| 1.0 / s as f64)
}

/// Exact variance components conditional on the sample group sizes
/// `(N1, N0)`. `None` stands for an infinite population count.
pub fn binary_variance_components(
    d: &PopulationDispersions,
    big_n1: usize,
    big_n0: usize,
    n1: Option<usize>,
    n0: Option<usize>,
    n: Option<usize>,
) -> Result<BinaryVarianceComponents> {
    if big_n1 == 0 || big_n0 == 0 {
        return Err(Error::invalid("both sample groups must be nonempty"));
    }
    let order = |small: usize, big: Option<usize>, name: &str| match big {
        Some(b) if b < small => Err(Error::invalid(format!(
            "size ordering violated: {name} = {b} is below the sample count {small}"
        ))),
        _ => Ok(()),
    };
    order(big_n1, n1, "n1")?;
    order(big_n0, n0, "n0")?;
    order(big_n1 + big_n0, n, "n")?;
    if let (Some(a), Some(b), Some(t)) = (n1, n0, n) {
        if a + b != t {
            return Err(Error::invalid(format!("n1 + n0 = {} differs from n = {t}", a + b)));
        }
    }
    let (f1, f0) = (1.0 / big_n1 as f64, 1.0 / big_n0 as f64);
    let big_n = big_n1 + big_n0;
    let fn_ = 1.0 / big_n as f64;
    let inv_n = recip(n);
    let v_total = d.s2_1 * f1 + d.s2_0 * f0 - d.s2_theta * inv_n;
    let v_sampling =
        d.s2_1 * f1 * (1.0 - big_n1 as f64 * recip(n1)) + d.s2_0 * f0 * (1.0 - big_n0 as f64 * recip(n0));
    let v_design_given_sampling = d.s2_1 * recip(n1) + d.s2_0 * recip(n0) - d.s2_theta * inv_n;
    let v_design = d.s2_1 * f1 + d.s2_0 * f0 - d.s2_theta * fn_;
    let v_sampling_given_design = d.s2_theta * fn_ * (1.0 - big_n as f64 * inv_n);
    Ok(BinaryVarianceComponents {
        v_total,
        v_sampling,
        v_design_given_sampling,
        v_design,
        v_sampling_given_design,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryEhw {
    pub v_ehw_hat: f64,
    pub v_ehw_tilde: f64,
}

/// Robust variance estimates for the difference in sample means, from the
/// sampled units (`r`) split by treatment (`x`).
pub fn binary_ehw(y: &[f64], x: &[bool], r: &[bool]) -> Result<BinaryEhw> {
    if x.len() != y.len() || r.len() != y.len() {
        return Err(Error::dim("length mismatch: y, x and r"));
    }
    let group = |treated: bool| -> Vec<f64> {
        (0..y.len())
            .filter(|&i| r[i] && x[i] == treated)
            .map(|i| y[i])
            .collect()
    };
    let (g1, g0) = (group(true), group(false));
    if g1.len() < 2 || g0.len() < 2 {
        return Err(Error::Undefined {
            what: "binary EHW variance",
            reason: format!("group sizes N1 = {}, N0 = {} (need at least 2 each)", g1.len(), g0.len()),
        });
    }
    let (n1, n0) = (g1.len() as f64, g0.len() as f64);
    let (s1, s0) = (sample_variance(&g1), sample_variance(&g0));
    Ok(BinaryEhw {
        v_ehw_hat: (n1 - 1.0) / (n1 * n1) * s1 + (n0 - 1.0) / (n0 * n0) * s0,
        v_ehw_tilde: s1 / n1 + s0 / n0,
    })
}

/// Standard errors, one per cause coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardErrors {
    pub ehw: Vec<f64>,
    pub causal: Vec<f64>,
    pub causal_sample: Vec<f64>,
    pub descriptive: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralVarianceReport {
    pub sample_size: usize,
    pub rho_hat: f64,
    pub h_hat: DMatrix<f64>,
    pub delta_ehw_hat: DMatrix<f64>,
    pub g_hat: DMatrix<f64>,
    pub delta_z_hat: DMatrix<f64>,
    pub v_ehw: DMatrix<f64>,
    pub v_causal: DMatrix<f64>,
    pub v_causal_sample: DMatrix<f64>,
    pub v_descriptive: DMatrix<f64>,
    pub se: StandardErrors,
}

/// `A` with rows `X̂_i ε̂_i`.
fn score_rows(x: &DMatrix<f64>, e: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * e[i])
}

/// `(1/N) (A − Z Gᵀ)ᵀ (A − Z Gᵀ)` and `G`, with `G` the least squares
/// coefficient of the rows of `a` on `z`.
pub fn delta_z(a: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (resid, g) = partial_out(a, z)?;
    let n = a.nrows() as f64;
    Ok((symmetrize(&(resid.tr_mul(&resid) / n)), g))
}

pub fn general_variance(fit: &FitResult, n_population: Option<usize>) -> Result<GeneralVarianceReport> {
    let big_n = fit.len();
    let (k, q) = (fit.x_hat.ncols(), fit.attributes.ncols());
    if big_n < k + q + 1 {
        return Err(Error::invalid(format!(
            "{big_n} observations; variance estimation needs at least {}",
            k + q + 1
        )));
    }
    if fit.x_hat.nrows() != big_n || fit.attributes.nrows() != big_n {
        return Err(Error::dim("fit components differ in length"));
    }
    let rho_hat = match n_population {
        None => 0.0,
        Some(n) if n < big_n => {
            return Err(Error::invalid(format!(
                "population size {n} is below the sample size {big_n}"
            )))
        }
        Some(n) => big_n as f64 / n as f64,
    };
    let nf = big_n as f64;
    let h_hat = symmetrize(&(fit.x_hat.tr_mul(&fit.x_hat) / nf));
    let a = score_rows(&fit.x_hat, &fit.residuals);
    let delta_ehw_hat = symmetrize(&(a.tr_mul(&a) / nf));
    let (delta_z_hat, g_hat) = delta_z(&a, &fit.attributes)?;
    let h_inv = symmetrize(&inverse(&h_hat, "H")?);

    let v_ehw = sandwich(&h_inv, &delta_ehw_hat);
    let v_causal = sandwich(
        &h_inv,
        &(&delta_z_hat * rho_hat + &delta_ehw_hat * (1.0 - rho_hat)),
    );
    let v_causal_sample = sandwich(&h_inv, &delta_z_hat);
    let v_descriptive = &v_ehw * (1.0 - rho_hat);
    let se_of = |v: &DMatrix<f64>| -> Vec<f64> {
        (0..k).map(|j| (v[(j, j)].max(0.0) / nf).sqrt()).collect()
    };
    let se = StandardErrors {
        ehw: se_of(&v_ehw),
        causal: se_of(&v_causal),
        causal_sample: se_of(&v_causal_sample),
        descriptive: se_of(&v_descriptive),
    };
    Ok(GeneralVarianceReport {
        sample_size: big_n,
        rho_hat,
        h_hat,
        delta_ehw_hat,
        g_hat,
        delta_z_hat,
        v_ehw,
        v_causal,
        v_causal_sample,
        v_descriptive,
        se,
    })
}

/// Exact population counterparts of the estimated matrices, with residuals
/// taken relative to the causal estimands.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVarianceForms {
    pub theta_causal: Vec<f64>,
    pub gamma_causal: Vec<f64>,
    pub h: DMatrix<f64>,
    pub delta_ehw: DMatrix<f64>,
    pub delta_cond: DMatrix<f64>,
    /// `Δ^ehw − Δ^cond`.
    pub delta_mu: DMatrix<f64>,
}

/// Asymptotic variances of `√N(θ̂ − target)` at sampling fraction `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedVariances {
    pub causal: DMatrix<f64>,
    pub causal_sample: DMatrix<f64>,
    pub descriptive: DMatrix<f64>,
    pub ehw: DMatrix<f64>,
}

impl PopulationVarianceForms {
    pub fn predicted(&self, rho: f64) -> Result<PredictedVariances> {
        let h_inv = symmetrize(&inverse(&self.h, "H")?);
        let ehw = sandwich(&h_inv, &self.delta_ehw);
        Ok(PredictedVariances {
            causal: sandwich(&h_inv, &(&self.delta_cond * rho + &self.delta_ehw * (1.0 - rho))),
            causal_sample: sandwich(&h_inv, &self.delta_cond),
            descriptive: &ehw * (1.0 - rho),
            ehw,
        })
    }
}

/// Computes `H`, `Δ^ehw` and `Δ^cond` exactly from the per-unit cause laws.
pub fn population_variance_forms(
    outcomes: &PotentialOutcomes,
    attributes: &AttributeMatrix,
    laws: &CauseDistributionSpec,
) -> Result<PopulationVarianceForms> {
    let pm = PopulationMoments::new(outcomes, attributes, laws)?;
    let coef = general_estimands(&pm.omega())?;
    let k = outcomes.cause_dim();
    let z = attributes.matrix();
    let n = outcomes.len();
    let mut h = DMatrix::zeros(k, k);
    let mut delta_ehw = DMatrix::zeros(k, k);
    let mut delta_mu = DMatrix::zeros(k, k);
    for (i, law) in laws.laws().iter().enumerate() {
        let z_row: Vec<f64> = z.row(i).iter().copied().collect();
        let zg: f64 = z_row.iter().zip(&coef.gamma).map(|(a, b)| a * b).sum();
        let mut mean_score = DMatrix::zeros(k, 1);
        for (u, p) in law.atoms() {
            if p == 0.0 {
                continue;
            }
            let x = DMatrix::from_vec(k, 1, pm.transform().apply_row(&u, &z_row));
            let y = outcomes.outcome(i, &u)?;
            let e = y - x.iter().zip(&coef.theta).map(|(a, b)| a * b).sum::<f64>() - zg;
            let xxt = &x * x.transpose();
            h += &xxt * p;
            delta_ehw += &xxt * (p * e * e);
            mean_score += &x * (p * e);
        }
        delta_mu += &mean_score * mean_score.transpose();
    }
    let nf = n as f64;
    let h = symmetrize(&(h / nf));
    let delta_ehw = symmetrize(&(delta_ehw / nf));
    let delta_mu = symmetrize(&(delta_mu / nf));
    Ok(PopulationVarianceForms {
        theta_causal: coef.theta,
        gamma_causal: coef.gamma,
        delta_cond: &delta_ehw - &delta_mu,
        h,
        delta_ehw,
        delta_mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;
    use crate::population::LinearPotentialOutcomes;
    use crate::regression::{fit_ols, SampleData};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    const Y1: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
    const Y0: [f64; 4] = [0.0, 0.0, 0.0, 2.0];

    #[test]
    fn dispersions_worked_example() {
        let d = population_dispersions(&Y1, &Y0).unwrap();
        assert_relative_eq!(d.s2_1, 5.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(d.s2_0, 1.0, max_relative = 1e-15);
        assert_relative_eq!(d.s2_theta, 2.0 / 3.0, max_relative = 1e-15);
        let c = population_dispersions(&[3.0, 4.0, 8.0], &[1.0, 2.0, 6.0]).unwrap();
        assert_eq!(c.s2_theta, 0.0);
        assert!(population_dispersions(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn components_worked_example() {
        let d = population_dispersions(&Y1, &Y0).unwrap();
        let v = binary_variance_components(&d, 1, 1, Some(2), Some(2), Some(4)).unwrap();
        assert_relative_eq!(v.v_total, 2.5, max_relative = 1e-14);
        assert_relative_eq!(v.v_sampling, 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(v.v_design_given_sampling, 7.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(v.v_design, 7.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(v.v_sampling_given_design, 1.0 / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn infinite_population_and_census_limits() {
        let d = population_dispersions(&Y1, &Y0).unwrap();
        let v = binary_variance_components(&d, 3, 5, None, None, None).unwrap();
        assert_relative_eq!(v.v_sampling, d.s2_1 / 3.0 + d.s2_0 / 5.0, max_relative = 1e-15);
        assert_relative_eq!(v.v_sampling, v.v_total, max_relative = 1e-15);
        let v = binary_variance_components(&d, 2, 2, Some(2), Some(2), Some(4)).unwrap();
        assert_eq!(v.v_sampling, 0.0);
    }

    #[test]
    fn size_ordering_errors() {
        let d = population_dispersions(&Y1, &Y0).unwrap();
        assert!(binary_variance_components(&d, 3, 1, Some(2), Some(2), Some(4)).is_err());
        assert!(binary_variance_components(&d, 0, 1, None, None, None).is_err());
        assert!(binary_variance_components(&d, 2, 2, Some(3), Some(3), Some(5)).is_err());
    }

    #[test]
    fn binary_ehw_worked_example() {
        let e = binary_ehw(
            &[1.0, 2.0, 0.0, 2.0],
            &[true, true, false, false],
            &[true; 4],
        )
        .unwrap();
        assert_relative_eq!(e.v_ehw_tilde, 1.25, max_relative = 1e-15);
        assert_relative_eq!(e.v_ehw_hat, 0.625, max_relative = 1e-15);
        let c = binary_ehw(&[1.0, 1.0, 4.0, 4.0], &[true, true, false, false], &[true; 4]).unwrap();
        assert_eq!((c.v_ehw_hat, c.v_ehw_tilde), (0.0, 0.0));
        assert!(binary_ehw(&[1.0, 2.0, 3.0], &[true, false, false], &[true; 3]).is_err());
    }

    fn random_fit(seed: u64, n: usize, q: usize, n_population: Option<usize>) -> FitResult {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let z = DMatrix::from_fn(n, q, |_, j| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) });
        let u = DMatrix::from_fn(n, 2, |i, j| z[(i, q - 1)] * (j as f64 + 0.5) + rng.random_range(-1.0..1.0));
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let het = 1.0 + z[(i, q - 1)].abs();
                u[(i, 0)] * (1.0 + z[(i, q - 1)]) - 0.5 * u[(i, 1)] + het * rng.random_range(-1.0..1.0)
            })
            .collect();
        fit_ols(&SampleData::new(y, u, z, n_population).unwrap()).unwrap()
    }

    #[test]
    fn intercept_only_gives_equal_middles() {
        let fit = random_fit(3, 50, 1, Some(80));
        let r = general_variance(&fit, Some(80)).unwrap();
        assert!(r.g_hat.iter().all(|v| v.abs() < 1e-12));
        assert_abs_diff_eq!(r.delta_z_hat, r.delta_ehw_hat, epsilon = 1e-12);
    }

    #[test]
    fn rho_limits() {
        let fit = random_fit(4, 40, 3, None);
        let r = general_variance(&fit, None).unwrap();
        assert_eq!(r.rho_hat, 0.0);
        assert_eq!(r.v_causal, r.v_ehw);
        assert_eq!(r.v_descriptive, r.v_ehw);
        let r = general_variance(&fit, Some(40)).unwrap();
        assert!(r.v_descriptive.iter().all(|v| *v == 0.0));
        assert_abs_diff_eq!(r.v_causal, r.v_causal_sample, epsilon = 1e-14);
        assert!(general_variance(&fit, Some(39)).is_err());
    }

    #[test]
    fn matches_full_hc0_sandwich() {
        let fit = random_fit(5, 20, 3, None);
        let n = fit.len();
        let u = &fit.x_hat + &fit.attributes * fit.lambda_hat.transpose();
        let mut d = DMatrix::zeros(n, 5);
        d.columns_mut(0, 2).copy_from(&u);
        d.columns_mut(2, 3).copy_from(&fit.attributes);
        let bread = (d.transpose() * &d).try_inverse().unwrap();
        let mut meat = DMatrix::zeros(5, 5);
        for i in 0..n {
            let row = d.row(i).transpose();
            meat += &row * row.transpose() * fit.residuals[i].powi(2);
        }
        let hc0 = &bread * meat * &bread;
        let r = general_variance(&fit, None).unwrap();
        let slope = hc0.view((0, 0), (2, 2)) * n as f64;
        for (a, b) in slope.iter().zip(r.v_ehw.iter()) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn population_forms_constant_effects_have_no_mean_score() {
        let n = 12;
        let z = AttributeMatrix::from_rows(
            &(0..n).map(|i| vec![1.0, i as f64 / n as f64]).collect::<Vec<_>>(),
        )
        .unwrap();
        let p: Vec<f64> = (0..n).map(|i| 0.2 + 0.6 * i as f64 / n as f64).collect();
        let xi: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64).collect();
        let po = PotentialOutcomes::Linear(LinearPotentialOutcomes::constant_effects(vec![2.0], xi).unwrap());
        let f = population_variance_forms(&po, &z, &CauseDistributionSpec::bernoulli(&p).unwrap()).unwrap();
        assert_abs_diff_eq!(f.theta_causal[0], 2.0, epsilon = 1e-12);
        assert!(f.delta_mu.iter().all(|v| v.abs() < 1e-12));
        let pred = f.predicted(0.3).unwrap();
        assert_abs_diff_eq!(pred.causal, pred.ehw, epsilon = 1e-10);
    }

    fn dispersions_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..12).prop_flat_map(|n| {
            (
                prop::collection::vec(-5.0..5.0f64, n),
                prop::collection::vec(-5.0..5.0f64, n),
            )
        })
    }

    proptest! {
        #[test]
        fn decompositions_hold((y1, y0) in dispersions_strategy(), a in 1usize..6, b in 1usize..6, e1 in 0usize..5, e0 in 0usize..5) {
            let d = population_dispersions(&y1, &y0).unwrap();
            let (n1, n0) = (a + e1, b + e0);
            let v = binary_variance_components(&d, a, b, Some(n1), Some(n0), Some(n1 + n0)).unwrap();
            let scale = v.v_total.abs().max(1e-300);
            prop_assert!((v.v_total - v.v_sampling - v.v_design_given_sampling).abs() <= 1e-12 * scale.max(1.0));
            prop_assert!((v.v_total - v.v_design - v.v_sampling_given_design).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn ehw_limit_exceeds_total((y1, y0) in dispersions_strategy(), a in 1usize..6, b in 1usize..6) {
            let d = population_dispersions(&y1, &y0).unwrap();
            let n = y1.len();
            let inf = binary_variance_components(&d, a, b, None, None, None).unwrap();
            let fin = binary_variance_components(&d, a, b, None, None, Some(n.max(a + b))).unwrap();
            let gap = inf.v_total - fin.v_total;
            prop_assert!(gap >= 0.0);
            prop_assert!((gap - d.s2_theta / n.max(a + b) as f64).abs() <= 1e-12 * (1.0 + inf.v_total));
        }

        #[test]
        fn constant_effects_close_the_gap(y0 in prop::collection::vec(-5.0..5.0f64, 2..10), t in -3.0..3.0f64) {
            let y1: Vec<f64> = y0.iter().map(|v| v + t).collect();
            let d = population_dispersions(&y1, &y0).unwrap();
            prop_assert!(d.s2_theta < 1e-24);
        }

        #[test]
        fn tilde_dominates_hat(y in prop::collection::vec(-5.0..5.0f64, 4..15), flip in 0usize..100) {
            let n = y.len();
            let x: Vec<bool> = (0..n).map(|i| (i + flip) % 2 == 0).collect();
            let e = binary_ehw(&y, &x, &vec![true; n]).unwrap();
            prop_assert!(e.v_ehw_tilde >= e.v_ehw_hat);
        }

        #[test]
        fn matrix_orderings(seed in 0u64..1000, rho_pop in 0usize..3) {
            let n = 60;
            let pop = [None, Some(75), Some(60)][rho_pop];
            let fit = random_fit(seed, n, 3, pop);
            let r = general_variance(&fit, pop).unwrap();
            let tol = 1e-9 * r.delta_ehw_hat.trace();
            prop_assert!(min_eigenvalue(&(&r.delta_ehw_hat - &r.delta_z_hat)) >= -tol);
            prop_assert!(min_eigenvalue(&r.delta_z_hat) >= -tol);
            let vt = 1e-9 * r.v_ehw.trace();
            prop_assert!(min_eigenvalue(&(&r.v_causal - &r.v_descriptive)) >= -vt);
            prop_assert!(min_eigenvalue(&(&r.v_ehw - &r.v_causal)) >= -vt);
            for m in [&r.v_ehw, &r.v_causal, &r.v_causal_sample, &r.v_descriptive, &r.delta_z_hat] {
                prop_assert!((m - m.transpose()).iter().all(|v| v.abs() <= 1e-10 * (1.0 + m.amax())));
            }
        }

        #[test]
        fn extra_attribute_never_raises_delta_z(seed in 0u64..1000) {
            let fit = random_fit(seed, 40, 3, None);
            let a = score_rows(&fit.x_hat, &fit.residuals);
            let z_small = fit.attributes.columns(0, 2).into_owned();
            let (small, _) = delta_z(&a, &z_small).unwrap();
            let (big, _) = delta_z(&a, &fit.attributes).unwrap();
            prop_assert!(big.trace() <= small.trace() + 1e-12 * (1.0 + small.trace()));
        }
    }
}
