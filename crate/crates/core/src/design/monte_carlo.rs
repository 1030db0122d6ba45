//! Seeded Monte Carlo over a population and design.
//!
//! Replications are grouped in fixed blocks. Each block runs its
//! replications in order, blocks may run in parallel, and block results
//! are merged along a tree whose shape depends only on the block count.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::design::draw::draw;
use crate::design::moments::Moments;
use crate::design::rng::stream;
use crate::error::{Error, Result};
use crate::estimands::{general_estimands, MomentKind, MomentMatrices, PopulationMoments};
use crate::linalg::tree_reduce;
use crate::par::map_indexed;
use crate::population::{realize_outcomes, AssignmentDesign, Design, FinitePopulation, UnitLaw};
use crate::regression::{fit_ols, SampleData};
use crate::variance::{general_variance, GeneralVarianceReport};

const BLOCK: u64 = 256;
/// Relative tolerance for a zero-width interval to count as covering.
const DEGENERATE_TOLERANCE: f64 = 1e-9;

const TARGETS: usize = 3;
const ESTIMATORS: usize = 4;

/// One value per variance estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerEstimator {
    pub ehw: f64,
    pub causal: f64,
    pub causal_sample: f64,
    pub descriptive: f64,
}

impl PerEstimator {
    fn from_slice(v: &[f64]) -> Self {
        Self {
            ehw: v[0],
            causal: v[1],
            causal_sample: v[2],
            descriptive: v[3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub variance: f64,
    /// Monte Carlo standard error of `variance`.
    pub variance_se: f64,
}

impl From<&Moments> for DistributionSummary {
    fn from(m: &Moments) -> Self {
        Self {
            mean: m.mean,
            variance: m.sample_variance(),
            variance_se: m.variance_standard_error(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetReport {
    pub mean_target: f64,
    /// Distribution of `θ̂ − target`.
    pub error: DistributionSummary,
    pub coverage: PerEstimator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientReport {
    pub index: usize,
    pub theta_hat: DistributionSummary,
    pub descriptive: TargetReport,
    pub causal_sample: TargetReport,
    pub causal: TargetReport,
    /// Mean squared standard error for each estimator.
    pub mean_variance_estimate: PerEstimator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub reps: u64,
    pub seed: u64,
    pub ci_level: f64,
    pub used: u64,
    pub skipped: u64,
    pub mean_inverse_sample_size: f64,
    pub coefficients: Vec<CoefficientReport>,
}

#[derive(Debug, Clone)]
struct Acc {
    used: u64,
    skipped: u64,
    inv_n: f64,
    theta: Vec<Moments>,
    target: Vec<Moments>,
    error: Vec<Moments>,
    covered: Vec<u64>,
    var_est: Vec<f64>,
}

impl Acc {
    fn new(k: usize) -> Self {
        Self {
            used: 0,
            skipped: 0,
            inv_n: 0.0,
            theta: vec![Moments::default(); k],
            target: vec![Moments::default(); TARGETS * k],
            error: vec![Moments::default(); TARGETS * k],
            covered: vec![0; TARGETS * ESTIMATORS * k],
            var_est: vec![0.0; ESTIMATORS * k],
        }
    }

    fn merge(&self, o: &Self) -> Self {
        let m = |a: &[Moments], b: &[Moments]| a.iter().zip(b).map(|(x, y)| x.merge(y)).collect();
        Self {
            used: self.used + o.used,
            skipped: self.skipped + o.skipped,
            inv_n: self.inv_n + o.inv_n,
            theta: m(&self.theta, &o.theta),
            target: m(&self.target, &o.target),
            error: m(&self.error, &o.error),
            covered: self.covered.iter().zip(&o.covered).map(|(a, b)| a + b).collect(),
            var_est: self.var_est.iter().zip(&o.var_est).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Per-replication result for draws that were not skipped.
struct Replication {
    sample_size: usize,
    theta_hat: Vec<f64>,
    /// descriptive, causal-sample, causal.
    targets: [Vec<f64>; TARGETS],
    variance: GeneralVarianceReport,
}

struct Setup<'a> {
    pop: &'a FinitePopulation,
    design: &'a Design,
    moments: PopulationMoments,
    causal: Vec<f64>,
    binary_causes: bool,
}

impl Setup<'_> {
    /// `Ok(None)` marks a degenerate draw.
    fn replicate(&self, seed: u64, rep: u64) -> Result<Option<Replication>> {
        let mut rng = stream(seed, rep);
        let d = draw(self.pop, self.design, &mut rng)?;
        let n = self.pop.len();
        let y = realize_outcomes(self.pop.outcomes(), &d.causes)?;
        let idx: Vec<usize> = (0..n).filter(|&i| d.r[i]).collect();
        let big_n = idx.len();
        let k = d.causes.ncols();
        if self.binary_causes {
            let treated = idx.iter().filter(|&&i| d.causes[(i, 0)] == 1.0).count();
            if treated < 2 || big_n - treated < 2 {
                return Ok(None);
            }
        }
        let z = self.pop.attributes().matrix();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let us = DMatrix::from_fn(big_n, k, |a, j| d.causes[(idx[a], j)]);
        let zs = DMatrix::from_fn(big_n, z.ncols(), |a, j| z[(idx[a], j)]);
        let outcome = (|| -> Result<Replication> {
            let data = SampleData::new(ys, us, zs, Some(n))?;
            let fit = fit_ols(&data)?;
            let variance = general_variance(&fit, Some(n))?;
            let w = MomentMatrices::realized(MomentKind::W, &y, &d.causes, z, None)?;
            let descriptive = general_estimands(&w)?.theta;
            let causal_sample = general_estimands(&self.moments.omega_tilde(&d.r)?)?.theta;
            Ok(Replication {
                sample_size: big_n,
                theta_hat: fit.theta_hat,
                targets: [descriptive, causal_sample, self.causal.clone()],
                variance,
            })
        })();
        match outcome {
            Ok(r) => Ok(Some(r)),
            Err(e) if e.is_singular() || matches!(e, Error::InvalidInput(_) | Error::Undefined { .. }) => {
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

pub fn monte_carlo(
    pop: &FinitePopulation,
    design: &Design,
    reps: u64,
    seed: u64,
    ci_level: f64,
) -> Result<MonteCarloReport> {
    if reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::invalid(format!("ci level {ci_level} must lie in (0, 1)")));
    }
    pop.validate_design(design)?;
    let laws = pop.marginal_laws(&design.assignment)?;
    let moments = PopulationMoments::new(pop.outcomes(), pop.attributes(), &laws)?;
    let causal = general_estimands(&moments.omega())?.theta;
    let binary_causes = matches!(design.assignment, AssignmentDesign::CompleteRandomization { .. })
        || laws.laws().iter().all(|l| matches!(l, UnitLaw::Bernoulli(_)));
    let setup = Setup {
        pop,
        design,
        moments,
        causal,
        binary_causes,
    };
    let k = pop.cause_dim();
    let z = Normal::standard()
        .inverse_cdf(0.5 + ci_level / 2.0);

    let blocks = reps.div_ceil(BLOCK) as usize;
    let results = map_indexed(blocks, |b| -> Result<Acc> {
        let mut acc = Acc::new(k);
        let start = b as u64 * BLOCK;
        for rep in start..(start + BLOCK).min(reps) {
            let Some(r) = setup.replicate(seed, rep)? else {
                acc.skipped += 1;
                continue;
            };
            acc.used += 1;
            let nf = r.sample_size as f64;
            acc.inv_n += 1.0 / nf;
            let se = &r.variance.se;
            let ses = [&se.ehw, &se.causal, &se.causal_sample, &se.descriptive];
            for j in 0..k {
                let th = r.theta_hat[j];
                acc.theta[j].push(th, 1.0);
                for (e, s) in ses.iter().enumerate() {
                    acc.var_est[e * k + j] += s[j] * s[j];
                }
                for (t, target) in r.targets.iter().enumerate() {
                    let tv = target[j];
                    let diff = (th - tv).abs();
                    acc.target[t * k + j].push(tv, 1.0);
                    acc.error[t * k + j].push(th - tv, 1.0);
                    for (e, s) in ses.iter().enumerate() {
                        let covered = if s[j] > 0.0 {
                            diff <= z * s[j]
                        } else {
                            diff <= DEGENERATE_TOLERANCE * tv.abs().max(1.0)
                        };
                        acc.covered[(t * ESTIMATORS + e) * k + j] += u64::from(covered);
                    }
                }
            }
        }
        Ok(acc)
    });
    let results: Vec<Acc> = results.into_iter().collect::<Result<_>>()?;
    let acc = tree_reduce(&results, &|a: &Acc, b: &Acc| a.merge(b)).expect("reps >= 1");
    if acc.used == 0 {
        return Err(Error::AllDegenerate { reps });
    }
    let used = acc.used as f64;
    let coefficients = (0..k)
        .map(|j| {
            let target = |t: usize| {
                let cov: Vec<f64> = (0..ESTIMATORS)
                    .map(|e| acc.covered[(t * ESTIMATORS + e) * k + j] as f64 / used)
                    .collect();
                TargetReport {
                    mean_target: acc.target[t * k + j].mean,
                    error: DistributionSummary::from(&acc.error[t * k + j]),
                    coverage: PerEstimator::from_slice(&cov),
                }
            };
            let var_est: Vec<f64> = (0..ESTIMATORS).map(|e| acc.var_est[e * k + j] / used).collect();
            CoefficientReport {
                index: j,
                theta_hat: DistributionSummary::from(&acc.theta[j]),
                descriptive: target(0),
                causal_sample: target(1),
                causal: target(2),
                mean_variance_estimate: PerEstimator::from_slice(&var_est),
            }
        })
        .collect();
    Ok(MonteCarloReport {
        reps,
        seed,
        ci_level,
        used: acc.used,
        skipped: acc.skipped,
        mean_inverse_sample_size: acc.inv_n / used,
        coefficients,
    })
}
