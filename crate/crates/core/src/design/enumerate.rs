//! Exact moments of the difference-in-means estimator by enumerating every
//! (sample, assignment) pair under SRS plus complete randomization.
//!
//! Subsets are `u64` bitmasks visited in colexicographic order: a chunk
//! starts by unranking its first rank and then steps with Gosper's
//! successor. Chunks are reduced in a fixed tree, so the report does not
//! depend on the number of worker threads.

use serde::Serialize;

use crate::design::moments::Moments;
use crate::error::{Error, Result};
use crate::linalg::tree_reduce;
use crate::par::map_indexed;
use crate::population::{
    AssignmentDesign, BinaryPotentialOutcomes, Design, FinitePopulation, PotentialOutcomes, SamplingDesign,
};
use crate::variance::{binary_variance_components, population_dispersions, BinaryVarianceComponents, PopulationDispersions};

/// Upper bound on the number of (sample, assignment) pairs visited.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

const MAX_UNITS: usize = 63;
const OUTER_CHUNK: u64 = 16;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// The subset of size `k` with colex rank `rank`.
fn unrank_colex(mut rank: u64, k: usize) -> u64 {
    let mut mask = 0u64;
    for i in (1..=k).rev() {
        let mut c = i - 1;
        while binomial(c + 1, i) <= u128::from(rank) {
            c += 1;
        }
        mask |= 1 << c;
        rank -= binomial(c, i) as u64;
    }
    mask
}

/// Next subset of the same size in colex order.
fn next_colex(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let c = x & x.wrapping_neg();
    let r = x.wrapping_add(c);
    (((r ^ x) >> 2) / c) | r
}

/// Iterates the subsets with ranks `start..end`.
fn subsets(start: u64, end: u64, k: usize) -> impl Iterator<Item = u64> {
    let first = unrank_colex(start, k);
    (start..end).scan(first, |cur, _| {
        let out = *cur;
        *cur = next_colex(*cur);
        Some(out)
    })
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn mean_over(values: &[f64], mask: u64) -> f64 {
    let mut s = 0.0;
    let mut c = 0usize;
    for i in bits(mask) {
        s += values[i];
        c += 1;
    }
    s / c as f64
}

fn var_over(values: &[f64], mask: u64, mean: f64) -> f64 {
    let mut s = 0.0;
    let mut c = 0usize;
    for i in bits(mask) {
        let d = values[i] - mean;
        s += d * d;
        c += 1;
    }
    s / (c as f64 - 1.0)
}

#[derive(Debug, Clone, Default)]
struct CellAcc {
    pairs: u64,
    theta: Moments,
    within: f64,
    target: Moments,
    max_dev: f64,
    ehw_hat: f64,
    ehw_tilde: f64,
}

impl CellAcc {
    fn merge(&self, o: &Self) -> Self {
        Self {
            pairs: self.pairs + o.pairs,
            theta: self.theta.merge(&o.theta),
            within: self.within + o.within,
            target: self.target.merge(&o.target),
            max_dev: self.max_dev.max(o.max_dev),
            ehw_hat: self.ehw_hat + o.ehw_hat,
            ehw_tilde: self.ehw_tilde + o.ehw_tilde,
        }
    }
}

fn merge_cells(a: &Vec<CellAcc>, b: &Vec<CellAcc>) -> Vec<CellAcc> {
    a.iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

/// Summary for one `(N1, N0)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub sample_treated: usize,
    pub sample_control: usize,
    pub pairs: u64,
    pub probability: f64,
    /// Cells with an empty group; the estimator is undefined there.
    pub excluded: bool,
    pub mean_theta_hat: Option<f64>,
    pub var_theta_hat: Option<f64>,
    /// `E[var(θ̂ | x)]` within the cell.
    pub expected_var_given_assignment: Option<f64>,
    pub var_theta_descriptive: Option<f64>,
    /// `E[var(θ̂ | r)]` within the cell.
    pub expected_var_given_sample: Option<f64>,
    pub var_theta_causal_sample: Option<f64>,
    /// `max_x |E[θ̂ | x] − θ^descr(x)|`.
    pub max_bias_descriptive: Option<f64>,
    /// `max_r |E[θ̂ | r] − θ^causal,sample(r)|`.
    pub max_bias_causal_sample: Option<f64>,
    pub mean_v_ehw_hat: Option<f64>,
    pub mean_v_ehw_tilde: Option<f64>,
    pub formula: Option<BinaryVarianceComponents>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationReport {
    pub population_size: usize,
    pub sample_size: usize,
    pub treated: usize,
    pub total_pairs: u64,
    pub causal: f64,
    pub dispersions: PopulationDispersions,
    /// Probability of the cells where both groups are nonempty.
    pub included_probability: f64,
    /// Moments of θ̂ renormalized to the included cells.
    pub mean_theta_hat: f64,
    pub var_theta_hat: f64,
    pub cells: Vec<CellReport>,
}

impl EnumerationReport {
    pub fn cell(&self, sample_treated: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.sample_treated == sample_treated)
    }
}

/// Enumerates a population under its design; requires SRS, complete
/// randomization, binary outcomes and intercept-only attributes.
pub fn enumerate_exact(pop: &FinitePopulation, design: &Design) -> Result<EnumerationReport> {
    pop.validate_design(design)?;
    let (SamplingDesign::Srs { size }, AssignmentDesign::CompleteRandomization { treated }) =
        (design.sampling, design.assignment)
    else {
        return Err(Error::invalid(
            "exact enumeration needs SRS sampling and complete randomization",
        ));
    };
    let PotentialOutcomes::Binary(outcomes) = pop.outcomes() else {
        return Err(Error::invalid("exact enumeration needs binary potential outcomes"));
    };
    if pop.attributes().ncols() != 1 {
        return Err(Error::invalid(
            "exact enumeration covers the difference in means (intercept-only attributes)",
        ));
    }
    enumerate_binary(outcomes, size, treated)
}

pub fn enumerate_binary(
    outcomes: &BinaryPotentialOutcomes,
    sample_size: usize,
    treated: usize,
) -> Result<EnumerationReport> {
    let n = outcomes.len();
    if n > MAX_UNITS {
        return Err(Error::invalid(format!("enumeration supports at most {MAX_UNITS} units")));
    }
    if sample_size < 2 || sample_size > n {
        return Err(Error::invalid(format!("sample size {sample_size} must lie in 2..={n}")));
    }
    if treated == 0 || treated >= n {
        return Err(Error::invalid(format!("treated count {treated} must lie in 1..{n}")));
    }
    let n_r = binomial(n, sample_size);
    let n_x = binomial(n, treated);
    let pairs = n_r * n_x;
    if pairs > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            pairs,
            limit: ENUMERATION_BUDGET,
        });
    }
    let (n_r, n_x) = (n_r as u64, n_x as u64);
    let y1 = outcomes.y1();
    let y0 = outcomes.y0();
    let effects = outcomes.effects();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let cells = sample_size + 1;

    // θ̂ and the EHW estimates for one pair, or None if a group is empty.
    let evaluate = |r: u64, x: u64| -> (usize, Option<(f64, Option<(f64, f64)>)>) {
        let t = r & x;
        let c = r & !x & full;
        let (n1, n0) = (t.count_ones() as usize, c.count_ones() as usize);
        if n1 == 0 || n0 == 0 {
            return (n1, None);
        }
        let (m1, m0) = (mean_over(y1, t), mean_over(y0, c));
        let ehw = (n1 >= 2 && n0 >= 2).then(|| {
            let (s1, s0) = (var_over(y1, t, m1), var_over(y0, c, m0));
            let (f1, f0) = (n1 as f64, n0 as f64);
            ((f1 - 1.0) / (f1 * f1) * s1 + (f0 - 1.0) / (f0 * f0) * s0, s1 / f1 + s0 / f0)
        });
        (n1, Some((m1 - m0, ehw)))
    };

    // Outer loop over assignments: conditional on x.
    let chunks_x = n_x.div_ceil(OUTER_CHUNK) as usize;
    let by_x = map_indexed(chunks_x, |chunk| {
        let start = chunk as u64 * OUTER_CHUNK;
        let end = (start + OUTER_CHUNK).min(n_x);
        let mut acc = vec![CellAcc::default(); cells];
        for x in subsets(start, end, treated) {
            let descr = mean_over(y1, x) - mean_over(y0, !x & full);
            let mut local = vec![Moments::default(); cells];
            for r in subsets(0, n_r, sample_size) {
                let (cell, value) = evaluate(r, x);
                acc[cell].pairs += 1;
                if let Some((theta, ehw)) = value {
                    local[cell].push(theta, 1.0);
                    if let Some((h, t)) = ehw {
                        acc[cell].ehw_hat += h;
                        acc[cell].ehw_tilde += t;
                    }
                }
            }
            for (a, m) in acc.iter_mut().zip(&local) {
                if m.weight > 0.0 {
                    a.theta = a.theta.merge(m);
                    a.within += m.population_variance() * m.weight;
                    a.target.push(descr, m.weight);
                    a.max_dev = a.max_dev.max((m.mean - descr).abs());
                }
            }
        }
        acc
    });
    let by_x = tree_reduce(&by_x, &merge_cells).expect("at least one assignment");

    // Outer loop over samples: conditional on r.
    let chunks_r = n_r.div_ceil(OUTER_CHUNK) as usize;
    let by_r = map_indexed(chunks_r, |chunk| {
        let start = chunk as u64 * OUTER_CHUNK;
        let end = (start + OUTER_CHUNK).min(n_r);
        let mut acc = vec![CellAcc::default(); cells];
        for r in subsets(start, end, sample_size) {
            let cs = mean_over(&effects, r);
            let mut local = vec![Moments::default(); cells];
            for x in subsets(0, n_x, treated) {
                if let (cell, Some((theta, _))) = evaluate(r, x) {
                    local[cell].push(theta, 1.0);
                }
            }
            for (a, m) in acc.iter_mut().zip(&local) {
                if m.weight > 0.0 {
                    a.within += m.population_variance() * m.weight;
                    a.target.push(cs, m.weight);
                    a.max_dev = a.max_dev.max((m.mean - cs).abs());
                }
            }
        }
        acc
    });
    let by_r = tree_reduce(&by_r, &merge_cells).expect("at least one sample");

    let dispersions = population_dispersions(y1, y0)?;
    let total = n_r * n_x;
    let mut overall = Moments::default();
    let mut included = 0u64;
    let mut reports = Vec::with_capacity(cells);
    for cell in 0..cells {
        let (a, b) = (&by_x[cell], &by_r[cell]);
        let (n1, n0) = (cell, sample_size - cell);
        let excluded = n1 == 0 || n0 == 0;
        let defined = !excluded && a.pairs > 0;
        if defined {
            overall = overall.merge(&a.theta);
            included += a.pairs;
        }
        let w = a.pairs as f64;
        let when = |v: f64| defined.then_some(v);
        let ehw = n1 >= 2 && n0 >= 2 && a.pairs > 0;
        reports.push(CellReport {
            sample_treated: n1,
            sample_control: n0,
            pairs: a.pairs,
            probability: a.pairs as f64 / total as f64,
            excluded,
            mean_theta_hat: when(a.theta.mean),
            var_theta_hat: when(a.theta.population_variance()),
            expected_var_given_assignment: when(a.within / w),
            var_theta_descriptive: when(a.target.population_variance()),
            expected_var_given_sample: when(b.within / w),
            var_theta_causal_sample: when(b.target.population_variance()),
            max_bias_descriptive: when(a.max_dev),
            max_bias_causal_sample: when(b.max_dev),
            mean_v_ehw_hat: ehw.then(|| a.ehw_hat / w),
            mean_v_ehw_tilde: ehw.then(|| a.ehw_tilde / w),
            formula: if defined {
                Some(binary_variance_components(
                    &dispersions,
                    n1,
                    n0,
                    Some(treated),
                    Some(n - treated),
                    Some(n),
                )?)
            } else {
                None
            },
        });
    }
    if included == 0 {
        return Err(Error::Undefined {
            what: "enumeration moments",
            reason: "every (sample, assignment) pair leaves a group empty".into(),
        });
    }
    Ok(EnumerationReport {
        population_size: n,
        sample_size,
        treated,
        total_pairs: total,
        causal: effects.iter().sum::<f64>() / n as f64,
        dispersions,
        included_probability: included as f64 / total as f64,
        mean_theta_hat: overall.mean,
        var_theta_hat: overall.population_variance(),
        cells: reports,
    })
}
