//! One draw of the sample indicators and the causes.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;

use crate::error::Result;
use crate::population::{AssignmentDesign, CauseDistributionSpec, Design, FinitePopulation, SamplingDesign, UnitLaw};

#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    /// Sample inclusion.
    pub r: Vec<bool>,
    /// n×k realized causes.
    pub causes: DMatrix<f64>,
}

impl Draw {
    pub fn sample_size(&self) -> usize {
        self.r.iter().filter(|&&b| b).count()
    }
}

pub fn draw_sample<R: Rng + ?Sized>(sampling: &SamplingDesign, n: usize, rng: &mut R) -> Vec<bool> {
    match *sampling {
        SamplingDesign::Srs { size } => {
            let mut r = vec![false; n];
            for i in index::sample(rng, n, size.min(n)) {
                r[i] = true;
            }
            r
        }
        SamplingDesign::Bernoulli { rate } => (0..n).map(|_| rng.random::<f64>() < rate).collect(),
    }
}

/// Draws the causes under `assignment`. `laws` is only read for
/// independent assignment.
pub fn draw_causes<R: Rng + ?Sized>(
    assignment: &AssignmentDesign,
    laws: Option<&CauseDistributionSpec>,
    n: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    match (*assignment, laws) {
        (AssignmentDesign::CompleteRandomization { treated }, _) => {
            let mut x = DMatrix::zeros(n, 1);
            for i in index::sample(rng, n, treated.min(n)) {
                x[(i, 0)] = 1.0;
            }
            x
        }
        (AssignmentDesign::Independent, Some(laws)) => {
            let mut x = DMatrix::zeros(n, laws.dim());
            for (i, law) in laws.laws().iter().enumerate() {
                match law {
                    UnitLaw::Bernoulli(p) => {
                        x[(i, 0)] = f64::from(u8::from(rng.random::<f64>() < *p));
                    }
                    UnitLaw::Discrete { support, probs } => {
                        let u: f64 = rng.random();
                        let mut acc = 0.0;
                        let mut pick = support.len() - 1;
                        for (j, p) in probs.iter().enumerate() {
                            acc += p;
                            if u < acc {
                                pick = j;
                                break;
                            }
                        }
                        for (j, v) in support[pick].iter().enumerate() {
                            x[(i, j)] = *v;
                        }
                    }
                }
            }
            x
        }
        (AssignmentDesign::Independent, None) => DMatrix::zeros(n, 0),
    }
}

/// Sample indicators first, then causes, from the same stream; the two are
/// independent because they consume disjoint draws.
pub fn draw<R: Rng + ?Sized>(pop: &FinitePopulation, design: &Design, rng: &mut R) -> Result<Draw> {
    pop.validate_design(design)?;
    let n = pop.len();
    let r = draw_sample(&design.sampling, n, rng);
    let causes = draw_causes(&design.assignment, pop.causes(), n, rng);
    Ok(Draw { r, causes })
}
