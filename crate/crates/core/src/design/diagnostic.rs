//! Gap between the causal estimand and its weighted-average-of-unit-effects
//! representation.

use crate::error::Result;
use crate::estimands::{general_estimands, weighted_causal_representation, PopulationMoments};
use crate::population::{AttributeMatrix, CauseDistributionSpec, LinearPotentialOutcomes, PotentialOutcomes};

/// `max_j |θ^causal_j − ((Σ E[X_i X_i'])⁻¹ Σ E[X_i X_i'] θ_i)_j|`, with both
/// sides computed exactly from the per-unit laws.
///
/// The gap vanishes when expected causes are linear in the attributes and
/// may be large otherwise.
pub fn representation_gap(
    outcomes: &LinearPotentialOutcomes,
    laws: &CauseDistributionSpec,
    z: &AttributeMatrix,
) -> Result<f64> {
    let po = PotentialOutcomes::Linear(outcomes.clone());
    let pm = PopulationMoments::new(&po, z, laws)?;
    let theta = general_estimands(&pm.omega())?.theta;
    let weighted = weighted_causal_representation(&pm.expected_xx(), outcomes.slopes(), None)?;
    Ok(theta
        .iter()
        .zip(&weighted)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::UnitLaw;

    fn two_point(mean: f64) -> UnitLaw {
        UnitLaw::Discrete {
            support: vec![vec![mean - 1.0], vec![mean + 1.0]],
            probs: vec![0.5, 0.5],
        }
    }

    fn z3() -> AttributeMatrix {
        AttributeMatrix::from_rows(&[vec![1.0, -1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn nonlinear_expectation_counterexample() {
        let (a, b) = (1.5, 0.8);
        let laws = CauseDistributionSpec::new(vec![two_point(b), two_point(-2.0 * b), two_point(b)]).unwrap();
        let flat = LinearPotentialOutcomes::new(vec![vec![0.0]; 3], vec![a, 0.0, 2.0 * a]).unwrap();
        let gap = representation_gap(&flat, &laws, &z3()).unwrap();
        let expected = a * b / (2.0 * b * b + 1.0);
        assert!((gap - expected).abs() < 1e-12, "{gap} vs {expected}");
    }

    #[test]
    fn linear_expectation_closes_gap() {
        let laws = CauseDistributionSpec::new(vec![two_point(0.2), two_point(0.5), two_point(0.8)]).unwrap();
        let het = LinearPotentialOutcomes::new(vec![vec![1.0], vec![-2.0], vec![4.0]], vec![0.3, 1.0, -1.0]).unwrap();
        assert!(representation_gap(&het, &laws, &z3()).unwrap() < 1e-10);
    }

    #[test]
    fn constant_effects_close_gap_regardless() {
        // Expected causes are nonlinear in z; the intercepts are linear in z,
        // so they carry no expected score.
        let laws = CauseDistributionSpec::new(vec![two_point(1.0), two_point(-2.0), two_point(1.0)]).unwrap();
        let c = LinearPotentialOutcomes::constant_effects(vec![0.7], vec![0.0, 1.0, 2.0]).unwrap();
        assert!(representation_gap(&c, &laws, &z3()).unwrap() < 1e-12);
    }
}
