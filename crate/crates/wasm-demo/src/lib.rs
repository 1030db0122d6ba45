//! Browser bindings for three small calculations. Each takes and returns
//! JSON text so the page needs no generated type definitions.

use designreg::bayes::{posterior_causal_n, posterior_descriptive_n, posterior_super_causal, BayesModel};
use designreg::design::enumerate_binary;
use designreg::population::BinaryPotentialOutcomes;
use designreg::variance::{binary_variance_components, population_dispersions};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Deserialize)]
pub struct DecompositionInput {
    pub y1: Vec<f64>,
    pub y0: Vec<f64>,
    /// Population treated count.
    pub treated: usize,
    /// Number of sampling fractions between 0 and 1.
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    40
}

#[derive(Debug, Default, Serialize, PartialEq)]
pub struct DecompositionCurve {
    pub rho: Vec<f64>,
    pub sample_treated: Vec<usize>,
    pub sample_control: Vec<usize>,
    pub v_total: Vec<f64>,
    pub v_sampling: Vec<f64>,
    pub v_design_given_sampling: Vec<f64>,
    pub v_design: Vec<f64>,
    pub v_sampling_given_design: Vec<f64>,
    pub v_ehw: Vec<f64>,
}

/// Variance components as the sample grows from a few units to a census,
/// keeping the treated share of the sample equal to the population's.
pub fn decomposition(input: &DecompositionInput) -> Result<DecompositionCurve, String> {
    let n = input.y1.len();
    if input.treated == 0 || input.treated >= n {
        return Err(format!("treated count must lie in 1..{n}"));
    }
    let d = population_dispersions(&input.y1, &input.y0).map_err(|e| e.to_string())?;
    let (n1, n0) = (input.treated, n - input.treated);
    let mut out = DecompositionCurve::default();
    let points = input.points.clamp(2, 500);
    let mut last = None;
    for i in 1..=points {
        let rho = i as f64 / points as f64;
        let b1 = ((rho * n1 as f64).round() as usize).clamp(1, n1);
        let b0 = ((rho * n0 as f64).round() as usize).clamp(1, n0);
        if last == Some((b1, b0)) {
            continue;
        }
        last = Some((b1, b0));
        let v = binary_variance_components(&d, b1, b0, Some(n1), Some(n0), Some(n)).map_err(|e| e.to_string())?;
        out.rho.push((b1 + b0) as f64 / n as f64);
        out.sample_treated.push(b1);
        out.sample_control.push(b0);
        out.v_total.push(v.v_total);
        out.v_sampling.push(v.v_sampling);
        out.v_design_given_sampling.push(v.v_design_given_sampling);
        out.v_design.push(v.v_design);
        out.v_sampling_given_design.push(v.v_sampling_given_design);
        out.v_ehw.push(d.s2_1 / b1 as f64 + d.s2_0 / b0 as f64);
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
pub struct PosteriorInput {
    pub sigma1: f64,
    pub sigma0: f64,
    pub kappa: f64,
    pub sample_treated: usize,
    pub sample_control: usize,
    pub ybar1: f64,
    pub ybar0: f64,
    /// Largest ratio of population to sample size.
    #[serde(default = "default_ratio")]
    pub max_ratio: usize,
}

fn default_ratio() -> usize {
    50
}

#[derive(Debug, Default, Serialize, PartialEq)]
pub struct PosteriorCurve {
    pub mean: f64,
    pub population_size: Vec<usize>,
    pub super_causal: Vec<f64>,
    pub descriptive: Vec<f64>,
    pub causal: Vec<f64>,
}

/// Posterior variances as the population grows in proportion to the sample.
pub fn posterior_curve(input: &PosteriorInput) -> Result<PosteriorCurve, String> {
    let mut out = PosteriorCurve::default();
    for ratio in 1..=input.max_ratio.clamp(1, 1000) {
        let model = BayesModel::new(
            input.sigma1,
            input.sigma0,
            input.kappa,
            ratio * input.sample_treated,
            ratio * input.sample_control,
            input.sample_treated,
            input.sample_control,
            input.ybar1,
            input.ybar0,
        )
        .map_err(|e| e.to_string())?;
        out.mean = posterior_super_causal(&model).mean;
        out.population_size.push(model.population_size());
        out.super_causal.push(posterior_super_causal(&model).variance);
        out.descriptive.push(posterior_descriptive_n(&model).variance);
        out.causal.push(posterior_causal_n(&model).variance);
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
pub struct EnumerationInput {
    pub y1: Vec<f64>,
    pub y0: Vec<f64>,
    pub sample_size: usize,
    pub treated: usize,
}

pub fn enumerate(input: &EnumerationInput) -> Result<String, String> {
    let outcomes = BinaryPotentialOutcomes::new(input.y1.clone(), input.y0.clone()).map_err(|e| e.to_string())?;
    let report = enumerate_binary(&outcomes, input.sample_size, input.treated).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

fn via_json<I, O>(json: &str, f: impl FnOnce(&I) -> Result<O, String>) -> Result<String, String>
where
    I: for<'de> Deserialize<'de>,
    O: Serialize,
{
    let input: I = serde_json::from_str(json).map_err(|e| format!("bad input: {e}"))?;
    serde_json::to_string(&f(&input)?).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = varianceDecomposition)]
pub fn variance_decomposition_js(json: &str) -> Result<String, JsError> {
    via_json(json, decomposition).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = posteriorCurve)]
pub fn posterior_curve_js(json: &str) -> Result<String, JsError> {
    via_json(json, posterior_curve).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = enumerateDesign)]
pub fn enumerate_js(json: &str) -> Result<String, JsError> {
    serde_json::from_str::<EnumerationInput>(json)
        .map_err(|e| format!("bad input: {e}"))
        .and_then(|input| enumerate(&input))
        .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_reaches_census() {
        let input = DecompositionInput {
            y1: vec![1.0, 2.0, 3.0, 4.0],
            y0: vec![0.0, 0.0, 0.0, 2.0],
            treated: 2,
            points: 10,
        };
        let c = decomposition(&input).unwrap();
        assert_eq!(c.sample_treated[0], 1);
        let first = c.v_total[0];
        assert!((first - 2.5).abs() < 1e-12);
        let last = c.rho.len() - 1;
        assert_eq!(c.rho[last], 1.0);
        assert!(c.v_sampling[last].abs() < 1e-12);
    }

    #[test]
    fn posterior_curve_orders_estimands() {
        let c = posterior_curve(&PosteriorInput {
            sigma1: 1.0,
            sigma0: 1.0,
            kappa: 0.2,
            sample_treated: 4,
            sample_control: 4,
            ybar1: 3.0,
            ybar0: 1.0,
            max_ratio: 20,
        })
        .unwrap();
        assert_eq!(c.mean, 2.0);
        assert_eq!(c.descriptive[0], 0.0);
        assert!(c.descriptive.iter().zip(&c.super_causal).all(|(d, s)| d <= s));
    }

    #[test]
    fn enumeration_round_trip() {
        let json = r#"{"y1":[1,2,3,4],"y0":[0,0,0,2],"sample_size":2,"treated":2}"#;
        let out = via_json::<EnumerationInput, serde_json::Value>(json, |i| {
            serde_json::from_str(&enumerate(i)?).map_err(|e| e.to_string())
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["total_pairs"], 36);
        assert!(via_json::<EnumerationInput, serde_json::Value>("{}", |_| Ok(serde_json::Value::Null)).is_err());
    }
}
