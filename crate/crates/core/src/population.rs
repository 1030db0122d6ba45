//! Finite populations: potential outcomes, fixed attributes, cause laws and
//! the sampling and assignment designs acting on them.
//!
//! The `*Spec` types mirror the population spec file one-to-one and reject
//! unknown keys. [`FinitePopulation::from_spec`] validates a spec and builds
//! the checked types used by the rest of the crate.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::PivotedQr;

/// Tolerance on the total mass of a per-unit cause distribution.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Outcome table for a single binary cause.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPotentialOutcomes {
    y1: Vec<f64>,
    y0: Vec<f64>,
}

impl BinaryPotentialOutcomes {
    pub fn new(y1: Vec<f64>, y0: Vec<f64>) -> Result<Self> {
        if y1.len() != y0.len() {
            return Err(Error::dim(format!(
                "y1 has {} units, y0 has {}",
                y1.len(),
                y0.len()
            )));
        }
        if y1.is_empty() {
            return Err(Error::invalid("population must contain at least one unit"));
        }
        if y1.iter().chain(&y0).any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential outcomes must be finite"));
        }
        Ok(Self { y1, y0 })
    }

    pub fn len(&self) -> usize {
        self.y1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y1.is_empty()
    }

    pub fn y1(&self) -> &[f64] {
        &self.y1
    }

    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    /// Unit-level effects `y1[i] - y0[i]`.
    pub fn effects(&self) -> Vec<f64> {
        self.y1.iter().zip(&self.y0).map(|(a, b)| a - b).collect()
    }

    pub fn outcome(&self, unit: usize, treated: bool) -> f64 {
        if treated {
            self.y1[unit]
        } else {
            self.y0[unit]
        }
    }
}

/// Outcomes linear in the cause, `Y_i(u) = u·θ_i + ξ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPotentialOutcomes {
    slopes: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
}

impl LinearPotentialOutcomes {
    pub fn new(slopes: Vec<Vec<f64>>, intercepts: Vec<f64>) -> Result<Self> {
        if slopes.len() != intercepts.len() {
            return Err(Error::dim(format!(
                "{} slope vectors but {} intercepts",
                slopes.len(),
                intercepts.len()
            )));
        }
        let k = slopes.first().map(Vec::len).unwrap_or(0);
        if slopes.is_empty() || k == 0 {
            return Err(Error::invalid(
                "linear outcomes need at least one unit and one cause",
            ));
        }
        if slopes.iter().any(|s| s.len() != k) {
            return Err(Error::dim("unit slope vectors have unequal dimensions"));
        }
        if slopes.iter().flatten().chain(&intercepts).any(|v| !v.is_finite()) {
            return Err(Error::invalid("linear outcome coefficients must be finite"));
        }
        Ok(Self { slopes, intercepts })
    }

    /// Same slope for every unit (constant treatment effects).
    pub fn constant_effects(slope: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        let slopes = vec![slope; intercepts.len()];
        Self::new(slopes, intercepts)
    }

    pub fn len(&self) -> usize {
        self.intercepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intercepts.is_empty()
    }

    pub fn cause_dim(&self) -> usize {
        self.slopes[0].len()
    }

    pub fn slopes(&self) -> &[Vec<f64>] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn has_constant_effects(&self) -> bool {
        self.slopes.iter().all(|s| s == &self.slopes[0])
    }

    pub fn outcome(&self, unit: usize, cause: &[f64]) -> f64 {
        self.slopes[unit]
            .iter()
            .zip(cause)
            .map(|(t, u)| t * u)
            .sum::<f64>()
            + self.intercepts[unit]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialOutcomes {
    Binary(BinaryPotentialOutcomes),
    Linear(LinearPotentialOutcomes),
}

impl PotentialOutcomes {
    pub fn len(&self) -> usize {
        match self {
            PotentialOutcomes::Binary(b) => b.len(),
            PotentialOutcomes::Linear(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cause_dim(&self) -> usize {
        match self {
            PotentialOutcomes::Binary(_) => 1,
            PotentialOutcomes::Linear(l) => l.cause_dim(),
        }
    }

    /// Outcome of `unit` under `cause`; binary tables require a 0/1 cause.
    pub fn outcome(&self, unit: usize, cause: &[f64]) -> Result<f64> {
        match self {
            PotentialOutcomes::Binary(b) => match cause {
                [c] if *c == 1.0 => Ok(b.y1[unit]),
                [c] if *c == 0.0 => Ok(b.y0[unit]),
                [c] => Err(Error::invalid(format!(
                    "binary outcome table given non-binary cause {c} for unit {unit}"
                ))),
                _ => Err(Error::dim(format!(
                    "binary outcome table needs a scalar cause, got dimension {}",
                    cause.len()
                ))),
            },
            PotentialOutcomes::Linear(l) => {
                if cause.len() != l.cause_dim() {
                    return Err(Error::dim(format!(
                        "cause has dimension {}, outcomes expect {}",
                        cause.len(),
                        l.cause_dim()
                    )));
                }
                Ok(l.outcome(unit, cause))
            }
        }
    }
}

/// Realized outcomes for per-unit cause values (one row of `causes` per unit).
pub fn realize_outcomes(outcomes: &PotentialOutcomes, causes: &DMatrix<f64>) -> Result<Vec<f64>> {
    if causes.nrows() != outcomes.len() {
        return Err(Error::dim(format!(
            "{} cause rows for {} units",
            causes.nrows(),
            outcomes.len()
        )));
    }
    match outcomes {
        PotentialOutcomes::Binary(b) => {
            if causes.ncols() != 1 {
                return Err(Error::dim(format!(
                    "binary outcome table needs a scalar cause, got dimension {}",
                    causes.ncols()
                )));
            }
            causes
                .column(0)
                .iter()
                .enumerate()
                .map(|(unit, &c)| {
                    if c == 1.0 {
                        Ok(b.y1[unit])
                    } else if c == 0.0 {
                        Ok(b.y0[unit])
                    } else {
                        Err(Error::invalid(format!(
                            "binary outcome table given non-binary cause {c} for unit {unit}"
                        )))
                    }
                })
                .collect()
        }
        PotentialOutcomes::Linear(l) => {
            if causes.ncols() != l.cause_dim() {
                return Err(Error::dim(format!(
                    "cause has dimension {}, outcomes expect {}",
                    causes.ncols(),
                    l.cause_dim()
                )));
            }
            let mut y = l.intercepts.clone();
            for (j, col) in causes.column_iter().enumerate() {
                for ((yi, slope), u) in y.iter_mut().zip(&l.slopes).zip(col.iter()) {
                    *yi += slope[j] * u;
                }
            }
            Ok(y)
        }
    }
}

/// Binary-table convenience: `Y_i = Y_i(x_i)`.
pub fn realize_binary(outcomes: &BinaryPotentialOutcomes, treated: &[bool]) -> Result<Vec<f64>> {
    if treated.len() != outcomes.len() {
        return Err(Error::dim(format!(
            "{} assignments for {} units",
            treated.len(),
            outcomes.len()
        )));
    }
    Ok(treated
        .iter()
        .enumerate()
        .map(|(i, &t)| outcomes.outcome(i, t))
        .collect())
}

/// Fixed attributes; column 0 is the intercept and the matrix has full
/// column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMatrix(DMatrix<f64>);

impl AttributeMatrix {
    pub fn new(z: DMatrix<f64>) -> Result<Self> {
        let violations = attribute_violations(&z);
        if violations.is_empty() {
            Ok(Self(z))
        } else {
            Err(Error::InvalidPopulation(
                violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    /// Intercept-only attributes for `n` units.
    pub fn intercept(n: usize) -> Self {
        Self(DMatrix::from_element(n, 1, 1.0))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_matrix(rows)?)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::dim("rows have unequal lengths"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Law of one unit's cause vector.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitLaw {
    /// Scalar binary cause equal to 1 with probability `p`.
    Bernoulli(f64),
    /// Finite support with matching probabilities.
    Discrete {
        support: Vec<Vec<f64>>,
        probs: Vec<f64>,
    },
}

impl UnitLaw {
    pub fn dim(&self) -> usize {
        match self {
            UnitLaw::Bernoulli(_) => 1,
            UnitLaw::Discrete { support, .. } => support.first().map(Vec::len).unwrap_or(0),
        }
    }

    /// Support points paired with their probabilities.
    pub fn atoms(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            UnitLaw::Bernoulli(p) => vec![(vec![0.0], 1.0 - p), (vec![1.0], *p)],
            UnitLaw::Discrete { support, probs } => {
                support.iter().cloned().zip(probs.iter().copied()).collect()
            }
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            UnitLaw::Bernoulli(p) => vec![*p],
            UnitLaw::Discrete { support, probs } => {
                let mut m = vec![0.0; self.dim()];
                for (point, p) in support.iter().zip(probs) {
                    for (acc, v) in m.iter_mut().zip(point) {
                        *acc += p * v;
                    }
                }
                m
            }
        }
    }
}

/// Independent per-unit cause laws.
#[derive(Debug, Clone, PartialEq)]
pub struct CauseDistributionSpec {
    laws: Vec<UnitLaw>,
}

impl CauseDistributionSpec {
    pub fn new(laws: Vec<UnitLaw>) -> Result<Self> {
        let problems = law_violations(&laws);
        if problems.is_empty() {
            Ok(Self { laws })
        } else {
            Err(Error::InvalidPopulation(
                problems.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    pub fn bernoulli(p: &[f64]) -> Result<Self> {
        Self::new(p.iter().map(|&p| UnitLaw::Bernoulli(p)).collect())
    }

    pub fn laws(&self) -> &[UnitLaw] {
        &self.laws
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.laws.first().map(UnitLaw::dim).unwrap_or(0)
    }

    /// `E[U_i]` stacked as an n×k matrix.
    pub fn expected_causes(&self) -> DMatrix<f64> {
        let k = self.dim();
        let mut m = DMatrix::zeros(self.laws.len(), k);
        for (i, law) in self.laws.iter().enumerate() {
            for (j, v) in law.mean().into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplingDesign {
    /// Simple random sample of exactly `size` units.
    Srs { size: usize },
    /// Each unit included independently with probability `rate`.
    Bernoulli { rate: f64 },
}

impl SamplingDesign {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            SamplingDesign::Srs { size } if size == 0 || size > n => Err(Error::invalid(format!(
                "SRS size {size} must lie in 1..={n}"
            ))),
            SamplingDesign::Bernoulli { rate } if !(rate > 0.0 && rate <= 1.0) => Err(
                Error::invalid(format!("Bernoulli sampling rate {rate} must lie in (0, 1]")),
            ),
            _ => Ok(()),
        }
    }

    /// Expected sampling fraction.
    pub fn rate(&self, n: usize) -> f64 {
        match *self {
            SamplingDesign::Srs { size } => size as f64 / n as f64,
            SamplingDesign::Bernoulli { rate } => rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssignmentDesign {
    /// Exactly `treated` of the n units receive the binary cause.
    CompleteRandomization { treated: usize },
    /// Causes drawn independently from the population's cause laws.
    Independent,
}

impl AssignmentDesign {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            AssignmentDesign::CompleteRandomization { treated } if treated == 0 || treated >= n => {
                Err(Error::invalid(format!(
                    "complete randomization needs 1 <= treated <= n-1, got {treated} with n = {n}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub sampling: SamplingDesign,
    pub assignment: AssignmentDesign,
}

/// A complete science table.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePopulation {
    outcomes: PotentialOutcomes,
    attributes: AttributeMatrix,
    causes: Option<CauseDistributionSpec>,
}

impl FinitePopulation {
    pub fn new(
        outcomes: PotentialOutcomes,
        attributes: AttributeMatrix,
        causes: Option<CauseDistributionSpec>,
    ) -> Result<Self> {
        let n = outcomes.len();
        if attributes.nrows() != n {
            return Err(Error::dim(format!(
                "{} attribute rows for {n} units",
                attributes.nrows()
            )));
        }
        if let Some(c) = &causes {
            if c.len() != n {
                return Err(Error::dim(format!("{} cause laws for {n} units", c.len())));
            }
            if c.dim() != outcomes.cause_dim() {
                return Err(Error::dim(format!(
                    "cause laws have dimension {}, outcomes expect {}",
                    c.dim(),
                    outcomes.cause_dim()
                )));
            }
            if matches!(outcomes, PotentialOutcomes::Binary(_))
                && c.laws().iter().any(|l| !is_binary_law(l))
            {
                return Err(Error::invalid(
                    "binary outcome tables need cause laws supported on {0, 1}",
                ));
            }
        }
        Ok(Self {
            outcomes,
            attributes,
            causes,
        })
    }

    pub fn from_spec(spec: &PopulationSpec) -> Result<Self> {
        let report = validate_population(spec);
        if !report.is_valid() {
            return Err(Error::InvalidPopulation(
                report.violations.iter().map(ToString::to_string).collect(),
            ));
        }
        let outcomes = match &spec.outcomes {
            OutcomeSpec::Binary { y1, y0 } => {
                PotentialOutcomes::Binary(BinaryPotentialOutcomes::new(y1.clone(), y0.clone())?)
            }
            OutcomeSpec::Linear { theta, xi } => {
                PotentialOutcomes::Linear(LinearPotentialOutcomes::new(theta.clone(), xi.clone())?)
            }
        };
        let attributes = AttributeMatrix::from_rows(&spec.attributes)?;
        let causes = spec
            .causes
            .as_ref()
            .map(|c| CauseDistributionSpec::new(c.to_laws()))
            .transpose()?;
        Self::new(outcomes, attributes, causes)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &PotentialOutcomes {
        &self.outcomes
    }

    pub fn attributes(&self) -> &AttributeMatrix {
        &self.attributes
    }

    pub fn causes(&self) -> Option<&CauseDistributionSpec> {
        self.causes.as_ref()
    }

    pub fn cause_dim(&self) -> usize {
        self.outcomes.cause_dim()
    }

    /// Per-unit marginal cause laws implied by an assignment design.
    pub fn marginal_laws(&self, assignment: &AssignmentDesign) -> Result<CauseDistributionSpec> {
        match *assignment {
            AssignmentDesign::CompleteRandomization { treated } => {
                assignment.validate(self.len())?;
                if self.cause_dim() != 1 {
                    return Err(Error::invalid(
                        "complete randomization assigns a scalar binary cause",
                    ));
                }
                let p = treated as f64 / self.len() as f64;
                CauseDistributionSpec::bernoulli(&vec![p; self.len()])
            }
            AssignmentDesign::Independent => self.causes.clone().ok_or_else(|| {
                Error::invalid("independent assignment needs per-unit cause laws")
            }),
        }
    }

    pub fn validate_design(&self, design: &Design) -> Result<()> {
        design.sampling.validate(self.len())?;
        design.assignment.validate(self.len())?;
        self.marginal_laws(&design.assignment).map(|_| ())
    }
}

fn is_binary_law(law: &UnitLaw) -> bool {
    match law {
        UnitLaw::Bernoulli(_) => true,
        UnitLaw::Discrete { support, .. } => support
            .iter()
            .all(|p| p.len() == 1 && (p[0] == 0.0 || p[0] == 1.0)),
    }
}

// ---------------------------------------------------------------------------
// Population spec file

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub n: usize,
    pub outcomes: OutcomeSpec,
    pub attributes: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub causes: Option<CauseSpec>,
    pub sampling: SamplingDesign,
    pub assignment: AssignmentDesign,
}

impl PopulationSpec {
    pub fn design(&self) -> Design {
        Design {
            sampling: self.sampling,
            assignment: self.assignment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutcomeSpec {
    Binary { y1: Vec<f64>, y0: Vec<f64> },
    Linear { theta: Vec<Vec<f64>>, xi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CauseSpec {
    Bernoulli { p: Vec<f64> },
    Discrete { units: Vec<DiscreteUnitSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteUnitSpec {
    pub support: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

impl CauseSpec {
    fn to_laws(&self) -> Vec<UnitLaw> {
        match self {
            CauseSpec::Bernoulli { p } => p.iter().map(|&p| UnitLaw::Bernoulli(p)).collect(),
            CauseSpec::Discrete { units } => units
                .iter()
                .map(|u| UnitLaw::Discrete {
                    support: u.support.clone(),
                    probs: u.probs.clone(),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LengthMismatch { what: String, expected: usize, found: usize },
    NonFinite { what: String },
    MissingIntercept,
    AttributesRankDeficient { column: usize },
    TooFewUnits { units: usize, attributes: usize },
    ProbabilityNormalization { unit: usize, total: f64 },
    NegativeProbability { unit: usize },
    CauseDimension { unit: usize, expected: usize, found: usize },
    NonBinaryCause { unit: usize },
    Design(String),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::LengthMismatch { what, expected, found } => {
                write!(f, "length mismatch: {what} has {found} entries, expected {expected}")
            }
            Violation::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Violation::MissingIntercept => write!(f, "missing intercept: attribute column 0 must be all ones"),
            Violation::AttributesRankDeficient { column } => {
                write!(f, "attributes rank deficient at column {column}")
            }
            Violation::TooFewUnits { units, attributes } => {
                write!(f, "{units} units cannot support {attributes} attributes")
            }
            Violation::ProbabilityNormalization { unit, total } => {
                write!(f, "probabilities of unit {unit} sum to {total}, not 1")
            }
            Violation::NegativeProbability { unit } => {
                write!(f, "unit {unit} has a negative or non-finite probability")
            }
            Violation::CauseDimension { unit, expected, found } => write!(
                f,
                "cause support of unit {unit} has dimension {found}, expected {expected}"
            ),
            Violation::NonBinaryCause { unit } => {
                write!(f, "unit {unit} has a non-binary cause for a binary outcome table")
            }
            Violation::Design(msg) => write!(f, "design: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn attribute_violations(z: &DMatrix<f64>) -> Vec<Violation> {
    let mut out = Vec::new();
    if z.iter().any(|v| !v.is_finite()) {
        out.push(Violation::NonFinite {
            what: "attributes".into(),
        });
        return out;
    }
    if z.ncols() == 0 || z.column(0).iter().any(|&v| v != 1.0) {
        out.push(Violation::MissingIntercept);
    }
    if z.nrows() < z.ncols() {
        out.push(Violation::TooFewUnits {
            units: z.nrows(),
            attributes: z.ncols(),
        });
    } else if z.ncols() > 0 {
        if let Err(Error::RankDeficient { column }) = PivotedQr::new(z).require_full_rank() {
            out.push(Violation::AttributesRankDeficient { column });
        }
    }
    out
}

fn law_violations(laws: &[UnitLaw]) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = laws.first().map(UnitLaw::dim).unwrap_or(0);
    for (unit, law) in laws.iter().enumerate() {
        match law {
            UnitLaw::Bernoulli(p) => {
                if !(p.is_finite() && (0.0..=1.0).contains(p)) {
                    out.push(Violation::NegativeProbability { unit });
                }
            }
            UnitLaw::Discrete { support, probs } => {
                if support.len() != probs.len() || support.is_empty() {
                    out.push(Violation::LengthMismatch {
                        what: format!("probabilities of unit {unit}"),
                        expected: support.len(),
                        found: probs.len(),
                    });
                    continue;
                }
                if let Some(bad) = support.iter().find(|p| p.len() != k) {
                    out.push(Violation::CauseDimension {
                        unit,
                        expected: k,
                        found: bad.len(),
                    });
                }
                if support.iter().flatten().any(|v| !v.is_finite()) {
                    out.push(Violation::NonFinite {
                        what: format!("cause support of unit {unit}"),
                    });
                }
                if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    out.push(Violation::NegativeProbability { unit });
                } else {
                    let total: f64 = probs.iter().sum();
                    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                        out.push(Violation::ProbabilityNormalization { unit, total });
                    }
                }
            }
        }
    }
    out
}

/// Checks a population spec without constructing anything. Violations are
/// returned, never raised; an empty list means the spec is valid.
pub fn validate_population(spec: &PopulationSpec) -> ValidationReport {
    let mut v = Vec::new();
    let n = spec.n;

    let (units, cause_dim, binary) = match &spec.outcomes {
        OutcomeSpec::Binary { y1, y0 } => {
            if y1.len() != y0.len() {
                v.push(Violation::LengthMismatch {
                    what: "y0".into(),
                    expected: y1.len(),
                    found: y0.len(),
                });
            }
            if y1.iter().chain(y0).any(|x| !x.is_finite()) {
                v.push(Violation::NonFinite {
                    what: "potential outcomes".into(),
                });
            }
            (y1.len(), 1, true)
        }
        OutcomeSpec::Linear { theta, xi } => {
            if theta.len() != xi.len() {
                v.push(Violation::LengthMismatch {
                    what: "xi".into(),
                    expected: theta.len(),
                    found: xi.len(),
                });
            }
            let k = theta.first().map(Vec::len).unwrap_or(0);
            if let Some((unit, t)) = theta.iter().enumerate().find(|(_, t)| t.len() != k) {
                v.push(Violation::CauseDimension {
                    unit,
                    expected: k,
                    found: t.len(),
                });
            }
            if theta.iter().flatten().chain(xi).any(|x| !x.is_finite()) {
                v.push(Violation::NonFinite {
                    what: "linear outcome coefficients".into(),
                });
            }
            (theta.len(), k, false)
        }
    };
    if units != n {
        v.push(Violation::LengthMismatch {
            what: "outcomes".into(),
            expected: n,
            found: units,
        });
    }
    if n == 0 {
        v.push(Violation::Design("population is empty".into()));
    }

    if spec.attributes.len() != n {
        v.push(Violation::LengthMismatch {
            what: "attributes".into(),
            expected: n,
            found: spec.attributes.len(),
        });
    }
    match rows_to_matrix(&spec.attributes) {
        Ok(z) => v.extend(attribute_violations(&z)),
        Err(_) => v.push(Violation::LengthMismatch {
            what: "attribute rows".into(),
            expected: spec.attributes.first().map(Vec::len).unwrap_or(0),
            found: spec
                .attributes
                .iter()
                .map(Vec::len)
                .find(|&l| l != spec.attributes[0].len())
                .unwrap_or(0),
        }),
    }

    if let Some(causes) = &spec.causes {
        let laws = causes.to_laws();
        if laws.len() != n {
            v.push(Violation::LengthMismatch {
                what: "causes".into(),
                expected: n,
                found: laws.len(),
            });
        }
        v.extend(law_violations(&laws));
        for (unit, law) in laws.iter().enumerate() {
            if law.dim() != cause_dim {
                v.push(Violation::CauseDimension {
                    unit,
                    expected: cause_dim,
                    found: law.dim(),
                });
                break;
            }
            if binary && !is_binary_law(law) {
                v.push(Violation::NonBinaryCause { unit });
                break;
            }
        }
    }

    if let Err(e) = spec.sampling.validate(n) {
        v.push(Violation::Design(e.to_string()));
    }
    match spec.assignment {
        AssignmentDesign::CompleteRandomization { .. } => {
            if let Err(e) = spec.assignment.validate(n) {
                v.push(Violation::Design(e.to_string()));
            }
            if cause_dim != 1 {
                v.push(Violation::Design(
                    "complete randomization assigns a scalar binary cause".into(),
                ));
            }
        }
        AssignmentDesign::Independent => {
            if spec.causes.is_none() {
                v.push(Violation::Design(
                    "independent assignment needs a \"causes\" entry".into(),
                ));
            }
        }
    }

    ValidationReport { violations: v }
}
