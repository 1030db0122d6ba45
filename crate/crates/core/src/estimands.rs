//! Population estimands.
//!
//! Second-moment matrices are stored as one symmetric `(1+k+q)²` matrix
//! ordered `(Y, X, Z)`. The descriptive, sample-causal and causal
//! estimands all solve the same partitioned normal equations; only the
//! moment matrix they are fed differs.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{solve_square, symmetrize, PivotedQr};
use crate::population::{AttributeMatrix, CauseDistributionSpec, PotentialOutcomes};

/// Which population object a [`MomentMatrices`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    /// Realized moments over the whole population.
    W,
    /// Expected moments over the whole population.
    Omega,
    /// Realized moments over the sample.
    WTilde,
    /// Expected moments over the sampled units.
    OmegaTilde,
}

/// What the coefficients solved from a moment matrix estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimand {
    Descriptive,
    CausalSample,
    Causal,
    /// The least squares estimate itself (from sample moments).
    SampleFit,
}

impl MomentKind {
    pub fn estimand(self) -> Estimand {
        match self {
            MomentKind::W => Estimand::Descriptive,
            MomentKind::OmegaTilde => Estimand::CausalSample,
            MomentKind::Omega => Estimand::Causal,
            MomentKind::WTilde => Estimand::SampleFit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrices {
    kind: MomentKind,
    full: DMatrix<f64>,
    k: usize,
    q: usize,
}

impl MomentMatrices {
    pub fn new(kind: MomentKind, full: DMatrix<f64>, k: usize, q: usize) -> Result<Self> {
        if full.shape() != (1 + k + q, 1 + k + q) {
            return Err(Error::dim(format!(
                "moment matrix is {}x{}, expected {d}x{d}",
                full.nrows(),
                full.ncols(),
                d = 1 + k + q
            )));
        }
        Ok(Self {
            kind,
            full: symmetrize(&full),
            k,
            q,
        })
    }

    /// `(1/N) Σ_i w_i (Y_i, X_i, Z_i)(Y_i, X_i, Z_i)'` over rows with `w_i = 1`,
    /// or all rows when `include` is `None`.
    pub fn realized(
        kind: MomentKind,
        y: &[f64],
        x: &DMatrix<f64>,
        z: &DMatrix<f64>,
        include: Option<&[bool]>,
    ) -> Result<Self> {
        let n = y.len();
        if x.nrows() != n || z.nrows() != n || include.is_some_and(|r| r.len() != n) {
            return Err(Error::dim("outcome, cause, attribute and inclusion lengths differ"));
        }
        let (k, q) = (x.ncols(), z.ncols());
        let d = 1 + k + q;
        let rows: Option<Vec<usize>> = include.map(|r| (0..n).filter(|&i| r[i]).collect());
        let count = rows.as_ref().map_or(n, Vec::len);
        if count == 0 {
            return Err(Error::Undefined {
                what: "moment matrix",
                reason: "no units included".into(),
            });
        }
        let gather = |col: &[f64]| -> Vec<f64> {
            match &rows {
                Some(idx) => idx.iter().map(|&i| col[i]).collect(),
                None => col.to_vec(),
            }
        };
        let mut columns = Vec::with_capacity(d);
        columns.push(gather(y));
        for j in 0..k {
            columns.push(gather(&x.as_slice()[j * n..(j + 1) * n]));
        }
        for j in 0..q {
            columns.push(gather(&z.as_slice()[j * n..(j + 1) * n]));
        }
        let mut full = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let v = columns[a].iter().zip(&columns[b]).map(|(u, w)| u * w).sum::<f64>();
                full[(a, b)] = v;
                full[(b, a)] = v;
            }
        }
        Self::new(kind, full / count as f64, k, q)
    }

    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    pub fn full(&self) -> &DMatrix<f64> {
        &self.full
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn yy(&self) -> f64 {
        self.full[(0, 0)]
    }

    pub fn yx(&self) -> DMatrix<f64> {
        self.full.view((0, 1), (1, self.k)).into_owned()
    }

    pub fn yz(&self) -> DMatrix<f64> {
        self.full.view((0, 1 + self.k), (1, self.q)).into_owned()
    }

    pub fn xx(&self) -> DMatrix<f64> {
        self.full.view((1, 1), (self.k, self.k)).into_owned()
    }

    pub fn xz(&self) -> DMatrix<f64> {
        self.full.view((1, 1 + self.k), (self.k, self.q)).into_owned()
    }

    pub fn zz(&self) -> DMatrix<f64> {
        self.full
            .view((1 + self.k, 1 + self.k), (self.q, self.q))
            .into_owned()
    }
}

/// Adds `weight · row rowᵀ` to the upper triangle of `acc`.
fn accumulate_outer(acc: &mut DMatrix<f64>, row: &[f64], weight: f64) {
    let d = row.len();
    let data = acc.as_mut_slice();
    for (b, &rb) in row.iter().enumerate() {
        let wb = weight * rb;
        for (slot, &ra) in data[b * d..b * d + b + 1].iter_mut().zip(row) {
            *slot += wb * ra;
        }
    }
}

fn fill_lower(m: &mut DMatrix<f64>) {
    for a in 0..m.nrows() {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
}

/// Coefficients `(θ, γ)` and the estimand they represent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients {
    pub estimand: Estimand,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// Solves `[[XX, XZ], [ZX, ZZ]] (θ; γ) = (XY; ZY)` with one pivoted
/// factorization of the full block matrix.
pub fn general_estimands(moments: &MomentMatrices) -> Result<Coefficients> {
    let p = moments.k + moments.q;
    let a = moments.full.view((1, 1), (p, p)).into_owned();
    let b = moments.full.view((1, 0), (p, 1)).into_owned();
    let sol = solve_square(&a, &b, "regressor block of the moment matrix")?;
    Ok(Coefficients {
        estimand: moments.kind.estimand(),
        theta: sol.rows(0, moments.k).iter().copied().collect(),
        gamma: sol.rows(moments.k, moments.q).iter().copied().collect(),
    })
}

/// `Λ` and the transformed expected causes `E[X_i] = E[U_i] − Λ Z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    /// k×q.
    pub lambda: DMatrix<f64>,
    /// n×k, rows are `E[X_i]`.
    pub x: DMatrix<f64>,
}

impl TransformResult {
    /// `u_i − Λ z_i` row-wise for realized causes.
    pub fn apply(&self, u: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if u.nrows() != z.nrows() || u.ncols() != self.lambda.nrows() || z.ncols() != self.lambda.ncols()
        {
            return Err(Error::dim("causes/attributes do not match the transformation"));
        }
        Ok(u - z * self.lambda.transpose())
    }

    pub fn apply_row(&self, u: &[f64], z_row: &[f64]) -> Vec<f64> {
        (0..self.lambda.nrows())
            .map(|j| {
                u[j] - (0..self.lambda.ncols())
                    .map(|c| self.lambda[(j, c)] * z_row[c])
                    .sum::<f64>()
            })
            .collect()
    }
}

/// `Λ = (Σ E[U_i] Z_i')(Σ Z_i Z_i')⁻¹`, so that `Σ E[X_i] Z_i' = 0`.
pub fn transform_causes(expected_u: &DMatrix<f64>, z: &AttributeMatrix) -> Result<TransformResult> {
    let zm = z.matrix();
    if expected_u.nrows() != zm.nrows() {
        return Err(Error::dim(format!(
            "{} expected-cause rows for {} attribute rows",
            expected_u.nrows(),
            zm.nrows()
        )));
    }
    let qr = PivotedQr::new(zm);
    let lambda_t = qr.solve(expected_u).map_err(|e| match e {
        Error::RankDeficient { column } => {
            Error::Singular(format!("attribute cross-product is singular (column {column})"))
        }
        other => other,
    })?;
    let lambda = lambda_t.transpose();
    let x = expected_u - zm * &lambda_t;
    Ok(TransformResult { lambda, x })
}

/// The three binary-cause estimands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryEstimands {
    pub descriptive: f64,
    pub causal_sample: f64,
    pub causal: f64,
}

/// Difference in population means by realized treatment, average effect
/// over sampled units, and average effect over the population.
pub fn binary_estimands(y1: &[f64], y0: &[f64], x: &[bool], r: &[bool]) -> Result<BinaryEstimands> {
    let n = y1.len();
    if y0.len() != n || x.len() != n || r.len() != n {
        return Err(Error::dim("y1, y0, x and r must have equal lengths"));
    }
    if n == 0 {
        return Err(Error::invalid("empty population"));
    }
    let descriptive = descriptive_binary(y1, y0, x)?;
    let causal_sample = sample_average_effect(y1, y0, r)?;
    let causal = y1.iter().zip(y0).map(|(a, b)| a - b).sum::<f64>() / n as f64;
    Ok(BinaryEstimands {
        descriptive,
        causal_sample,
        causal,
    })
}

pub(crate) fn descriptive_binary(y1: &[f64], y0: &[f64], x: &[bool]) -> Result<f64> {
    let (mut s1, mut s0, mut n1, mut n0) = (0.0, 0.0, 0usize, 0usize);
    for i in 0..x.len() {
        if x[i] {
            s1 += y1[i];
            n1 += 1;
        } else {
            s0 += y0[i];
            n0 += 1;
        }
    }
    if n1 == 0 || n0 == 0 {
        return Err(Error::Undefined {
            what: "descriptive estimand",
            reason: format!("treated count {n1}, control count {n0}"),
        });
    }
    Ok(s1 / n1 as f64 - s0 / n0 as f64)
}

pub(crate) fn sample_average_effect(y1: &[f64], y0: &[f64], r: &[bool]) -> Result<f64> {
    let (mut s, mut count) = (0.0, 0usize);
    for i in 0..r.len() {
        if r[i] {
            s += y1[i] - y0[i];
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Undefined {
            what: "sample causal estimand",
            reason: "no sampled units".into(),
        });
    }
    Ok(s / count as f64)
}

/// `ε_i = Y_i − X_i'θ − Z_i'γ`.
pub fn population_residuals(
    y: &[f64],
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    theta: &[f64],
    gamma: &[f64],
) -> Result<Vec<f64>> {
    let n = y.len();
    if x.nrows() != n || z.nrows() != n || x.ncols() != theta.len() || z.ncols() != gamma.len() {
        return Err(Error::dim("residual inputs have inconsistent dimensions"));
    }
    let th = DVector::from_column_slice(theta);
    let ga = DVector::from_column_slice(gamma);
    let fitted = x * th + z * ga;
    Ok(y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect())
}

/// `(Σ E[W_i^XX])⁻¹ Σ E[W_i^XX] θ_i`, restricted to units with `r_i` when
/// `r` is given.
pub fn weighted_causal_representation(
    exx_per_unit: &[DMatrix<f64>],
    theta_per_unit: &[Vec<f64>],
    r: Option<&[bool]>,
) -> Result<Vec<f64>> {
    let n = exx_per_unit.len();
    if theta_per_unit.len() != n || r.is_some_and(|r| r.len() != n) {
        return Err(Error::dim("weights, unit effects and inclusion differ in length"));
    }
    let k = theta_per_unit.first().map(Vec::len).unwrap_or(0);
    let mut weight = DMatrix::zeros(k, k);
    let mut weighted = DMatrix::zeros(k, 1);
    for i in 0..n {
        if r.is_some_and(|r| !r[i]) {
            continue;
        }
        let w = &exx_per_unit[i];
        if w.shape() != (k, k) || theta_per_unit[i].len() != k {
            return Err(Error::dim(format!("unit {i} has mismatched dimensions")));
        }
        weight += w;
        weighted += w * DMatrix::from_column_slice(k, 1, &theta_per_unit[i]);
    }
    let sol = solve_square(&weight, &weighted, "sum of expected cause outer products")?;
    Ok(sol.iter().copied().collect())
}

/// Exact per-unit expected moments under independent per-unit cause laws.
///
/// Holds `M_i = E[(Y_i, X_i, Z_i)(Y_i, X_i, Z_i)']` for every unit with
/// `X_i = U_i − Λ Z_i`, computed by summing over each law's atoms.
#[derive(Debug, Clone)]
pub struct PopulationMoments {
    transform: TransformResult,
    unit: Vec<DMatrix<f64>>,
    k: usize,
    q: usize,
}

impl PopulationMoments {
    pub fn new(
        outcomes: &PotentialOutcomes,
        attributes: &AttributeMatrix,
        laws: &CauseDistributionSpec,
    ) -> Result<Self> {
        let n = outcomes.len();
        if laws.len() != n || attributes.nrows() != n {
            return Err(Error::dim("outcomes, attributes and cause laws differ in length"));
        }
        let k = outcomes.cause_dim();
        if laws.dim() != k {
            return Err(Error::dim("cause laws do not match the outcome cause dimension"));
        }
        let q = attributes.ncols();
        let transform = transform_causes(&laws.expected_causes(), attributes)?;
        let z = attributes.matrix();
        let d = 1 + k + q;
        let mut unit = Vec::with_capacity(n);
        let mut row = vec![0.0; d];
        for (i, law) in laws.laws().iter().enumerate() {
            let z_row: Vec<f64> = z.row(i).iter().copied().collect();
            let mut m = DMatrix::zeros(d, d);
            for (u, p) in law.atoms() {
                if p == 0.0 {
                    continue;
                }
                row[0] = outcomes.outcome(i, &u)?;
                let x = transform.apply_row(&u, &z_row);
                row[1..1 + k].copy_from_slice(&x);
                row[1 + k..].copy_from_slice(&z_row);
                accumulate_outer(&mut m, &row, p);
            }
            fill_lower(&mut m);
            unit.push(m);
        }
        Ok(Self { transform, unit, k, q })
    }

    pub fn transform(&self) -> &TransformResult {
        &self.transform
    }

    pub fn unit_moments(&self) -> &[DMatrix<f64>] {
        &self.unit
    }

    pub fn omega(&self) -> MomentMatrices {
        let n = self.unit.len() as f64;
        let sum = self
            .unit
            .iter()
            .fold(DMatrix::zeros(1 + self.k + self.q, 1 + self.k + self.q), |acc, m| acc + m);
        MomentMatrices::new(MomentKind::Omega, sum / n, self.k, self.q)
            .expect("dimensions fixed at construction")
    }

    pub fn omega_tilde(&self, r: &[bool]) -> Result<MomentMatrices> {
        if r.len() != self.unit.len() {
            return Err(Error::dim("inclusion vector length differs from population size"));
        }
        let d = 1 + self.k + self.q;
        let mut sum = DMatrix::zeros(d, d);
        let mut count = 0usize;
        let acc = sum.as_mut_slice();
        for (m, &inc) in self.unit.iter().zip(r) {
            if inc {
                for (a, v) in acc.iter_mut().zip(m.as_slice()) {
                    *a += v;
                }
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::Undefined {
                what: "sample causal moments",
                reason: "no sampled units".into(),
            });
        }
        MomentMatrices::new(MomentKind::OmegaTilde, sum / count as f64, self.k, self.q)
    }

    /// `E[X_i X_i']` per unit.
    pub fn expected_xx(&self) -> Vec<DMatrix<f64>> {
        self.unit
            .iter()
            .map(|m| m.view((1, 1), (self.k, self.k)).into_owned())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transform_with_constant_mean_and_intercept() {
        let z = AttributeMatrix::intercept(4);
        let eu = DMatrix::from_element(4, 1, 0.5);
        let t = transform_causes(&eu, &z).unwrap();
        assert_abs_diff_eq!(t.lambda[(0, 0)], 0.5, epsilon = 1e-15);
        let u = DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 1.0, 1.0]);
        let x = t.apply(&u, z.matrix()).unwrap();
        for (a, b) in x.iter().zip([0.5, -0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn transform_zero_mean_is_identity() {
        let z = AttributeMatrix::from_rows(&[vec![1.0, -1.0], vec![1.0, 0.0], vec![1.0, 2.0]]).unwrap();
        let t = transform_causes(&DMatrix::zeros(3, 1), &z).unwrap();
        assert_eq!(t.lambda, DMatrix::zeros(1, 2));
        let u = DMatrix::from_column_slice(3, 1, &[0.3, 1.0, -2.0]);
        assert_eq!(t.apply(&u, z.matrix()).unwrap(), u);
    }

    #[test]
    fn transform_hand_solved_normal_equations() {
        // E[U] = [0, 1, 2], Z = [1, z] with z = [-1, 0, 1]: ΣZZ' = diag(3, 2),
        // ΣE[U]Z' = [3, 2], so Λ = [1, 1].
        let z = AttributeMatrix::from_rows(&[vec![1.0, -1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let eu = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 2.0]);
        let t = transform_causes(&eu, &z).unwrap();
        assert_abs_diff_eq!(t.lambda[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.lambda[(0, 1)], 1.0, epsilon = 1e-14);
        let cross = t.x.transpose() * z.matrix();
        assert!(cross.iter().all(|v| v.abs() < 1e-10 * 3.0));
    }

    #[test]
    fn binary_estimands_worked_example() {
        let e = binary_estimands(
            &[1.0, 2.0, 3.0, 4.0],
            &[0.0, 0.0, 0.0, 2.0],
            &[true, true, false, false],
            &[true; 4],
        )
        .unwrap();
        // descriptive: (1+2)/2 - (0+2)/2 = 0.5; effects [1,2,3,2] average to 2.
        assert_abs_diff_eq!(e.descriptive, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.causal_sample, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.causal, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn binary_null_and_constant_effects() {
        let y = [1.0, 5.0, -2.0];
        let e = binary_estimands(&y, &y, &[true, false, true], &[false, true, false]).unwrap();
        assert_eq!(e.causal, 0.0);
        let y0 = [1.0, 5.0, -2.0];
        let y1: Vec<f64> = y0.iter().map(|v| v + 1.5).collect();
        let e = binary_estimands(&y1, &y0, &[true, false, true], &[true; 3]).unwrap();
        assert_abs_diff_eq!(e.causal_sample, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.causal, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn binary_estimand_errors() {
        let y = [1.0, 2.0];
        assert!(matches!(
            binary_estimands(&y, &y, &[true, true], &[true, true]),
            Err(Error::Undefined { .. })
        ));
        assert!(matches!(
            binary_estimands(&y, &y, &[true, false], &[false, false]),
            Err(Error::Undefined { .. })
        ));
    }

    #[test]
    fn general_estimands_exact_line() {
        let u = DMatrix::from_column_slice(5, 1, &[0.0, 1.0, 2.0, 3.0, 5.0]);
        let y: Vec<f64> = u.iter().map(|v| 2.0 * v + 3.0).collect();
        let z = DMatrix::from_element(5, 1, 1.0);
        let w = MomentMatrices::realized(MomentKind::W, &y, &u, &z, None).unwrap();
        let c = general_estimands(&w).unwrap();
        assert_eq!(c.estimand, Estimand::Descriptive);
        assert_abs_diff_eq!(c.theta[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.gamma[0], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn general_estimands_orthonormal_block() {
        // XX = I, XZ = 0: θ is the XY block.
        let mut full = DMatrix::zeros(4, 4);
        full[(0, 0)] = 9.0;
        full[(0, 1)] = 0.7;
        full[(1, 0)] = 0.7;
        full[(0, 2)] = -1.2;
        full[(2, 0)] = -1.2;
        full[(1, 1)] = 1.0;
        full[(2, 2)] = 1.0;
        full[(3, 3)] = 2.0;
        full[(0, 3)] = 1.0;
        full[(3, 0)] = 1.0;
        let m = MomentMatrices::new(MomentKind::Omega, full, 2, 1).unwrap();
        let c = general_estimands(&m).unwrap();
        assert_abs_diff_eq!(c.theta[0], 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(c.theta[1], -1.2, epsilon = 1e-14);
        assert_abs_diff_eq!(c.gamma[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn general_matches_difference_in_means() {
        let y1 = [1.0, 2.0, 3.0, 4.0];
        let y0 = [0.0, 0.0, 0.0, 2.0];
        let x = [true, true, false, false];
        let y: Vec<f64> = (0..4).map(|i| if x[i] { y1[i] } else { y0[i] }).collect();
        let u = DMatrix::from_fn(4, 1, |i, _| f64::from(u8::from(x[i])));
        let z = DMatrix::from_element(4, 1, 1.0);
        let w = MomentMatrices::realized(MomentKind::W, &y, &u, &z, None).unwrap();
        let general = general_estimands(&w).unwrap().theta[0];
        let binary = binary_estimands(&y1, &y0, &x, &[true; 4]).unwrap().descriptive;
        assert_abs_diff_eq!(general, binary, epsilon = 1e-12);
        assert_abs_diff_eq!(general, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn residuals_edge_cases() {
        let u = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 4.0]);
        let z = DMatrix::from_element(3, 1, 1.0);
        let y = [5.0, 7.0, 11.0];
        let e = population_residuals(&y, &u, &z, &[2.0], &[3.0]).unwrap();
        assert!(e.iter().all(|v| v.abs() < 1e-15));
        let e = population_residuals(&y, &u, &z, &[0.0], &[0.0]).unwrap();
        assert_eq!(e, y.to_vec());
        assert!(population_residuals(&y, &u, &z, &[0.0, 1.0], &[0.0]).is_err());
    }

    #[test]
    fn causal_residuals_average_to_zero_with_intercept() {
        use crate::population::BinaryPotentialOutcomes;
        let po = PotentialOutcomes::Binary(
            BinaryPotentialOutcomes::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 0.0, 2.0]).unwrap(),
        );
        let z = AttributeMatrix::intercept(4);
        let laws = CauseDistributionSpec::bernoulli(&[0.5; 4]).unwrap();
        let pm = PopulationMoments::new(&po, &z, &laws).unwrap();
        let c = general_estimands(&pm.omega()).unwrap();
        // Expected residual per unit: Σ_u p(u) (Y_i(u) − X_i(u)θ − γ)
        let mut total = 0.0;
        for i in 0..4 {
            for (u, p) in laws.laws()[i].atoms() {
                let x = u[0] - 0.5;
                let y = po.outcome(i, &u).unwrap();
                total += p * (y - x * c.theta[0] - c.gamma[0]);
            }
        }
        assert!((total / 4.0).abs() < 1e-12);
        assert_abs_diff_eq!(c.theta[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn weighted_representation_scalar_cases() {
        let w = vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 3.0)];
        let th = vec![vec![0.0], vec![4.0]];
        assert_abs_diff_eq!(
            weighted_causal_representation(&w, &th, None).unwrap()[0],
            3.0,
            epsilon = 1e-15
        );
        let same = vec![vec![1.25], vec![1.25]];
        assert_abs_diff_eq!(
            weighted_causal_representation(&w, &same, None).unwrap()[0],
            1.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            weighted_causal_representation(&w, &th, Some(&[true, false])).unwrap()[0],
            0.0,
            epsilon = 1e-15
        );
        let zero = vec![DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)];
        assert!(weighted_causal_representation(&zero, &th, None).is_err());
    }

    #[test]
    fn omega_has_zero_xz_block() {
        use crate::population::LinearPotentialOutcomes;
        let z = AttributeMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 5.0],
        ])
        .unwrap();
        let po = PotentialOutcomes::Linear(
            LinearPotentialOutcomes::new(
                vec![vec![1.0], vec![2.0], vec![0.5], vec![-1.0]],
                vec![0.0, 1.0, 2.0, 3.0],
            )
            .unwrap(),
        );
        let laws = CauseDistributionSpec::bernoulli(&[0.1, 0.7, 0.4, 0.9]).unwrap();
        let pm = PopulationMoments::new(&po, &z, &laws).unwrap();
        let omega = pm.omega();
        assert!(omega.xz().iter().all(|v| v.abs() < 1e-10));
        assert_eq!(omega.kind(), MomentKind::Omega);
    }
}
