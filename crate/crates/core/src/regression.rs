//! Least squares on the sample and the partialling-out primitive.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::PivotedQr;

/// Observed sample: outcomes, causes and attributes for the sampled units.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleData {
    y: Vec<f64>,
    u: DMatrix<f64>,
    z: DMatrix<f64>,
    n_population: Option<usize>,
}

impl SampleData {
    /// Column 0 of `z` must be the intercept.
    pub fn new(
        y: Vec<f64>,
        u: DMatrix<f64>,
        z: DMatrix<f64>,
        n_population: Option<usize>,
    ) -> Result<Self> {
        let n = y.len();
        if u.nrows() != n || z.nrows() != n {
            return Err(Error::dim(format!(
                "length mismatch: {n} outcomes, {} cause rows, {} attribute rows",
                u.nrows(),
                z.nrows()
            )));
        }
        let (k, q) = (u.ncols(), z.ncols());
        if k == 0 || q == 0 {
            return Err(Error::invalid("at least one cause and one attribute column are required"));
        }
        if n < k + q {
            return Err(Error::invalid(format!(
                "{n} observations for {} regressors",
                k + q
            )));
        }
        if y.iter().chain(u.as_slice()).chain(z.as_slice()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite value in sample data"));
        }
        if z.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::invalid("missing intercept: attribute column 0 must be all ones"));
        }
        match n_population {
            Some(0) => return Err(Error::invalid("population size must be positive")),
            Some(pop) if pop < n => {
                return Err(Error::invalid(format!(
                    "sample size {n} exceeds population size {pop}"
                )))
            }
            _ => {}
        }
        Ok(Self {
            y,
            u,
            z,
            n_population,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn n_population(&self) -> Option<usize> {
        self.n_population
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    pub fn q(&self) -> usize {
        self.z.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    /// N×k, `U − Z Λ̂'`.
    pub x_hat: DMatrix<f64>,
    /// k×q.
    pub lambda_hat: DMatrix<f64>,
    /// The sample attribute matrix the fit used.
    pub attributes: DMatrix<f64>,
}

impl FitResult {
    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// OLS of `Y` on `[U Z]`. A rank-deficient design reports the first
/// dependent column of the stacked matrix (causes first, then attributes).
pub fn fit_ols(data: &SampleData) -> Result<FitResult> {
    let n = data.len();
    let (k, q) = (data.k(), data.q());
    let mut design = DMatrix::zeros(n, k + q);
    design.columns_mut(0, k).copy_from(&data.u);
    design.columns_mut(k, q).copy_from(&data.z);
    let qr = PivotedQr::new(&design);
    qr.require_full_rank()?;
    let coef = qr.solve_vec(&DVector::from_column_slice(&data.y))?;
    let fitted = &design * &coef;
    let residuals = data.y.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();
    let (x_hat, lambda_hat) = partial_out(&data.u, &data.z)?;
    Ok(FitResult {
        theta_hat: coef.rows(0, k).iter().copied().collect(),
        gamma_hat: coef.rows(k, q).iter().copied().collect(),
        residuals,
        x_hat,
        lambda_hat,
        attributes: data.z.clone(),
    })
}

/// Residuals of each column of `target` after projection on `z`, and the
/// m×q coefficient matrix with `residual = target − z coefᵀ`.
pub fn partial_out(target: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if target.nrows() != z.nrows() {
        return Err(Error::dim(format!(
            "target has {} rows, attributes have {}",
            target.nrows(),
            z.nrows()
        )));
    }
    let coef_t = PivotedQr::new(z).solve(target).map_err(|e| match e {
        Error::RankDeficient { column } => {
            Error::Singular(format!("attribute cross-product is singular (column {column})"))
        }
        other => other,
    })?;
    let residual = target - z * &coef_t;
    Ok((residual, coef_t.transpose()))
}
