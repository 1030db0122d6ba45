//! Dense linear algebra used throughout the crate.
//!
//! Every linear system is solved through [`PivotedQr`], a Householder QR
//! factorization with column pivoting. A column is declared dependent when
//! its pivot falls below [`RANK_TOLERANCE`] times the largest pivot, which
//! makes the rank decision independent of the overall scale of the data.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative pivot tolerance for rank detection.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Householder QR with column pivoting, `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// R in the upper triangle, Householder vectors (without the unit
    /// leading entry) below the diagonal.
    packed: DMatrix<f64>,
    tau: Vec<f64>,
    /// `perm[j]` is the original column placed at position `j`.
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (m, p) = a.shape();
        let mut packed = a.clone();
        let mut perm: Vec<usize> = (0..p).collect();
        let steps = m.min(p);
        let mut tau = vec![0.0; steps];
        let data = packed.as_mut_slice();

        for j in 0..steps {
            // Norms are recomputed rather than downdated; the column counts
            // here are small and this keeps the pivot choice exact.
            let mut best = j;
            let mut best_norm = -1.0;
            for c in j..p {
                let norm: f64 = data[c * m + j..(c + 1) * m].iter().map(|v| v * v).sum();
                if norm > best_norm {
                    best_norm = norm;
                    best = c;
                }
            }
            if best != j {
                let (lo, hi) = data.split_at_mut(best * m);
                lo[j * m..(j + 1) * m].swap_with_slice(&mut hi[..m]);
                perm.swap(j, best);
            }

            let alpha = best_norm.sqrt();
            if alpha == 0.0 {
                tau[j] = 0.0;
                continue;
            }
            let (head, tail) = data.split_at_mut((j + 1) * m);
            let col = &mut head[j * m..];
            let x0 = col[j];
            let beta = if x0 >= 0.0 { -alpha } else { alpha };
            let v0 = x0 - beta;
            for v in &mut col[j + 1..] {
                *v /= v0;
            }
            tau[j] = (beta - x0) / beta;
            col[j] = beta;
            let v = &col[j + 1..];

            for other in tail.chunks_exact_mut(m) {
                let target = &mut other[j..];
                let dot = target[0] + dot(v, &target[1..]);
                let w = tau[j] * dot;
                target[0] -= w;
                for (t, vi) in target[1..].iter_mut().zip(v) {
                    *t -= w * vi;
                }
            }
        }

        let largest = if steps > 0 { packed[(0, 0)].abs() } else { 0.0 };
        let rank = (0..steps)
            .take_while(|&j| largest > 0.0 && packed[(j, j)].abs() > RANK_TOLERANCE * largest)
            .count();

        PivotedQr {
            packed,
            tau,
            perm,
            rank,
        }
    }

    pub fn nrows(&self) -> usize {
        self.packed.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.packed.ncols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Absolute values of the diagonal of R, in pivot order.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.nrows().min(self.ncols()))
            .map(|j| self.packed[(j, j)].abs())
            .collect()
    }

    /// Errors with the first dependent column (original index) if the
    /// factored matrix does not have full column rank.
    pub fn require_full_rank(&self) -> Result<()> {
        if self.rank < self.ncols() {
            let column = self.perm.get(self.rank).copied().unwrap_or(self.rank);
            return Err(Error::RankDeficient { column });
        }
        Ok(())
    }

    /// Overwrites `b` with `Qᵀ b`.
    fn apply_qt(&self, b: &mut DMatrix<f64>) {
        let m = self.nrows();
        let packed = self.packed.as_slice();
        for (j, &t) in self.tau.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let v = &packed[j * m + j + 1..(j + 1) * m];
            for col in b.as_mut_slice().chunks_exact_mut(m) {
                let target = &mut col[j..];
                let w = t * (target[0] + dot(v, &target[1..]));
                target[0] -= w;
                for (x, vi) in target[1..].iter_mut().zip(v) {
                    *x -= w * vi;
                }
            }
        }
    }

    /// Least-squares solution of `A X = B` for every column of `B`.
    pub fn solve(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.nrows() != self.nrows() {
            return Err(Error::dim(format!(
                "right-hand side has {} rows, matrix has {}",
                b.nrows(),
                self.nrows()
            )));
        }
        self.require_full_rank()?;
        let p = self.ncols();
        let mut qtb = b.clone();
        self.apply_qt(&mut qtb);

        let mut x = DMatrix::zeros(p, b.ncols());
        for c in 0..b.ncols() {
            for j in (0..p).rev() {
                let mut s = qtb[(j, c)];
                for l in (j + 1)..p {
                    s -= self.packed[(j, l)] * x[(self.perm[l], c)];
                }
                x[(self.perm[j], c)] = s / self.packed[(j, j)];
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let bm = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
        let x = self.solve(&bm)?;
        Ok(x.column(0).into_owned())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the square system `A X = B`; a singular `A` is reported with `what`.
pub fn solve_square(a: &DMatrix<f64>, b: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::dim(format!("{what} is not square")));
    }
    PivotedQr::new(a).solve(b).map_err(|e| match e {
        Error::RankDeficient { column } => {
            Error::Singular(format!("{what} is singular (dependent column {column})"))
        }
        other => other,
    })
}

pub fn inverse(a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    solve_square(a, &DMatrix::identity(a.nrows(), a.ncols()), what)
}

/// `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(symmetrize(a))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `B A B` for symmetric `B`, symmetrized.
pub fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>) -> DMatrix<f64> {
    symmetrize(&(bread * meat * bread))
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Pairwise (cascade) summation in a fixed tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Reduces `items` with `merge` along a balanced binary tree whose shape
/// depends only on `items.len()`.
pub fn tree_reduce<T, F>(items: &[T], merge: &F) -> Option<T>
where
    T: Clone,
    F: Fn(&T, &T) -> T,
{
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        len => {
            let mid = len / 2;
            let left = tree_reduce(&items[..mid], merge)?;
            let right = tree_reduce(&items[mid..], merge)?;
            Some(merge(&left, &right))
        }
    }
}

/// Row-major copy, the layout used in JSON reports.
pub fn to_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_square_system() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let x_true = DMatrix::from_column_slice(3, 1, &[1.0, -2.0, 0.5]);
        let b = &a * &x_true;
        let x = solve_square(&a, &b, "a").unwrap();
        assert_relative_eq!(x, x_true, epsilon = 1e-13);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let a = DMatrix::from_fn(7, 3, |i, j| ((i * 3 + j * 5) % 7) as f64 + 0.25 * j as f64);
        let b = DMatrix::from_fn(7, 1, |i, _| (i as f64).sin());
        let x = PivotedQr::new(&a).solve(&b).unwrap();
        let ata = a.transpose() * &a;
        let atb = a.transpose() * &b;
        let x_ne = ata.lu().solve(&atb).unwrap();
        assert_relative_eq!(x, x_ne, epsilon = 1e-10);
    }

    #[test]
    fn names_dependent_column() {
        // column 2 = column 0 + column 1
        let a = DMatrix::from_fn(6, 3, |i, j| match j {
            0 => 1.0,
            1 => i as f64,
            _ => 1.0 + i as f64,
        });
        let qr = PivotedQr::new(&a);
        assert_eq!(qr.rank(), 2);
        match qr.require_full_rank() {
            Err(Error::RankDeficient { column }) => assert!(column < 3),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn duplicated_column_is_detected_at_any_scale() {
        for scale in [1e-8, 1.0, 1e8] {
            let a = DMatrix::from_fn(5, 2, |i, _| scale * (i as f64 + 1.0));
            assert_eq!(PivotedQr::new(&a).rank(), 1);
        }
    }

    #[test]
    fn singular_square_reports_name() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = inverse(&a, "H").unwrap_err();
        assert!(matches!(err, Error::Singular(ref m) if m.starts_with("H")));
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }

    #[test]
    fn tree_reduce_shape_is_fixed() {
        let v: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let r = tree_reduce(&v, &|a: &String, b: &String| format!("({a}{b})")).unwrap();
        assert_eq!(r, "((01)(2(34)))");
    }
}
