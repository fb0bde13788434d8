//! Exact linear algebra over the rationals for the Leibniz probing:
//! an incremental Gaussian eliminator for sparse overdetermined systems
//! and a small dense solver.

use crate::error::CoreError;
use crate::poly::Rational;
use num_traits::{One, Zero};

/// Incremental row-reduction: rows are kept with a unit leading pivot and
/// fully reduced against each other on insertion.
pub struct LinearSolver {
    ncols: usize,
    /// (pivot column, row of length ncols, rhs)
    rows: Vec<(usize, Vec<Rational>, Rational)>,
}

impl LinearSolver {
    pub fn new(ncols: usize) -> Self {
        LinearSolver { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert one equation row . x = rhs.  Errors if it contradicts the
    /// rows already present.
    pub fn add_equation(&mut self, mut row: Vec<Rational>, mut rhs: Rational) -> Result<(), CoreError> {
        assert_eq!(row.len(), self.ncols);
        for (p, r, b) in &self.rows {
            if !row[*p].is_zero() {
                let c = row[*p].clone();
                for j in 0..self.ncols {
                    let v = &r[j] * &c;
                    row[j] -= v;
                }
                rhs -= b * &c;
            }
        }
        match row.iter().position(|v| !v.is_zero()) {
            Some(p) => {
                let inv = row[p].clone();
                for v in row.iter_mut() {
                    *v /= &inv;
                }
                rhs /= &inv;
                // Back-substitute into existing rows to keep them reduced.
                for (_, r, b) in &mut self.rows {
                    if !r[p].is_zero() {
                        let c = r[p].clone();
                        for j in 0..self.ncols {
                            let v = &row[j] * &c;
                            r[j] -= v;
                        }
                        *b -= &rhs * &c;
                    }
                }
                self.rows.push((p, row, rhs));
                Ok(())
            }
            None => {
                if rhs.is_zero() {
                    Ok(())
                } else {
                    Err(CoreError::OrderTooLow(0))
                }
            }
        }
    }

    /// The unique solution; errors if any column lacks a pivot.
    pub fn solve_unique(&self) -> Result<Vec<Rational>, CoreError> {
        let mut out = vec![Rational::zero(); self.ncols];
        let mut seen = vec![false; self.ncols];
        for (p, _, b) in &self.rows {
            out[*p] = b.clone();
            seen[*p] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(out)
        } else {
            Err(CoreError::OrderTooLow(0))
        }
    }
}

/// Solve the square dense system a . x = b exactly; errors when singular.
pub fn solve_dense(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, CoreError> {
    let m = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            assert_eq!(row.len(), m);
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    for col in 0..m {
        let piv = (col..m)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or_else(|| CoreError::Internal("singular probe matrix".into()))?;
        aug.swap(col, piv);
        let inv = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v /= &inv;
        }
        for r in 0..m {
            if r != col && !aug[r][col].is_zero() {
                let c = aug[r][col].clone();
                for j in 0..=m {
                    let v = &aug[col][j] * &c;
                    aug[r][j] -= v;
                }
            }
        }
    }
    Ok(aug.into_iter().map(|row| row[m].clone()).collect())
}

/// Greedily pick `want` column indices of the matrix (rows fixed) so the
/// selected square submatrix is invertible; None if the rank is too low.
pub fn independent_columns(rows: &[Vec<Rational>], want: usize) -> Option<Vec<usize>> {
    let m = rows.len();
    if m < want {
        return None;
    }
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut selected = Vec::new();
    // Working copy, reduced as columns are accepted.
    let mut work: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivot_rows: Vec<usize> = Vec::new();
    for col in 0..ncols {
        if selected.len() == want {
            break;
        }
        // Find a row not yet used as a pivot with a nonzero entry.
        let cand = (0..m).find(|r| !pivot_rows.contains(r) && !work[*r][col].is_zero());
        if let Some(r) = cand {
            // Eliminate this column from all other rows.
            let inv = work[r][col].clone();
            for j in 0..ncols {
                work[r][j] /= &inv;
            }
            for rr in 0..m {
                if rr != r && !work[rr][col].is_zero() {
                    let c = work[rr][col].clone();
                    for j in 0..ncols {
                        let v = &work[r][j] * &c;
                        work[rr][j] -= v;
                    }
                }
            }
            pivot_rows.push(r);
            selected.push(col);
        }
    }
    if selected.len() == want {
        Some(selected)
    } else {
        None
    }
}

pub fn one() -> Rational {
    Rational::one()
}
