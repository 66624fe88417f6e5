//! LU factorization with partial (row) pivoting.

use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::DenseMatrix;

/// Relative pivot threshold: a pivot smaller than this times the largest
/// entry of the input matrix declares the matrix singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-13;

/// Trailing rows below which the row update stays on the calling thread.
const PARALLEL_ROWS: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LupError {
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is singular: no usable pivot in column {column}")]
    SingularMatrix { column: usize },
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Packed `L` (unit lower, below the diagonal) and `U` (upper, including
/// the diagonal) with `P M = L U`.
#[derive(Debug, Clone, PartialEq)]
pub struct LupFactors {
    lu: DenseMatrix,
    /// `perm[i]` is the row of the original matrix that ended up in row `i`.
    perm: Vec<usize>,
    sign: f64,
}

impl LupFactors {
    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn packed(&self) -> &DenseMatrix {
        &self.lu
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `+1` or `-1` depending on the parity of the row exchanges.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.size();
        let mut l = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.size();
        let mut u = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    /// Rows of `m` reordered by the pivot permutation, i.e. `P m`.
    pub fn permute_rows(&self, m: &DenseMatrix) -> DenseMatrix {
        let rows: Vec<Vec<f64>> = self.perm.iter().map(|&p| m.row(p).to_vec()).collect();
        DenseMatrix::from_rows(&rows)
    }

    pub fn determinant(&self) -> f64 {
        (0..self.size()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LupError> {
        lup_solve(self, rhs)
    }
}

/// Doolittle elimination with row partial pivoting on a copy of `matrix`.
pub fn lup_decompose(matrix: &DenseMatrix) -> Result<LupFactors, LupError> {
    if !matrix.is_square() {
        return Err(LupError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
    }
    if matrix.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(LupError::NonFinite);
    }
    let n = matrix.rows();
    let threshold = SINGULAR_TOLERANCE * matrix.max_abs();
    let mut lu = matrix.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;

    for k in 0..n {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
        if pivot_abs.is_nan() || pivot_abs < threshold || pivot_abs == 0.0 {
            return Err(LupError::SingularMatrix { column: k });
        }
        if pivot_row != k {
            lu.swap_rows(k, pivot_row);
            perm.swap(k, pivot_row);
            sign = -sign;
        }

        let (head, tail) = lu.as_mut_slice().split_at_mut((k + 1) * n);
        let pivot = &head[k * n..(k + 1) * n];
        let eliminate = |row: &mut [f64]| {
            let factor = row[k] / pivot[k];
            row[k] = factor;
            if factor != 0.0 {
                for (r, p) in row[k + 1..].iter_mut().zip(&pivot[k + 1..]) {
                    *r -= factor * p;
                }
            }
        };
        if n - k > PARALLEL_ROWS {
            tail.par_chunks_mut(n).for_each(eliminate);
        } else {
            tail.chunks_mut(n).for_each(eliminate);
        }
    }

    Ok(LupFactors { lu, perm, sign })
}

/// Forward and back substitution against `P M = L U`.
pub fn lup_solve(factors: &LupFactors, rhs: &[f64]) -> Result<Vec<f64>, LupError> {
    let n = factors.size();
    if rhs.len() != n {
        return Err(LupError::DimensionMismatch { expected: n, found: rhs.len() });
    }
    let lu = &factors.lu;
    let mut x: Vec<f64> = factors.perm.iter().map(|&p| rhs[p]).collect();
    for i in 0..n {
        let row = lu.row(i);
        let s: f64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
        x[i] -= s;
    }
    for i in (0..n).rev() {
        let row = lu.row(i);
        let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
        x[i] = (x[i] - s) / row[i];
    }
    Ok(x)
}

/// One step of iterative refinement: solves for the residual correction of
/// `x` against the original `matrix` and `rhs`.
pub fn refine_once(
    factors: &LupFactors,
    matrix: &DenseMatrix,
    rhs: &[f64],
    x: &[f64],
) -> Result<Vec<f64>, LupError> {
    if x.len() != factors.size() {
        return Err(LupError::DimensionMismatch { expected: factors.size(), found: x.len() });
    }
    let mx = matrix.mul_vec(x);
    let residual: Vec<f64> = rhs.iter().zip(&mx).map(|(b, m)| b - m).collect();
    let correction = lup_solve(factors, &residual)?;
    Ok(x.iter().zip(&correction).map(|(a, c)| a + c).collect())
}
