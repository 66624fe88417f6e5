//! Dense linear system for the discrete integral equation
//!
//! ```text
//! f_i + sum_k (lambda + q_k) (A_{i,k} - (i/n)^alpha A_{n,k}) f_k = (i/n)^alpha L
//! ```
//!
//! Rows `0` and `n` reduce to `f_0 = 0` and `f_n = L`; they are assembled
//! from the formula, checked, and then replaced by exact unit rows.

use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::DenseMatrix;
use crate::potential::EvalError;
use crate::problem::{ProblemSpec, UniformGrid};
use crate::quadrature::CompositionMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("potential evaluation failed at node {node}: {source}")]
    Potential {
        node: usize,
        #[source]
        source: EvalError,
    },
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    matrix: DenseMatrix,
    rhs: Vec<f64>,
    grid: UniformGrid,
    boundary_defect: f64,
}

impl LinearSystem {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Largest deviation of the formula-built rows `0` and `n` (matrix and
    /// right-hand side) from `f_0 = 0` and `f_n = L`, measured before they
    /// were overwritten.
    pub fn boundary_defect(&self) -> f64 {
        self.boundary_defect
    }
}

/// `(i/n)^alpha`, exact at both ends.
fn node_ratio_pow(i: usize, n: usize, alpha: f64) -> f64 {
    if i == 0 {
        0.0
    } else if i == n {
        1.0
    } else {
        (i as f64 / n as f64).powf(alpha)
    }
}

/// Column factors `lambda + q(t_k)`.
pub fn column_factors(spec: &ProblemSpec, grid: &UniformGrid) -> Result<Vec<f64>, AssemblyError> {
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(node, &t)| {
            spec.potential()
                .eval(t)
                .map(|q| spec.lambda() + q)
                .map_err(|source| AssemblyError::Potential { node, source })
        })
        .collect()
}

fn unit_row_defect(row: &[f64], rhs: f64, unit: usize, target: f64) -> f64 {
    let matrix_defect = row
        .iter()
        .enumerate()
        .map(|(k, &x)| (x - if k == unit { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    matrix_defect.max((rhs - target).abs())
}

/// Assembles the system. `composition` must be built for `grid` and
/// `spec.alpha()`; a size mismatch panics.
pub fn assemble(
    spec: &ProblemSpec,
    grid: &UniformGrid,
    composition: &CompositionMatrix,
) -> Result<LinearSystem, AssemblyError> {
    let n = grid.n();
    assert_eq!(composition.n(), n, "composition matrix built for a different grid");
    let alpha = spec.alpha();
    let l = spec.right_value();
    let factors = column_factors(spec, grid)?;
    let a = composition.matrix();
    let last = a.row(n);
    let size = n + 1;

    let mut matrix = DenseMatrix::zeros(size, size);
    matrix
        .as_mut_slice()
        .par_chunks_mut(size)
        .enumerate()
        .for_each(|(i, row)| {
            let ratio = node_ratio_pow(i, n, alpha);
            for (k, out) in row.iter_mut().enumerate() {
                let delta = if i == k { 1.0 } else { 0.0 };
                *out = delta + factors[k] * (a[(i, k)] - ratio * last[k]);
            }
        });
    let mut rhs: Vec<f64> = (0..=n).map(|i| node_ratio_pow(i, n, alpha) * l).collect();

    let boundary_defect = unit_row_defect(matrix.row(0), rhs[0], 0, 0.0)
        .max(unit_row_defect(matrix.row(n), rhs[n], n, l));

    for (unit, target) in [(0, 0.0), (n, l)] {
        let row = matrix.row_mut(unit);
        row.fill(0.0);
        row[unit] = 1.0;
        rhs[unit] = target;
    }

    Ok(LinearSystem { matrix, rhs, grid: grid.clone(), boundary_defect })
}
