//! End-to-end solve: grid, weights, composition, assembly, LUP.

use thiserror::Error;

use crate::assembly::{assemble, AssemblyError};
use crate::lup::{lup_decompose, refine_once, LupError};
use crate::problem::{make_grid, DomainError, ProblemSpec, Solution};
use crate::quadrature::{composition_matrix, WeightSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Linear(#[from] LupError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Apply one step of iterative refinement after the LUP solve.
    pub refine: bool,
}

/// Solves the boundary-value problem on `n` uniform intervals.
pub fn solve(spec: &ProblemSpec, n: usize) -> Result<Solution, SolveError> {
    solve_with(spec, n, SolveOptions::default())
}

pub fn solve_with(spec: &ProblemSpec, n: usize, options: SolveOptions) -> Result<Solution, SolveError> {
    let grid = make_grid(n, spec.b())?;
    let weights = WeightSet::new(spec.alpha(), &grid)?;
    let system = {
        let composition = composition_matrix(&weights);
        assemble(spec, &grid, &composition)?
    };
    let factors = lup_decompose(system.matrix())?;
    let mut values = factors.solve(system.rhs())?;
    if options.refine {
        values = refine_once(&factors, system.matrix(), system.rhs(), &values)?;
    }
    Ok(Solution::new(grid, values))
}
