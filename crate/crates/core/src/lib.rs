//! Numerical solution of the fractional Euler-Lagrange / Sturm-Liouville
//! boundary-value problem
//!
//! ```text
//! cD_{b-}^alpha D_{0+}^alpha f(t) + (lambda + q(t)) f(t) = 0,   f(0) = 0,  f(b) = L
//! ```
//!
//! for `alpha` in `(0, 1]`. The problem is recast as the second-kind
//! integral equation
//!
//! ```text
//! f(t) + I_{0+} I_{b-} [(lambda + q) f](t) - (t/b)^alpha I_{0+} I_{b-} [(lambda + q) f](b) = L (t/b)^alpha
//! ```
//!
//! whose fractional integrals are discretized with trapezoid-type weights on
//! a uniform grid. The resulting dense system is solved by LU factorization
//! with partial pivoting.
//!
//! ```
//! use fracsl::{solve, ProblemSpec};
//!
//! let spec = ProblemSpec::oscillator(0.5, -3.0).unwrap();
//! let solution = solve(&spec, 256).unwrap();
//! assert!((solution.at(128) - 4.73052344).abs() < 1e-6);
//! ```

pub mod assembly;
pub mod convergence;
pub mod gamma;
pub mod lup;
pub mod matrix;
pub mod oracle;
pub mod potential;
pub mod problem;
pub mod quadrature;
pub mod solver;

pub use assembly::{assemble, AssemblyError, LinearSystem};
pub use convergence::{
    rate_from_ladder, run_study, ConvergenceRecord, LadderLevel, ProbeFraction, RateError, StudyError,
};
pub use lup::{lup_decompose, lup_solve, LupError, LupFactors};
pub use matrix::DenseMatrix;
pub use potential::{eval_potential, parse_potential, EvalError, ParseError, PotentialExpr};
pub use problem::{make_grid, DomainError, ProblemSpec, Solution, UniformGrid};
pub use quadrature::{
    apply_left_integral, apply_right_integral, composition_matrix, left_weight, right_weight,
    CompositionMatrix, WeightSet,
};
pub use solver::{solve, solve_with, SolveError, SolveOptions};
