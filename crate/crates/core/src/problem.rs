//! Problem definition, uniform grid, and solution containers.

use serde::Serialize;
use thiserror::Error;

use crate::potential::PotentialExpr;

/// Rejected problem or grid parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("fractional order alpha must lie in (0, 1], got {0}")]
    InvalidOrder(f64),
    #[error("domain length b must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("grid needs at least 2 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

/// The boundary-value problem on `[0, b]` with `f(0) = 0`, `f(b) = L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    alpha: f64,
    lambda: f64,
    potential: PotentialExpr,
    b: f64,
    right_value: f64,
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        lambda: f64,
        potential: PotentialExpr,
        b: f64,
        right_value: f64,
    ) -> Result<Self, DomainError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(DomainError::InvalidOrder(alpha));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(DomainError::InvalidLength(b));
        }
        if !lambda.is_finite() {
            return Err(DomainError::NonFinite { name: "lambda", value: lambda });
        }
        if !right_value.is_finite() {
            return Err(DomainError::NonFinite { name: "L", value: right_value });
        }
        Ok(Self { alpha, lambda, potential, b, right_value })
    }

    /// Zero potential, `b = 1`, `L = 1`.
    pub fn oscillator(alpha: f64, lambda: f64) -> Result<Self, DomainError> {
        Self::new(alpha, lambda, PotentialExpr::zero(), 1.0, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn potential(&self) -> &PotentialExpr {
        &self.potential
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Right boundary value `L`.
    pub fn right_value(&self) -> f64 {
        self.right_value
    }
}

/// `n + 1` equally spaced nodes `t_i = i * dt` on `[0, b]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformGrid {
    n: usize,
    b: f64,
    dt: f64,
    nodes: Vec<f64>,
}

impl UniformGrid {
    pub fn new(n: usize, b: f64) -> Result<Self, DomainError> {
        if n < 2 {
            return Err(DomainError::TooFewIntervals(n));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(DomainError::InvalidLength(b));
        }
        let dt = b / n as f64;
        let nf = n as f64;
        let mut nodes: Vec<f64> = (0..=n)
            .map(|i| {
                let i = i as f64;
                let t = i * dt;
                // One correction with the exact residual i*b - n*t brings t
                // to within half an ulp of i*b/n.
                let p = i * b;
                let p_err = i.mul_add(b, -p);
                let residual = (-nf).mul_add(t, p) + p_err;
                t + residual / nf
            })
            .collect();
        nodes[n] = b;
        Ok(Self { n, b, dt, nodes })
    }

    /// Number of intervals; the grid has `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Builds the grid for `n` intervals on `[0, b]`.
pub fn make_grid(n: usize, b: f64) -> Result<UniformGrid, DomainError> {
    UniformGrid::new(n, b)
}

/// Nodal values `f_i` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl Solution {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "one value per grid node");
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at node `i`.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }
}
