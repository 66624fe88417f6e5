//! Independent references: closed-form special cases and a direct
//! product-integration quadrature of the left Riemann-Liouville integral.

use thiserror::Error;

use crate::gamma::gamma;
use crate::problem::ProblemSpec;

/// Absolute (or relative, for values above one) change allowed between two
/// successive resolutions of [`direct_left_integral`].
pub const ORACLE_STABILITY: f64 = 1e-8;

/// Resolution doublings attempted before giving up.
pub const MAX_DOUBLINGS: u32 = 4;

/// Threshold on `|sin(sqrt(-lambda) b)|` below which lambda is resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("closed form needs lambda < 0, got {0}")]
    NotOscillatory(f64),
    #[error("lambda = {lambda} is resonant for b = {b}: sin(sqrt(-lambda) b) vanishes")]
    ResonantLambda { lambda: f64, b: f64 },
    #[error("direct quadrature did not settle: last change {last_change:e} at resolution {resolution}")]
    NonConverged { resolution: usize, last_change: f64 },
    #[error("integrand is not finite at tau = {0}")]
    NonFiniteIntegrand(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Starting number of panels on `[0, t]`.
    pub resolution: usize,
}

impl OracleConfig {
    pub fn new(resolution: usize) -> Self {
        Self { resolution: resolution.max(1) }
    }

    /// At least eight panels per interval of an `n`-interval grid, and never
    /// fewer than 1024.
    pub fn for_grid(n: usize) -> Self {
        Self::new((8 * n).max(1024))
    }

    pub fn covers(&self, n: usize) -> bool {
        self.resolution >= 8 * n
    }
}

/// `L sin(sqrt(-lambda) t) / sin(sqrt(-lambda) b)`: the classical (`alpha = 1`,
/// `q = 0`) solution for `lambda < 0`.
pub fn analytic_alpha1(lambda: f64, b: f64, l: f64, t: f64) -> Result<f64, OracleError> {
    if lambda.is_nan() || lambda >= 0.0 {
        return Err(OracleError::NotOscillatory(lambda));
    }
    let omega = (-lambda).sqrt();
    let denom = (omega * b).sin();
    if denom.abs() < RESONANCE_TOLERANCE {
        return Err(OracleError::ResonantLambda { lambda, b });
    }
    Ok(l * (omega * t).sin() / denom)
}

/// `L (t/b)^alpha`, the exact solution when `lambda + q` vanishes.
pub fn power_law_solution(spec: &ProblemSpec, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    spec.right_value() * (t / spec.b()).powf(spec.alpha())
}

/// `(1 + x)^beta - 1` without cancellation for small `x`.
fn pow1p_m1(x: f64, beta: f64) -> f64 {
    (beta * x.ln_1p()).exp_m1()
}

/// Weights of the product trapezoid rule (piecewise-linear integrand, kernel
/// integrated exactly) at `m` panels, without the `h^alpha / Gamma(alpha+2)`
/// factor. Second differences are formed from `expm1`/`ln_1p` to avoid the
/// cancellation of the textbook form at large `m`.
fn product_trapezoid_weights(m: usize, alpha: f64) -> Vec<f64> {
    let beta = alpha + 1.0;
    let mf = m as f64;
    let mut a = Vec::with_capacity(m + 1);
    a.push(mf.powf(beta) * (pow1p_m1(-1.0 / mf, beta) + beta / mf));
    for j in 1..m {
        let k = (m - j) as f64;
        a.push(k.powf(beta) * (pow1p_m1(1.0 / k, beta) + pow1p_m1(-1.0 / k, beta)));
    }
    a.push(1.0);
    a
}

fn product_trapezoid<F>(phi: &F, alpha: f64, t: f64, panels: usize) -> Result<f64, OracleError>
where
    F: Fn(f64) -> f64,
{
    let h = t / panels as f64;
    let weights = product_trapezoid_weights(panels, alpha);
    let mut sum = 0.0;
    for (j, a) in weights.iter().enumerate() {
        let tau = if j == panels { t } else { j as f64 * h };
        let value = phi(tau);
        if !value.is_finite() {
            return Err(OracleError::NonFiniteIntegrand(tau));
        }
        sum += a * value;
    }
    Ok(h.powf(alpha) / gamma(alpha + 2.0) * sum)
}

/// `(I_{0+}^alpha phi)(t)` by product integration, doubling the panel count
/// until successive values agree to [`ORACLE_STABILITY`].
pub fn direct_left_integral<F>(phi: F, alpha: f64, t: f64, cfg: &OracleConfig) -> Result<f64, OracleError>
where
    F: Fn(f64) -> f64,
{
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mut panels = cfg.resolution;
    let mut previous = product_trapezoid(&phi, alpha, t, panels)?;
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let current = product_trapezoid(&phi, alpha, t, panels)?;
        last_change = (current - previous).abs();
        if last_change < ORACLE_STABILITY * current.abs().max(1.0) {
            return Ok(current);
        }
        previous = current;
    }
    Err(OracleError::NonConverged { resolution: panels, last_change })
}
