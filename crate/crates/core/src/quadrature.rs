//! Trapezoid-type discretization of the left and right Riemann-Liouville
//! integrals and of their composition.
//!
//! On each panel the integrand is replaced by the mean of its end values and
//! the kernel `|t - tau|^(alpha-1)` is integrated exactly, which gives
//!
//! ```text
//! (I_{0+} phi)(t_i) ~ sum_{j<=i} w_{i,j} phi_j      (I_{b-} phi)(t_i) ~ sum_{j>=i} v_{i,j} phi_j
//! ```
//!
//! with `v_{i,j} = w_{n-i,n-j}`. All weights share the prefactor
//! `dt^alpha / (2 Gamma(alpha + 1))`.

use rayon::prelude::*;

use crate::gamma::gamma;
use crate::matrix::DenseMatrix;
use crate::problem::{DomainError, UniformGrid};

/// `m^alpha` with `0^alpha = 0`.
#[inline]
fn int_pow(m: usize, alpha: f64) -> f64 {
    if m == 0 {
        0.0
    } else {
        (m as f64).powf(alpha)
    }
}

fn weight_scale(alpha: f64, dt: f64) -> f64 {
    dt.powf(alpha) / (2.0 * gamma(alpha + 1.0))
}

/// Bracketed factor of `w_{i,j}` (without the common prefactor).
#[inline]
fn left_bracket(i: usize, j: usize, pow: impl Fn(usize) -> f64) -> f64 {
    assert!(j <= i, "left weight index ({i}, {j}) outside 0 <= j <= i");
    if i == 0 {
        0.0
    } else if j == i {
        1.0
    } else if j == 0 {
        pow(i) - pow(i - 1)
    } else {
        pow(i - j + 1) - pow(i - j - 1)
    }
}

/// Bracketed factor of `v_{i,j}` (without the common prefactor).
#[inline]
fn right_bracket(i: usize, j: usize, n: usize, pow: impl Fn(usize) -> f64) -> f64 {
    assert!(i <= j && j <= n, "right weight index ({i}, {j}) outside i <= j <= {n}");
    if i == n {
        0.0
    } else if j == i {
        1.0
    } else if j == n {
        pow(n - i) - pow(n - i - 1)
    } else {
        pow(j - i + 1) - pow(j - i - 1)
    }
}

/// Left weight `w_{i,j}` for `0 <= j <= i`. Panics outside that triangle.
pub fn left_weight(i: usize, j: usize, alpha: f64, dt: f64) -> f64 {
    weight_scale(alpha, dt) * left_bracket(i, j, |m| int_pow(m, alpha))
}

/// Right weight `v_{i,j}` for `0 <= i <= j <= n`. Panics outside that triangle.
pub fn right_weight(i: usize, j: usize, alpha: f64, dt: f64, n: usize) -> f64 {
    weight_scale(alpha, dt) * right_bracket(i, j, n, |m| int_pow(m, alpha))
}

/// Left and right weight families for one grid and order.
///
/// Weights depend on `i - j` apart from the boundary column, so only the
/// integer powers `m^alpha` are stored; accessors rebuild each weight with
/// the same arithmetic as [`left_weight`] and [`right_weight`].
#[derive(Debug, Clone)]
pub struct WeightSet {
    alpha: f64,
    grid: UniformGrid,
    scale: f64,
    powers: Vec<f64>,
}

impl WeightSet {
    pub fn new(alpha: f64, grid: &UniformGrid) -> Result<Self, DomainError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(DomainError::InvalidOrder(alpha));
        }
        let n = grid.n();
        Ok(Self {
            alpha,
            grid: grid.clone(),
            scale: weight_scale(alpha, grid.dt()),
            powers: (0..=n + 1).map(|m| int_pow(m, alpha)).collect(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Common prefactor `dt^alpha / (2 Gamma(alpha + 1))`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn left(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.n(), "row {i} beyond n = {}", self.n());
        self.scale * left_bracket(i, j, |m| self.powers[m])
    }

    pub fn right(&self, i: usize, j: usize) -> f64 {
        self.scale * right_bracket(i, j, self.n(), |m| self.powers[m])
    }
}

/// Discrete left integral: `g_i = sum_{j<=i} phi_j w_{i,j}`.
pub fn apply_left_integral(phi: &[f64], ws: &WeightSet) -> Vec<f64> {
    let n = ws.n();
    assert_eq!(phi.len(), n + 1, "phi needs one value per node");
    (0..=n)
        .map(|i| (0..=i).fold(0.0, |acc, j| acc + phi[j] * ws.left(i, j)))
        .collect()
}

/// Discrete right integral: `g_i = sum_{j>=i} phi_j v_{i,j}`, summed from
/// `j = n` down so that it mirrors [`apply_left_integral`] bit for bit.
pub fn apply_right_integral(phi: &[f64], ws: &WeightSet) -> Vec<f64> {
    let n = ws.n();
    assert_eq!(phi.len(), n + 1, "phi needs one value per node");
    (0..=n)
        .map(|i| (i..=n).rev().fold(0.0, |acc, j| acc + phi[j] * ws.right(i, j)))
        .collect()
}

/// Dense matrix of the discrete composition `I_{0+} I_{b-}`:
/// `A_{i,k} = sum_{j=0}^{min(i,k)} w_{i,j} v_{j,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionMatrix {
    matrix: DenseMatrix,
}

impl CompositionMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.matrix[(i, k)]
    }

    /// Number of grid intervals `n`; the matrix is `(n+1) x (n+1)`.
    pub fn n(&self) -> usize {
        self.matrix.rows() - 1
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(phi)
    }
}

/// Builds `A = W V` row by row. For every entry the sum over `j` runs in
/// ascending order.
pub fn composition_matrix(ws: &WeightSet) -> CompositionMatrix {
    let n = ws.n();
    let size = n + 1;
    // v_{j,k} for j < k < n only depends on k - j; lagged[0] is the diagonal.
    let lagged: Vec<f64> = (0..n).map(|m| ws.right(0, m)).collect();
    let last_column: Vec<f64> = (0..=n).map(|j| ws.right(j, n)).collect();

    let mut matrix = DenseMatrix::zeros(size, size);
    matrix
        .as_mut_slice()
        .par_chunks_mut(size)
        .enumerate()
        .for_each(|(i, row)| {
            for j in 0..=i {
                let w = ws.left(i, j);
                let (interior, last) = row[j..].split_at_mut(n - j);
                for (r, v) in interior.iter_mut().zip(&lagged) {
                    *r += w * v;
                }
                last[0] += w * last_column[j];
            }
        });
    CompositionMatrix { matrix }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::make_grid;
    use approx::assert_relative_eq;

    fn weights(alpha: f64, n: usize, b: f64) -> WeightSet {
        WeightSet::new(alpha, &make_grid(n, b).unwrap()).unwrap()
    }

    #[test]
    fn left_weight_examples() {
        assert_eq!(left_weight(0, 0, 0.4, 0.1), 0.0);
        assert_relative_eq!(left_weight(3, 1, 1.0, 0.1), 0.1, max_relative = 1e-15);
        let expected = 0.5 / std::f64::consts::PI.sqrt();
        assert_relative_eq!(left_weight(2, 2, 0.5, 0.25), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 0.282_094_791_8, max_relative = 1e-10);
    }

    #[test]
    fn right_weight_examples() {
        assert_eq!(right_weight(4, 4, 0.7, 0.25, 4), 0.0);
        assert_relative_eq!(right_weight(1, 2, 1.0, 0.1, 4), 0.1, max_relative = 1e-15);
    }

    #[test]
    #[should_panic]
    fn left_weight_above_diagonal_is_a_contract_violation() {
        left_weight(1, 2, 0.5, 0.1);
    }

    #[test]
    #[should_panic]
    fn right_weight_below_diagonal_is_a_contract_violation() {
        right_weight(2, 1, 0.5, 0.1, 4);
    }

    #[test]
    fn mirror_symmetry_exhaustive_small_grids() {
        for n in 2..=16 {
            for &alpha in &[0.1, 0.3, 0.5, 0.77, 1.0] {
                let dt = 1.0 / n as f64;
                let ws = weights(alpha, n, 1.0);
                for i in 0..=n {
                    for j in i..=n {
                        let v = right_weight(i, j, alpha, dt, n);
                        assert_eq!(v.to_bits(), left_weight(n - i, n - j, alpha, dt).to_bits());
                        assert_eq!(v.to_bits(), ws.right(i, j).to_bits());
                        assert_eq!(ws.left(n - i, n - j).to_bits(), v.to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_one_gives_composite_trapezoid() {
        let n = 8;
        let ws = weights(1.0, n, 1.0);
        let h = 1.0 / n as f64;
        for i in 1..=n {
            for j in 0..=i {
                let expected = if j == 0 || j == i { h / 2.0 } else { h };
                assert_eq!(ws.left(i, j), expected, "w[{i}][{j}]");
            }
        }
    }

    #[test]
    fn linear_integrand_with_alpha_one() {
        let ws = weights(1.0, 4, 1.0);
        let phi: Vec<f64> = ws.grid().nodes().to_vec();
        let g = apply_left_integral(&phi, &ws);
        for (gi, t) in g.iter().zip(ws.grid().nodes()) {
            assert_relative_eq!(*gi, t * t / 2.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let ws = weights(0.4, 10, 2.0);
        let zeros = vec![0.0; 11];
        assert!(apply_left_integral(&zeros, &ws).iter().all(|&x| x == 0.0));
        assert!(apply_right_integral(&zeros, &ws).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn three_node_composition_alpha_one() {
        let ws = weights(1.0, 2, 1.0);
        let a = composition_matrix(&ws);
        let ones = vec![1.0; 3];
        let right = apply_right_integral(&ones, &ws);
        assert_eq!(right, vec![1.0, 0.5, 0.0]);
        let composed = a.apply(&ones);
        assert_eq!(composed[0], 0.0);
        assert_relative_eq!(composed[1], 0.375, epsilon = 1e-16);
        assert_relative_eq!(composed[2], 0.5, epsilon = 1e-16);
    }

    #[test]
    fn composition_row_zero_vanishes() {
        let a = composition_matrix(&weights(0.35, 33, 1.5));
        assert!(a.matrix().row(0).iter().all(|&x| x == 0.0));
        assert!(a.matrix().as_slice().iter().all(|&x| x >= 0.0));
    }

    #[test]
    #[should_panic]
    fn length_mismatch_is_a_contract_violation() {
        apply_left_integral(&[1.0, 2.0], &weights(0.5, 4, 1.0));
    }

    #[test]
    fn rejects_invalid_order() {
        let g = make_grid(4, 1.0).unwrap();
        assert!(WeightSet::new(0.0, &g).is_err());
        assert!(WeightSet::new(1.5, &g).is_err());
    }
}
