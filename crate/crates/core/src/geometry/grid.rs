use std::f64::consts::PI;

use super::field::ScalarField;
use super::legendre::{gauss_legendre, legendre_values};
use crate::error::{Error, Result};

/// Dense row-major square operator acting on node values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeOperator {
    n: usize,
    data: Vec<f64>,
}

impl NodeOperator {
    fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        NodeOperator { n, data }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let v = f.values();
        ScalarField::from_fn(self.n, |i| {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            row.iter().zip(v).map(|(a, b)| a * b).sum()
        })
    }
}

/// Gauss–Legendre collocation grid in `x = cos θ`.
///
/// Nodes are ordered by increasing colatitude. Quadrature weights integrate
/// `f(θ) sin θ dθ` over `[0, π]`, i.e. `f dx` over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    x: Vec<f64>,
    theta: Vec<f64>,
    sin_theta: Vec<f64>,
    weights: Vec<f64>,
    diff_x: NodeOperator,
    diff_theta: NodeOperator,
    antideriv: NodeOperator,
    /// `basis[l * n + j] = P_l(x_j)` for `l < n`.
    basis: Vec<f64>,
}

pub const MIN_NODES: usize = 4;
pub const DEFAULT_NODES: usize = 32;

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::param("n", format!("grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        let (x, weights) = gauss_legendre(n);
        let theta: Vec<f64> = x.iter().map(|xi| xi.acos()).collect();
        let sin_theta: Vec<f64> = x.iter().map(|xi| (1.0 - xi * xi).sqrt()).collect();

        // Barycentric weights for polynomial interpolation through the nodes.
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let prod: f64 = (0..n).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
                1.0 / prod
            })
            .collect();
        let mut diff_x = NodeOperator::from_fn(n, |i, j| {
            if i == j {
                0.0
            } else {
                bary[j] / bary[i] / (x[i] - x[j])
            }
        });
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| diff_x.entry(i, j)).sum();
            diff_x.data[i * n + i] = -off;
        }
        let diff_theta = NodeOperator::from_fn(n, |i, j| -sin_theta[i] * diff_x.entry(i, j));

        let mut basis = Vec::with_capacity(n * n);
        let per_node: Vec<Vec<f64>> = x.iter().map(|&xi| legendre_values(xi, n)).collect();
        for l in 0..n {
            for j in 0..n {
                basis.push(per_node[j][l]);
            }
        }

        // Integral from x_i up to the pole x = 1 of the degree n-1 interpolant:
        // ∫_x^1 P_0 = 1 - x and ∫_x^1 P_l = (P_{l-1}(x) - P_{l+1}(x)) / (2l + 1).
        let antideriv = NodeOperator::from_fn(n, |i, j| {
            let p = &per_node[i];
            let mut acc = 0.0;
            for l in 0..n {
                let coeff_weight = (2 * l + 1) as f64 / 2.0 * weights[j] * per_node[j][l];
                let integral = if l == 0 {
                    1.0 - x[i]
                } else {
                    (p[l - 1] - p[l + 1]) / (2 * l + 1) as f64
                };
                acc += coeff_weight * integral;
            }
            acc
        });

        Ok(Grid {
            n,
            x,
            theta,
            sin_theta,
            weights,
            diff_x,
            diff_theta,
            antideriv,
            basis,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    /// Colatitudes, strictly increasing inside `(0, π)`.
    pub fn nodes(&self) -> &[f64] {
        &self.theta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cos_theta(&self) -> ScalarField {
        ScalarField::new(self.x.clone())
    }

    pub fn sin_theta(&self) -> ScalarField {
        ScalarField::new(self.sin_theta.clone())
    }

    /// `1 - cos²θ`, formed without the square root.
    pub fn sin_sq(&self) -> ScalarField {
        ScalarField::from_fn(self.n, |i| 1.0 - self.x[i] * self.x[i])
    }

    /// `d/dθ` on fields smooth in `cos θ`.
    pub fn diff_matrix(&self) -> &NodeOperator {
        &self.diff_theta
    }

    pub fn d_theta(&self, f: &ScalarField) -> ScalarField {
        self.diff_theta.apply(f)
    }

    /// `d/dx` with `x = cos θ`.
    pub fn d_x(&self, f: &ScalarField) -> ScalarField {
        self.diff_x.apply(f)
    }

    /// `F(x_i) = ∫_{x_i}^{1} f(x) dx`, i.e. the θ-antiderivative of `f sin θ`
    /// anchored at the north pole.
    pub fn antiderivative(&self, f: &ScalarField) -> ScalarField {
        self.antideriv.apply(f)
    }

    /// `∫_0^π f(θ) sin θ dθ`.
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        f.values().iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// `P_l(cos θ)` at the nodes; `l` may exceed `n - 1`.
    pub fn legendre(&self, l: usize) -> ScalarField {
        if l < self.n {
            ScalarField::new(self.basis[l * self.n..(l + 1) * self.n].to_vec())
        } else {
            ScalarField::from_fn(self.n, |j| legendre_values(self.x[j], l)[l])
        }
    }

    /// Legendre coefficients `c_l`, `l < n`, of the node interpolant.
    pub fn legendre_coefficients(&self, f: &ScalarField) -> Vec<f64> {
        (0..self.n)
            .map(|l| {
                let p = &self.basis[l * self.n..(l + 1) * self.n];
                let dot: f64 = (0..self.n).map(|j| self.weights[j] * f[j] * p[j]).sum();
                (2 * l + 1) as f64 / 2.0 * dot
            })
            .collect()
    }

    /// Full sphere integral of an axisymmetric density with unit area element.
    pub fn sphere_integral(&self, f: &ScalarField) -> f64 {
        2.0 * PI * self.integrate(f)
    }

    pub fn field(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_fn(self.n, |i| f(self.theta[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_grids() {
        assert!(matches!(Grid::new(3), Err(Error::InvalidParameter { .. })));
        assert!(Grid::new(4).is_ok());
    }

    #[test]
    fn nodes_interior_and_increasing() {
        let g = Grid::new(16).unwrap();
        assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
        assert!(g.nodes()[0] > 0.0 && *g.nodes().last().unwrap() < PI);
    }

    #[test]
    fn constant_integrates_to_two() {
        let g = Grid::new(16).unwrap();
        assert!((g.integrate(&ScalarField::constant(16, 1.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cos_squared_integrates_to_two_thirds() {
        let g = Grid::new(16).unwrap();
        let f = g.field(|t| t.cos().powi(2));
        assert!((g.integrate(&f) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_up_to_degree_2n_minus_1() {
        let n = 16;
        let g = Grid::new(n).unwrap();
        for k in 0..2 * n {
            let f = g.field(|t| t.cos().powi(k as i32));
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((g.integrate(&f) - exact).abs() < 1e-12, "degree {k}");
        }
    }

    #[test]
    fn differentiates_cos_theta() {
        let g = Grid::new(16).unwrap();
        let d = g.d_theta(&g.cos_theta());
        let expected = -g.sin_theta();
        assert!((d - expected).max_abs() < 1e-10);
    }

    #[test]
    fn diff_matrix_annihilates_constants() {
        let g = Grid::new(32).unwrap();
        let d = g.d_theta(&ScalarField::constant(32, 1.0));
        assert!(d.max_abs() < 1e-10);
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let g = Grid::new(24).unwrap();
        // F(x) = ∫_x^1 (3x^2 + 1) dx = 2 - x^3 - x
        let f = g.cos_theta().map(|x| 3.0 * x * x + 1.0);
        let expected = g.cos_theta().map(|x| 2.0 - x * x * x - x);
        assert!((g.antiderivative(&f) - expected).max_abs() < 1e-13);
    }

    #[test]
    fn legendre_coefficients_recover_expansion() {
        let g = Grid::new(20).unwrap();
        let f = 0.3 * g.legendre(1) + (-0.7) * g.legendre(4) + 2.0;
        let c = g.legendre_coefficients(&f);
        assert!((c[0] - 2.0).abs() < 1e-13);
        assert!((c[1] - 0.3).abs() < 1e-13);
        assert!((c[4] + 0.7).abs() < 1e-13);
        assert!(c[2].abs() < 1e-13 && c[7].abs() < 1e-13);
    }
}
