//! Descent directions, selectable by name.

use crate::registry::{Named, Registry};

/// A descent strategy in coefficient space.
pub trait DescentMethod: Named + Send + Sync {
    fn start(&self, dim: usize) -> Box<dyn DescentState>;
}

/// Per-run state of a descent method.
pub trait DescentState {
    /// Search direction at a point with gradient `grad`.
    fn direction(&mut self, grad: &[f64]) -> Vec<f64>;
    /// First trial step length for the line search.
    fn initial_step(&self) -> f64;
    /// Record an accepted step `s = t·d` and gradient change `y`.
    fn accept(&mut self, t: f64, s: &[f64], y: &[f64]);
    /// Forget curvature information after a non-descent direction.
    fn reset(&mut self);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Steepest descent; the trial step grows from the last accepted one.
pub struct GradientDescent;

struct GradientState {
    last_step: f64,
}

impl Named for GradientDescent {
    fn name(&self) -> &'static str {
        "gradient-descent"
    }
    fn summary(&self) -> &'static str {
        "steepest descent with Armijo backtracking"
    }
}

impl DescentMethod for GradientDescent {
    fn start(&self, _dim: usize) -> Box<dyn DescentState> {
        Box::new(GradientState { last_step: 0.5 })
    }
}

impl DescentState for GradientState {
    fn direction(&mut self, grad: &[f64]) -> Vec<f64> {
        grad.iter().map(|g| -g).collect()
    }

    fn initial_step(&self) -> f64 {
        2.0 * self.last_step
    }

    fn accept(&mut self, t: f64, _s: &[f64], _y: &[f64]) {
        self.last_step = t;
    }

    fn reset(&mut self) {}
}

/// BFGS on the inverse Hessian, started from a scaled identity.
pub struct Bfgs;

struct BfgsState {
    dim: usize,
    /// Row-major inverse Hessian approximation; `None` until the first step.
    inv_hessian: Option<Vec<f64>>,
}

impl Named for Bfgs {
    fn name(&self) -> &'static str {
        "bfgs"
    }
    fn summary(&self) -> &'static str {
        "BFGS quasi-Newton with Armijo backtracking"
    }
}

impl DescentMethod for Bfgs {
    fn start(&self, dim: usize) -> Box<dyn DescentState> {
        Box::new(BfgsState {
            dim,
            inv_hessian: None,
        })
    }
}

impl DescentState for BfgsState {
    fn direction(&mut self, grad: &[f64]) -> Vec<f64> {
        match &self.inv_hessian {
            None => grad.iter().map(|g| -g).collect(),
            Some(h) => (0..self.dim)
                .map(|i| -dot(&h[i * self.dim..(i + 1) * self.dim], grad))
                .collect(),
        }
    }

    fn initial_step(&self) -> f64 {
        1.0
    }

    fn accept(&mut self, _t: f64, s: &[f64], y: &[f64]) {
        let n = self.dim;
        let sy = dot(s, y);
        if !(sy > 1e-14 * dot(s, s).sqrt() * dot(y, y).sqrt()) {
            return;
        }
        let h = self.inv_hessian.get_or_insert_with(|| {
            let scale = sy / dot(y, y);
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                h[i * n + i] = scale;
            }
            h
        });
        // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
        let rho = 1.0 / sy;
        let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
        let yhy = dot(y, &hy);
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
            }
        }
    }

    fn reset(&mut self) {
        self.inv_hessian = None;
    }
}

pub type MethodRegistry = Registry<dyn DescentMethod>;

/// Registry holding the built-in methods.
pub fn method_registry() -> MethodRegistry {
    let mut r = MethodRegistry::new("descent method");
    r.register(Box::new(Bfgs)).register(Box::new(GradientDescent));
    r
}
