//! Seeded sample families.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::embed_lifted;
use crate::error::{Error, Result};
use crate::geometry::{legendre::legendre_values, AxisymMetric, Grid, ScalarField};
use crate::optimize::convexity_guard;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Reproducible random axisymmetric metrics and time functions.
pub struct Sampler {
    rng: ChaCha8Rng,
    grid: Arc<Grid>,
}

impl Sampler {
    pub fn new(grid: Arc<Grid>, seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            grid,
        }
    }

    fn coefficients(&mut self, count: usize, half_width: f64) -> Vec<f64> {
        (0..count).map(|_| self.rng.random_range(-half_width..=half_width)).collect()
    }

    /// `Σ_{l=1}^{modes} c_l P_l` with `c_l` uniform in `[−half_width, half_width]`.
    pub fn legendre_box(&mut self, modes: usize, half_width: f64) -> ScalarField {
        let c = self.coefficients(modes, half_width);
        c.iter()
            .enumerate()
            .fold(ScalarField::zeros(self.grid.n_nodes()), |acc, (i, &ci)| {
                acc + ci * self.grid.legendre(i + 1)
            })
    }

    /// Perturbed unit sphere realized as a surface of revolution with radius
    /// `sin θ (1 + Σ ε_l P_l)` and slope `sin θ (1 + Σ δ_l P_l)`, `1 ≤ l ≤ modes`.
    pub fn revolution_metric(&mut self, modes: usize, half_width: f64) -> Result<AxisymMetric> {
        let eps = self.coefficients(modes, half_width);
        let delta = self.coefficients(modes, half_width);
        let series = |c: Vec<f64>| {
            move |x: f64| {
                let p = legendre_values(x, modes);
                1.0 + c.iter().zip(&p[1..]).map(|(a, b)| a * b).sum::<f64>()
            }
        };
        AxisymMetric::from_revolution_profile(self.grid.clone(), series(eps), series(delta))
    }

    /// A `(σ, τ)` pair with `σ + dτ⊗dτ` embeddable and passing the convexity
    /// guard, redrawn until one is found.
    ///
    /// The box is kept to modes `l ≤ 2`: higher modes put branch points of
    /// `√(P̂² − u_θ²)` close to the poles, and 32 nodes then resolve the
    /// embedding identities only to ~1e-6.
    pub fn identity_sample(&mut self) -> Result<(AxisymMetric, ScalarField)> {
        const ATTEMPTS: usize = 1000;
        for _ in 0..ATTEMPTS {
            let m = match self.revolution_metric(2, 0.05) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let tau = self.legendre_box(2, 0.2);
            if convexity_guard(&m, &tau)? > 0.0 && embed_lifted(&m, &tau).is_ok() {
                return Ok((m, tau));
            }
        }
        Err(Error::Missing(format!("no admissible sample in {ATTEMPTS} draws")))
    }
}

/// The fields `c·P_a + d·P_b` over all pairs `(c, d)` from `values`.
pub fn coefficient_box(grid: &Grid, values: &[f64], modes: (usize, usize)) -> Vec<ScalarField> {
    let pa = grid.legendre(modes.0);
    let pb = grid.legendre(modes.1);
    values
        .iter()
        .flat_map(|&c| values.iter().map(move |&d| (c, d)))
        .map(|(c, d)| c * &pa + d * &pb)
        .collect()
}

/// `±{a, b, ...}`.
pub fn symmetric(values: &[f64]) -> Vec<f64> {
    values.iter().flat_map(|&v| [v, -v]).collect()
}
