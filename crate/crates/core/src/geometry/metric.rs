use std::sync::Arc;

use super::field::{AxisymTensor, OneFormField, ScalarField};
use super::grid::Grid;
use crate::error::{Error, Result};

/// The axisymmetric 2-metric `σ = P² dθ² + Q² sin²θ dφ²`.
///
/// Every derivative is taken in `x = cos θ`; fields that are odd across the
/// poles (one-form components, `u = Q sin θ`) are handled through their
/// `sin θ` factor so no operator ever divides by a vanishing quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymMetric {
    grid: Arc<Grid>,
    p: ScalarField,
    q: ScalarField,
}

impl AxisymMetric {
    pub fn new(grid: Arc<Grid>, p: ScalarField, q: ScalarField) -> Result<Self> {
        let n = grid.n_nodes();
        p.check_len(n)?;
        q.check_len(n)?;
        for (field, values) in [("P", &p), ("Q", &q)] {
            if let Some((node, &value)) = values
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v > 0.0))
            {
                return Err(Error::InvalidData { node, field, value });
            }
        }
        Ok(AxisymMetric { grid, p, q })
    }

    pub fn round_sphere(grid: Arc<Grid>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        let n = grid.n_nodes();
        Self::new(grid, ScalarField::constant(n, radius), ScalarField::constant(n, radius))
    }

    /// Build from profile functions of the colatitude.
    pub fn from_profiles(
        grid: Arc<Grid>,
        p: impl Fn(f64) -> f64,
        q: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let pf = grid.field(p);
        let qf = grid.field(q);
        Self::new(grid, pf, qf)
    }

    /// Metric induced on the surface of revolution with radius `u = sin θ · q(cos θ)`
    /// and height slope `v_θ = sin θ · g(cos θ)`, both given as functions of `x`.
    pub fn from_revolution_profile(
        grid: Arc<Grid>,
        q: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let x = grid.cos_theta();
        let qf = x.map(&q);
        let gf = x.map(&g);
        let a = &x * &qf - grid.sin_sq() * grid.d_x(&qf);
        let p = (&a * &a + grid.sin_sq() * &gf * &gf).sqrt();
        Self::new(grid, p, qf)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }

    pub fn p(&self) -> &ScalarField {
        &self.p
    }

    pub fn q(&self) -> &ScalarField {
        &self.q
    }

    pub fn same_grid(&self, other: &AxisymMetric) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check(&self, f: &ScalarField) -> Result<()> {
        f.check_len(self.n_nodes())
    }

    /// `u_θ` for `u = Q sin θ`, written as `x Q − (1 − x²) Q_x`.
    pub fn u_theta(&self) -> ScalarField {
        let x = self.grid.cos_theta();
        &x * &self.q - self.grid.sin_sq() * self.grid.d_x(&self.q)
    }

    /// `u = Q sin θ`.
    pub fn u(&self) -> ScalarField {
        &self.q * self.grid.sin_theta()
    }

    /// `∫_Σ f dv_σ` with `dv = P Q sin θ dθ dφ`.
    pub fn integrate_surface(&self, f: &ScalarField) -> Result<f64> {
        self.check(f)?;
        Ok(self.grid.sphere_integral(&(f * &self.p * &self.q)))
    }

    pub fn area(&self) -> f64 {
        self.grid.sphere_integral(&(&self.p * &self.q))
    }

    /// `df` as a one-form: `f_θ = −sin θ f_x`.
    pub fn differential(&self, f: &ScalarField) -> Result<OneFormField> {
        self.check(f)?;
        Ok(OneFormField::new(self.grid.d_theta(f)))
    }

    /// `div_σ W = (1 / (P Q sin θ)) ∂_θ(Q sin θ W_θ / P)`, rewritten in `x`
    /// as `−(1 / (P Q)) ∂_x(sin θ Q W_θ / P)`.
    pub fn divergence(&self, w: &OneFormField) -> Result<ScalarField> {
        self.check(&w.theta)?;
        let flux = self.grid.sin_theta() * &self.q * &w.theta / &self.p;
        Ok(-(self.grid.d_x(&flux) / (&self.p * &self.q)))
    }

    /// Laplace–Beltrami operator of `σ`.
    pub fn laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        let flux = &self.q / &self.p * self.grid.sin_sq() * self.grid.d_x(f);
        Ok(self.grid.d_x(&flux) / (&self.p * &self.q))
    }

    /// `|∇f|² = f_θ² / P²`.
    pub fn gradient_norm_sq(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        let fx = self.grid.d_x(f);
        Ok(self.grid.sin_sq() * &fx * &fx / (&self.p * &self.p))
    }

    /// `σ(∇f, ∇g)`.
    pub fn gradient_dot(&self, f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        self.check(g)?;
        let fx = self.grid.d_x(f);
        let gx = self.grid.d_x(g);
        Ok(self.grid.sin_sq() * fx * gx / (&self.p * &self.p))
    }

    /// `ω(∇f) = ω_θ f_θ / P²`.
    pub fn pair(&self, w: &OneFormField, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        self.check(&w.theta)?;
        Ok(&w.theta * self.grid.d_theta(f) / (&self.p * &self.p))
    }

    /// Covariant Hessian `∇_a∇_b f`:
    /// `∇_θ∇_θ f = f_θθ − (P_θ/P) f_θ`, `∇_φ∇_φ f = u u_θ f_θ / P²`.
    pub fn hessian(&self, f: &ScalarField) -> Result<AxisymTensor> {
        self.check(f)?;
        let g = &*self.grid;
        let x = g.cos_theta();
        let s2 = g.sin_sq();
        let fx = g.d_x(f);
        let fxx = g.d_x(&fx);
        let px = g.d_x(&self.p);
        let theta_theta = -(&x * &fx) + &s2 * (fxx - &px * &fx / &self.p);
        let phi_phi = -(&s2 * &self.q * self.u_theta() * &fx / (&self.p * &self.p));
        Ok(AxisymTensor {
            theta_theta,
            phi_phi,
        })
    }

    /// Index-raised diagonal `(σ^{θθ} T_θθ, σ^{φφ} T_φφ)`.
    pub fn raise(&self, t: &AxisymTensor) -> (ScalarField, ScalarField) {
        let s2 = self.grid.sin_sq();
        (
            &t.theta_theta / (&self.p * &self.p),
            &t.phi_phi / (&self.q * &self.q * s2),
        )
    }

    pub fn trace(&self, t: &AxisymTensor) -> ScalarField {
        let (a, b) = self.raise(t);
        a + b
    }

    /// `det(σ^{ac} T_cb)`.
    pub fn mixed_det(&self, t: &AxisymTensor) -> ScalarField {
        let (a, b) = self.raise(t);
        a * b
    }

    /// Intrinsic Gauss curvature, `K = −(1/(P u)) (u_θ / P)_θ = ∂_x(u_θ/P) / (P Q)`.
    pub fn gauss_curvature(&self) -> ScalarField {
        let c = self.u_theta() / &self.p;
        self.grid.d_x(&c) / (&self.p * &self.q)
    }

    /// The metric `σ̂ = σ + dτ ⊗ dτ`, i.e. `P̂² = P² + τ_θ²`.
    pub fn lifted(&self, tau: &ScalarField) -> Result<AxisymMetric> {
        self.check(tau)?;
        let tx = self.grid.d_x(tau);
        let p_hat = (&self.p * &self.p + self.grid.sin_sq() * &tx * &tx).sqrt();
        AxisymMetric::new(self.grid.clone(), p_hat, self.q.clone())
    }

    /// Gauss curvature of `σ + dτ ⊗ dτ` from data of `σ`:
    /// `(1/(1+|∇τ|²)) [K + (1+|∇τ|²)^{-1} det(∇^a∇_b τ)]`.
    pub fn hat_gauss_curvature(&self, tau: &ScalarField) -> Result<ScalarField> {
        let w = self.gradient_norm_sq(tau)? + 1.0;
        let det = self.mixed_det(&self.hessian(tau)?);
        Ok((self.gauss_curvature() + det / &w) / w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::legendre::legendre;

    fn grid(n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(n).unwrap())
    }

    #[test]
    fn sphere_areas() {
        let g = grid(32);
        let unit = AxisymMetric::round_sphere(g.clone(), 1.0).unwrap();
        let one = ScalarField::constant(32, 1.0);
        assert!((unit.integrate_surface(&one).unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-10);
        let r3 = AxisymMetric::round_sphere(g.clone(), 3.0).unwrap();
        assert!((r3.integrate_surface(&one).unwrap() - 36.0 * std::f64::consts::PI).abs() < 1e-10);
        let c2 = g.field(|t| t.cos().powi(2));
        assert!((unit.integrate_surface(&c2).unwrap() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn grid_mismatch_is_dimension_error() {
        let m = AxisymMetric::round_sphere(grid(16), 1.0).unwrap();
        let f = ScalarField::zeros(12);
        assert!(matches!(m.integrate_surface(&f), Err(Error::Dimension { .. })));
        assert!(matches!(m.laplacian(&f), Err(Error::Dimension { .. })));
    }

    #[test]
    fn nonpositive_profiles_rejected() {
        let g = grid(8);
        let p = ScalarField::constant(8, 1.0);
        let mut q = vec![1.0; 8];
        q[3] = 0.0;
        assert!(matches!(
            AxisymMetric::new(g, p, ScalarField::new(q)),
            Err(Error::InvalidData { node: 3, field: "Q", .. })
        ));
    }

    #[test]
    fn laplacian_of_first_harmonic() {
        let g = grid(32);
        for r in [1.0, 2.5] {
            let m = AxisymMetric::round_sphere(g.clone(), r).unwrap();
            let f = g.cos_theta();
            let lap = m.laplacian(&f).unwrap();
            assert!((lap + 2.0 / (r * r) * &f).max_abs() < 1e-9);
        }
    }

    #[test]
    fn laplacian_eigenfields() {
        let g = grid(32);
        for r in [1.0, 3.0] {
            let m = AxisymMetric::round_sphere(g.clone(), r).unwrap();
            for l in 0..=16 {
                let f = g.legendre(l);
                let lap = m.laplacian(&f).unwrap();
                let lam = -((l * (l + 1)) as f64) / (r * r);
                assert!((lap - lam * &f).max_abs() < 1e-8, "l = {l}");
            }
        }
    }

    #[test]
    fn gradient_norm_examples() {
        let g = grid(32);
        let unit = AxisymMetric::round_sphere(g.clone(), 1.0).unwrap();
        let two = AxisymMetric::round_sphere(g.clone(), 2.0).unwrap();
        let f = g.cos_theta();
        let s2 = g.sin_sq();
        assert!((unit.gradient_norm_sq(&f).unwrap() - &s2).max_abs() < 1e-10);
        assert!((two.gradient_norm_sq(&f).unwrap() - &s2 / 4.0).max_abs() < 1e-10);
        assert!(unit.gradient_norm_sq(&ScalarField::constant(32, 7.0)).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn hessian_of_height_function_on_unit_sphere() {
        let g = grid(32);
        let m = AxisymMetric::round_sphere(g.clone(), 1.0).unwrap();
        let f = g.cos_theta();
        let h = m.hessian(&f).unwrap();
        // Hess z = −z σ
        assert!((&h.theta_theta + &f).max_abs() < 1e-9);
        assert!((&h.phi_phi + &f * g.sin_sq()).max_abs() < 1e-9);
        assert!((m.trace(&h) - m.laplacian(&f).unwrap()).max_abs() < 1e-9);
        let zero = m.hessian(&ScalarField::constant(32, 2.0)).unwrap();
        assert!(zero.theta_theta.max_abs() < 1e-10 && zero.phi_phi.max_abs() < 1e-10);
    }

    #[test]
    fn sphere_curvature() {
        let g = grid(32);
        for r in [1.0, 0.5, 4.0] {
            let m = AxisymMetric::round_sphere(g.clone(), r).unwrap();
            assert!((m.gauss_curvature() - 1.0 / (r * r)).max_abs() < 1e-8);
        }
    }

    #[test]
    fn hat_curvature_collapses_for_constant_tau() {
        let g = grid(32);
        let m = AxisymMetric::from_profiles(g.clone(), |t| (1.0 - 0.3 * t.sin().powi(2)).sqrt(), |_| 1.0)
            .unwrap();
        let k = m.gauss_curvature();
        let zero = m.hat_gauss_curvature(&ScalarField::zeros(32)).unwrap();
        let c = m.hat_gauss_curvature(&ScalarField::constant(32, 4.0)).unwrap();
        assert!((&zero - &k).max_abs() < 1e-10);
        assert!((&c - &k).max_abs() < 1e-10);
    }

    #[test]
    fn hat_curvature_matches_assembled_metric() {
        let g = grid(32);
        let m = AxisymMetric::round_sphere(g.clone(), 1.0).unwrap();
        let tau = 0.3 * g.cos_theta();
        let via_formula = m.hat_gauss_curvature(&tau).unwrap();
        let assembled = m.lifted(&tau).unwrap().gauss_curvature();
        assert!((via_formula - assembled).max_abs() < 1e-7);
    }

    #[test]
    fn divergence_of_differential_is_laplacian() {
        let g = grid(32);
        let m = AxisymMetric::from_profiles(g.clone(), |t| (1.0 - 0.3 * t.sin().powi(2)).sqrt(), |_| 1.0)
            .unwrap();
        let f = g.field(|t| legendre(3, t.cos()) + 0.4 * t.cos());
        let lhs = m.divergence(&m.differential(&f).unwrap()).unwrap();
        assert!((lhs - m.laplacian(&f).unwrap()).max_abs() < 1e-10);
    }
}
