//! Quasi-local energy `E(Σ, τ)`, the gauge energy `Ẽ`, and the optimal
//! embedding residual.
//!
//! The physical term is evaluated with the `−∇τ·∇θ` contribution integrated
//! by parts:
//!
//! ```text
//! E = ∫_{Σ̂_τ} Ĥ dv̂ − ∫_Σ [ √((1+|∇τ|²)|H|² + (Δτ)²)
//!                          − Δτ asinh(Δτ / (|H|√(1+|∇τ|²)))
//!                          − α_H(∇τ) ] dv
//! ```
//!
//! No `1/(8π)` normalization is applied.

use crate::embedding::{embed_lifted, ExtrinsicData, LorentzSurface, MeanCurvatureFrame};
use crate::error::{Error, Result};
use crate::geometry::{AxisymMetric, OneFormField, ScalarField};
use crate::physdata::PhysicalData;

/// Sign relating the residual to the first variation:
/// `d/ds E(Σ, τ + s δτ)|₀ = RESIDUAL_SIGN · ∫_Σ residual · δτ dv`.
pub const RESIDUAL_SIGN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyBreakdown {
    pub reference_term: f64,
    pub physical_term: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(reference_term: f64, physical_term: f64) -> Self {
        EnergyBreakdown {
            reference_term,
            physical_term,
            total: reference_term - physical_term,
        }
    }
}

/// `⟨H, e₃⟩` and `α_{e₃}` for a choice of spacelike normal `e₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeData {
    pub inner_h: ScalarField,
    pub alpha: OneFormField,
}

impl GaugeData {
    /// The `ĕ₃` gauge of `Σ_τ`: the outward normal of `Σ̂_τ` carried along `T₀`.
    pub fn breve(ext: &ExtrinsicData) -> Self {
        GaugeData {
            inner_h: ext.breve_h.clone(),
            alpha: ext.breve_alpha.clone(),
        }
    }

    /// The mean-curvature gauge `e₃ = −H/|H|`.
    pub fn mean_curvature(frame: &MeanCurvatureFrame) -> Self {
        GaugeData {
            inner_h: -&frame.norm_h,
            alpha: frame.alpha_h.clone(),
        }
    }

    /// The canonical gauge for `f`: `e₃` boosted by the angle `θ` with
    /// `sinh θ = −Δf/(|H|√(1+|∇f|²))`, so that `⟨H, e₃⟩ = −|H| cosh θ` and
    /// `α_{e₃} = α_H + dθ`.
    pub fn canonical(data: &PhysicalData, f: &ScalarField) -> Result<Self> {
        let b = Boost::new(data, f)?;
        let m = &data.metric;
        let dtheta = m.differential(&b.angle())?;
        Ok(GaugeData {
            inner_h: -(&b.cosh * &data.norm_h),
            alpha: OneFormField::new(&data.alpha_h.theta + &dtheta.theta),
        })
    }
}

/// Boost-angle data of `(Σ, |H|)` against a time function.
struct Boost {
    lapse: ScalarField,
    lap_tau: ScalarField,
    sinh: ScalarField,
    cosh: ScalarField,
}

impl Boost {
    fn new(data: &PhysicalData, tau: &ScalarField) -> Result<Self> {
        let m = &data.metric;
        check_mean_curvature(data)?;
        let lapse = (m.gradient_norm_sq(tau)? + 1.0).sqrt();
        let lap_tau = m.laplacian(tau)?;
        let sinh = -(&lap_tau / (&data.norm_h * &lapse));
        let cosh = (&sinh * &sinh + 1.0).sqrt();
        Ok(Boost {
            lapse,
            lap_tau,
            sinh,
            cosh,
        })
    }

    fn angle(&self) -> ScalarField {
        self.sinh.map(f64::asinh)
    }
}

fn check_mean_curvature(data: &PhysicalData) -> Result<()> {
    let (node, min) = data.norm_h.argmin();
    if !(min > 0.0) {
        return Err(Error::InvalidData {
            node,
            field: "normH",
            value: min,
        });
    }
    Ok(())
}

fn reference_term(surface: &LorentzSurface) -> Result<f64> {
    let hhat = surface.projected.mean_curvature();
    surface.projected.metric.integrate_surface(&hhat)
}

/// Quasi-local energy in the integrated-by-parts form.
pub fn qle(d: &PhysicalData, tau: &ScalarField) -> Result<EnergyBreakdown> {
    let m = &d.metric;
    let b = Boost::new(d, tau)?;
    let surface = embed_lifted(m, tau)?;
    let reference = reference_term(&surface)?;
    let scaled_h = &d.norm_h * &b.lapse;
    let root = (&scaled_h * &scaled_h + &b.lap_tau * &b.lap_tau).sqrt();
    let boost_term = &b.lap_tau * (&b.lap_tau / &scaled_h).map(f64::asinh);
    let integrand = root - boost_term - m.pair(&d.alpha_h, tau)?;
    Ok(EnergyBreakdown::new(reference, m.integrate_surface(&integrand)?))
}

/// Quasi-local energy with `√(1+|∇τ|²) cosh θ |H| − ∇τ·∇θ − α_H(∇τ)` evaluated
/// directly.
pub fn qle_literal(d: &PhysicalData, tau: &ScalarField) -> Result<EnergyBreakdown> {
    let m = &d.metric;
    let b = Boost::new(d, tau)?;
    let surface = embed_lifted(m, tau)?;
    let reference = reference_term(&surface)?;
    let integrand =
        &b.lapse * &b.cosh * &d.norm_h - m.gradient_dot(tau, &b.angle())? - m.pair(&d.alpha_h, tau)?;
    Ok(EnergyBreakdown::new(reference, m.integrate_surface(&integrand)?))
}

/// `h(Σ, i, f, e₃) = −√(1+|∇f|²) ⟨H, e₃⟩ − α_{e₃}(∇f)`.
pub fn generalized_mean_curvature(g: &GaugeData, m: &AxisymMetric, f: &ScalarField) -> Result<ScalarField> {
    g.inner_h.check_len(m.n_nodes())?;
    let lapse = (m.gradient_norm_sq(f)? + 1.0).sqrt();
    Ok(-(lapse * &g.inner_h) - m.pair(&g.alpha, f)?)
}

/// `Ẽ(Σ, e₃, f) = ∫_{Σ̂_f} Ĥ_f dv̂ − ∫_Σ h(Σ, i, f, e₃) dv`, with `σ` taken
/// from `surface`.
pub fn tilde_energy(surface: &LorentzSurface, g: &GaugeData, f: &ScalarField) -> Result<f64> {
    let m = &surface.base_metric;
    let reference = reference_term(&embed_lifted(m, f)?)?;
    let h = generalized_mean_curvature(g, m, f)?;
    Ok(reference - m.integrate_surface(&h)?)
}

/// Left-hand side of the optimal embedding equation at `τ`:
///
/// ```text
/// −(Ĥσ̂^{ab} − σ̂^{ac}σ̂^{bd}ĥ_cd) ∇_b∇_a τ / √(1+|∇τ|²)
///   + div_σ(∇τ cosh θ |H| / √(1+|∇τ|²) − ∇θ − α_H)
/// ```
pub fn residual(d: &PhysicalData, tau: &ScalarField) -> Result<ScalarField> {
    let m = &d.metric;
    let b = Boost::new(d, tau)?;
    let surface = embed_lifted(m, tau)?;
    let (k1, k2) = surface.projected.principal_curvatures();
    let p_hat = surface.projected.metric.p();
    let u = m.u();
    let hess = m.hessian(tau)?;
    // On a diagonal metric, Ĥσ̂^{θθ} − (σ̂^{θθ})²ĥ_θθ = κ̂₂/P̂², and likewise κ̂₁/u² for φφ.
    let contraction = k2 * &hess.theta_theta / (p_hat * p_hat) + k1 * &hess.phi_phi / (&u * &u);
    let first = -(contraction / &b.lapse);

    let tau_theta = m.differential(tau)?.theta;
    let angle_theta = m.differential(&b.angle())?.theta;
    let flux = tau_theta * &b.cosh * &d.norm_h / &b.lapse - angle_theta - &d.alpha_h.theta;
    Ok(first + m.divergence(&OneFormField::new(flux))?)
}

/// The first variation of `E` along `δτ`, assembled from the residual.
pub fn first_variation(d: &PhysicalData, tau: &ScalarField, delta: &ScalarField) -> Result<f64> {
    let r = residual(d, tau)?;
    Ok(RESIDUAL_SIGN * d.metric.integrate_surface(&(r * delta))?)
}

fn check_curvatures(h_big: f64, h_small: f64) -> Result<()> {
    if !(h_big > 0.0) {
        return Err(Error::param("H_big", format!("must be positive, got {h_big}")));
    }
    if !(h_small > 0.0) {
        return Err(Error::param("H_small", format!("must be positive, got {h_small}")));
    }
    Ok(())
}

/// The scalar comparison function minimized at `x = x0` when `H_big > H_small`.
pub fn comparison_f(x: f64, x0: f64, h_big: f64, h_small: f64) -> Result<f64> {
    check_curvatures(h_big, h_small)?;
    let shift = (x / h_big).asinh() - (x / h_small).asinh() - (x0 / h_big).asinh() + (x0 / h_small).asinh();
    Ok(h_big.hypot(x) - h_small.hypot(x) - x * shift)
}

pub fn comparison_f_prime(x: f64, x0: f64, h_big: f64, h_small: f64) -> Result<f64> {
    check_curvatures(h_big, h_small)?;
    Ok((x / h_small).asinh() - (x / h_big).asinh() + (x0 / h_big).asinh() - (x0 / h_small).asinh())
}
