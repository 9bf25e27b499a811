//! Closed-form isometric embeddings of axisymmetric metrics.
//!
//! A metric `σ = P² dθ² + Q² sin²θ dφ²` is realized in Euclidean 3-space as
//! `(u sin φ, u cos φ, v)` with `u = Q sin θ` and `v_θ = √(P² − u_θ²)`. The
//! Minkowski surface with time function `τ` is `(τ, u sin φ, u cos φ, ṽ)`
//! where `(u, ṽ)` embeds `σ + dτ ⊗ dτ`.
//!
//! Normal-bundle quantities are evaluated in the meridian frame
//! `(T₀, ρ̂, ẑ)`, where the surface, its mean curvature vector and both
//! normal frames live at fixed `φ`.

use crate::error::{Error, Result};
use crate::geometry::{AxisymMetric, AxisymTensor, OneFormField, ScalarField};

/// Embedded surface of revolution realizing `metric`.
///
/// The height slope is stored in reduced form `g = v_θ / sin θ`, which is
/// smooth in `cos θ`; `v` is anchored to zero at `θ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionSurface {
    pub metric: AxisymMetric,
    u_theta: ScalarField,
    slope: ScalarField,
    v: ScalarField,
}

impl RevolutionSurface {
    fn from_slope(metric: AxisymMetric, slope: ScalarField) -> Self {
        let u_theta = metric.u_theta();
        let v = metric.grid().antiderivative(&slope);
        RevolutionSurface {
            metric,
            u_theta,
            slope,
            v,
        }
    }

    /// Cylindrical radius `u = Q sin θ`.
    pub fn u(&self) -> ScalarField {
        self.metric.u()
    }

    pub fn u_theta(&self) -> &ScalarField {
        &self.u_theta
    }

    /// Height `v`, with `v = 0` at the `θ = 0` pole.
    pub fn v(&self) -> &ScalarField {
        &self.v
    }

    pub fn v_theta(&self) -> ScalarField {
        &self.slope * self.metric.grid().sin_theta()
    }

    /// `v_θ / sin θ`.
    pub fn reduced_slope(&self) -> &ScalarField {
        &self.slope
    }

    /// Meridian and parallel principal curvatures for the outward normal.
    pub fn principal_curvatures(&self) -> (ScalarField, ScalarField) {
        let grid = self.metric.grid();
        let x = grid.cos_theta();
        let s2 = grid.sin_sq();
        let p = self.metric.p();
        let a = &self.u_theta;
        let g = &self.slope;
        let gx = grid.d_x(g);
        let ax = grid.d_x(a);
        // u_θ v_θθ − v_θ u_θθ with v_θθ = x g − (1−x²) g_x and u_θθ = −sin θ a_x
        let numerator = a * (&x * g - &s2 * &gx) + &s2 * g * &ax;
        let meridian = numerator / p.powi(3);
        let parallel = g / (p * self.metric.q());
        (meridian, parallel)
    }

    /// `h_ab` with respect to the outward normal: `h_θθ = κ₁ P²`, `h_φφ = κ₂ u²`.
    pub fn second_fundamental_form(&self) -> AxisymTensor {
        let (k1, k2) = self.principal_curvatures();
        let p = self.metric.p();
        let u = self.u();
        AxisymTensor {
            theta_theta: k1 * p * p,
            phi_phi: k2 * &u * &u,
        }
    }

    /// Mean curvature, positive on round spheres.
    pub fn mean_curvature(&self) -> ScalarField {
        let (k1, k2) = self.principal_curvatures();
        k1 + k2
    }

    /// Gauss curvature as the determinant of the shape operator.
    pub fn extrinsic_gauss_curvature(&self) -> ScalarField {
        let (k1, k2) = self.principal_curvatures();
        k1 * k2
    }

    /// Max deviation of the induced metric from `σ`, using the spectral
    /// derivative of the stored height.
    pub fn isometry_residual(&self) -> f64 {
        let grid = self.metric.grid();
        let vt = grid.d_theta(&self.v);
        let p = self.metric.p();
        let tt = &self.u_theta * &self.u_theta + &vt * &vt - p * p;
        let u = self.u();
        let q = self.metric.q();
        let pp = &u * &u - q * q * grid.sin_sq();
        tt.max_abs().max(pp.max_abs())
    }
}

fn check_embeddable(metric: &AxisymMetric, a: &ScalarField) -> Result<ScalarField> {
    let grid = metric.grid();
    let p = metric.p();
    let margin = p * p - a * a;
    let (node, min) = margin.argmin();
    if !(min > 0.0) {
        return Err(Error::NonEmbeddable {
            node,
            theta: grid.nodes()[node],
            margin: min,
        });
    }
    Ok(margin)
}

/// Embed `σ` as a convex surface of revolution in Euclidean 3-space.
pub fn embed_r3(metric: &AxisymMetric) -> Result<RevolutionSurface> {
    let a = metric.u_theta();
    let margin = check_embeddable(metric, &a)?;
    let slope = (margin / metric.grid().sin_sq()).sqrt();
    Ok(RevolutionSurface::from_slope(metric.clone(), slope))
}

/// Spacelike surface in Minkowski space with time function `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzSurface {
    pub base_metric: AxisymMetric,
    pub tau: ScalarField,
    /// Projection onto the complement of `T₀`, which realizes `σ + dτ ⊗ dτ`.
    pub projected: RevolutionSurface,
}

impl LorentzSurface {
    /// Max deviation of `−τ_θ² + u_θ² + ṽ_θ²` from `P²`.
    pub fn minkowski_isometry_residual(&self) -> f64 {
        let grid = self.base_metric.grid();
        let tt = grid.d_theta(&self.tau);
        let vt = grid.d_theta(self.projected.v());
        let a = self.projected.u_theta();
        let p = self.base_metric.p();
        let res = -(&tt * &tt) + a * a + &vt * &vt - p * p;
        res.max_abs()
    }

    /// `√(1 + |∇τ|²)` with the gradient taken in `σ`.
    pub fn lapse(&self) -> ScalarField {
        (self.base_metric.gradient_norm_sq(&self.tau).unwrap() + 1.0).sqrt()
    }
}

/// Build `Σ_τ` from `σ` and a time function.
pub fn embed_lifted(metric: &AxisymMetric, tau: &ScalarField) -> Result<LorentzSurface> {
    let lifted = metric.lifted(tau)?;
    let projected = embed_r3(&lifted)?;
    Ok(LorentzSurface {
        base_metric: metric.clone(),
        tau: tau.clone(),
        projected,
    })
}

/// Mean-curvature normal frame `e₃ = −H/|H|`, `e₄` future timelike.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurvatureFrame {
    pub norm_h: ScalarField,
    pub alpha_h: OneFormField,
}

/// Extrinsic data of `Σ_τ` and its projection `Σ̂_τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrinsicData {
    /// Second fundamental form of `Σ̂_τ`.
    pub hhat: AxisymTensor,
    /// Principal curvatures `(κ̂₁, κ̂₂)` of `Σ̂_τ`.
    pub hhat_principal: (ScalarField, ScalarField),
    /// Mean curvature `Ĥ` of `Σ̂_τ`.
    pub hhat_mean: ScalarField,
    /// `H_τ = Δ_σ X` in the meridian frame: `(Δτ, Δ_σ u − u/(Q² sin²θ), Δṽ)`.
    pub mean_vector: [ScalarField; 3],
    /// `⟨H_τ, H_τ⟩`.
    pub mean_sq: ScalarField,
    frame: Option<MeanCurvatureFrame>,
    /// `⟨H_τ, ĕ₃⟩`.
    pub breve_h: ScalarField,
    /// `α_{ĕ₃}`.
    pub breve_alpha: OneFormField,
}

impl ExtrinsicData {
    pub fn frame(&self) -> Option<&MeanCurvatureFrame> {
        self.frame.as_ref()
    }

    /// The mean-curvature frame, or the first node where `H_τ` fails to be spacelike.
    pub fn require_frame(&self, grid_nodes: &[f64]) -> Result<&MeanCurvatureFrame> {
        match &self.frame {
            Some(f) => Ok(f),
            None => {
                let (node, mean_sq) = self.mean_sq.argmin();
                Err(Error::NonSpacelike {
                    node,
                    theta: grid_nodes[node],
                    mean_sq,
                })
            }
        }
    }
}

type Vec3 = [f64; 3];

fn minkowski(a: &Vec3, b: &Vec3) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Future unit timelike vector orthogonal to `tangent` and `normal` in the
/// `(t, ρ, z)` slice of Minkowski space.
fn timelike_normal(tangent: &Vec3, normal: &Vec3) -> Vec3 {
    let c = [
        tangent[1] * normal[2] - tangent[2] * normal[1],
        tangent[2] * normal[0] - tangent[0] * normal[2],
        tangent[0] * normal[1] - tangent[1] * normal[0],
    ];
    let w = [-c[0], c[1], c[2]];
    let norm = (-minkowski(&w, &w)).sqrt();
    let sign = if w[0] >= 0.0 { 1.0 } else { -1.0 };
    [sign * w[0] / norm, sign * w[1] / norm, sign * w[2] / norm]
}

/// `∂_θ (sin θ · r)` for `r` smooth in `cos θ`.
fn d_theta_odd(metric: &AxisymMetric, r: &ScalarField) -> ScalarField {
    let grid = metric.grid();
    grid.cos_theta() * r - grid.sin_sq() * grid.d_x(r)
}

/// `(Δ_σ u − u/(Q² sin²θ)) / sin θ`, the reduced horizontal component of `H_τ`.
///
/// `slope_sq` is `v_θ² / sin²θ` for the height of `σ` itself, which may be
/// negative when only `σ + dτ⊗dτ` is embeddable.
fn horizontal_mean_reduced(metric: &AxisymMetric, slope_sq: &ScalarField) -> ScalarField {
    let grid = metric.grid();
    let p = metric.p();
    let q = metric.q();
    let a = metric.u_theta();
    let qx = grid.d_x(q);
    let b = q * &a / p;
    let bx = grid.d_x(&b);
    ((&a * &qx - slope_sq) / p - bx) / (p * q)
}

/// `Δ_σ v` for a height with reduced slope `g` (`v_x = −g`).
fn height_laplacian(metric: &AxisymMetric, slope: &ScalarField) -> ScalarField {
    let grid = metric.grid();
    let flux = -(metric.q() / metric.p() * grid.sin_sq() * slope);
    grid.d_x(&flux) / (metric.p() * metric.q())
}

/// Second fundamental form, mean curvature vector, and both normal frames of `Σ_τ`.
pub fn extrinsic_data(surface: &LorentzSurface) -> Result<ExtrinsicData> {
    let m = &surface.base_metric;
    let grid = m.grid();
    let n = grid.n_nodes();
    let tau = &surface.tau;
    let proj = &surface.projected;
    let p_hat = proj.metric.p();
    let sin = grid.sin_theta();

    let (k1, k2) = proj.principal_curvatures();
    let hhat = proj.second_fundamental_form();
    let hhat_mean = &k1 + &k2;

    let tau_x = grid.d_x(tau);
    let g_hat = proj.reduced_slope();
    let base_slope_sq = g_hat * g_hat - &tau_x * &tau_x;

    let lap_tau = m.laplacian(tau)?;
    let lu_reduced = horizontal_mean_reduced(m, &base_slope_sq);
    let lu = &lu_reduced * &sin;
    let lap_vt = height_laplacian(m, g_hat);
    let mean_sq = &lu * &lu + &lap_vt * &lap_vt - &lap_tau * &lap_tau;

    let a = proj.u_theta();
    let tau_theta = -(&sin * &tau_x);
    let tangent = |j: usize| -> Vec3 { [tau_theta[j], a[j], sin[j] * g_hat[j]] };

    let frame = if mean_sq.min() > 0.0 {
        let norm_h = mean_sq.sqrt();
        let e3_t = -(&lap_tau / &norm_h);
        let e3_rho_reduced = -(&lu_reduced / &norm_h);
        let e3_z = -(&lap_vt / &norm_h);
        let de3_t = grid.d_theta(&e3_t);
        let de3_rho = d_theta_odd(m, &e3_rho_reduced);
        let de3_z = grid.d_theta(&e3_z);
        let alpha = ScalarField::from_fn(n, |j| {
            let e3 = [e3_t[j], sin[j] * e3_rho_reduced[j], e3_z[j]];
            let e4 = timelike_normal(&tangent(j), &e3);
            minkowski(&[de3_t[j], de3_rho[j], de3_z[j]], &e4)
        });
        Some(MeanCurvatureFrame {
            norm_h,
            alpha_h: OneFormField::new(alpha),
        })
    } else {
        None
    };

    // ĕ₃ is the outward normal (v̂_θ, −u_θ)/P̂ of Σ̂ carried along T₀.
    let breve_rho_reduced = g_hat / p_hat;
    let breve_z = -(a / p_hat);
    let breve_h = &lu * &sin * &breve_rho_reduced + &lap_vt * &breve_z;
    let d_breve_rho = d_theta_odd(m, &breve_rho_reduced);
    let d_breve_z = grid.d_theta(&breve_z);
    let breve_alpha = ScalarField::from_fn(n, |j| {
        let e3 = [0.0, sin[j] * breve_rho_reduced[j], breve_z[j]];
        let e4 = timelike_normal(&tangent(j), &e3);
        minkowski(&[0.0, d_breve_rho[j], d_breve_z[j]], &e4)
    });

    Ok(ExtrinsicData {
        hhat,
        hhat_principal: (k1, k2),
        hhat_mean,
        mean_vector: [lap_tau, lu, lap_vt],
        mean_sq,
        frame,
        breve_h,
        breve_alpha: OneFormField::new(breve_alpha),
    })
}

/// `H₀² − (v_θ Δτ − τ_θ Δv)² / (v_θ² + τ_θ²)` from the embedding of `σ` alone.
pub fn mean_sq_from_base(base: &RevolutionSurface, tau: &ScalarField) -> Result<ScalarField> {
    let m = &base.metric;
    let grid = m.grid();
    let g = base.reduced_slope();
    let tau_x = grid.d_x(tau);
    let lap_tau = m.laplacian(tau)?;
    let lap_v = height_laplacian(m, g);
    let lu = horizontal_mean_reduced(m, &(g * g)) * grid.sin_theta();
    let h0_sq = &lu * &lu + &lap_v * &lap_v;
    // (v_θ Δτ − τ_θ Δv) / sin θ = g Δτ + τ_x Δv
    let cross = g * &lap_tau + &tau_x * &lap_v;
    Ok(h0_sq - &cross * &cross / (g * g + &tau_x * &tau_x))
}

/// Max-norm deviations of the pointwise identities relating `Σ_τ`, `Σ̂_τ`
/// and the `ĕ₃` gauge.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IdentityDeviations {
    /// `⟨H_τ,H_τ⟩` from the Minkowski frame versus the closed form through the
    /// Euclidean embedding of `σ`. `None` if `σ` itself is not embeddable.
    pub mean_sq_gap: Option<f64>,
    /// `α_{ĕ₃}(∂_θ) − ĥ_θc τ^c / √(1+|∇τ|²)`.
    pub gauge_one_form: f64,
    /// `Ĥ + ⟨H,ĕ₃⟩ + α_{ĕ₃}(∇τ)/√(1+|∇τ|²)`.
    pub projection_relation: f64,
    /// `h(Σ, X_τ, τ, ĕ₃) − √(1+|∇τ|²) Ĥ`.
    pub generalized_mean: f64,
    /// The generalized mean curvature compared against `Ĥ/√(1+|∇τ|²)`:
    /// `h·√(1+|∇τ|²) − Ĥ`. Nonzero whenever `ĥ(∇τ,∇τ) ≠ 0`.
    pub generalized_mean_reciprocal: f64,
    /// The projection relation with `α(∇τ)` divided by `1+|∇τ|²` instead.
    pub projection_relation_squared: f64,
    /// `σ̂^{ab} − (σ^{ab} − τ^aτ^b/(1+|∇τ|²))` and
    /// `σ̂^{ab}∇̂_aτ − τ^b/(1+|∇τ|²)`, worst component.
    pub inverse_metric: f64,
    /// Pointwise flux `−σ̂^{bd}ĥ_cd τ^c/√(1+|∇τ|²) − τ^b α(∇τ)/(1+|∇τ|²) + α^b`.
    pub flux: f64,
    /// Isometry residuals of the projected and Minkowski surfaces.
    pub isometry: f64,
    /// Largest `|α_H(∂_φ)|`, or 0 when the frame is undefined.
    pub alpha_phi: f64,
}

pub fn identity_deviations(metric: &AxisymMetric, tau: &ScalarField) -> Result<IdentityDeviations> {
    let surface = embed_lifted(metric, tau)?;
    let ext = extrinsic_data(&surface)?;
    let grid = metric.grid();
    let p = metric.p();
    let p_hat = surface.projected.metric.p();

    let grad_sq = metric.gradient_norm_sq(tau)?;
    let w = &grad_sq + 1.0;
    let lapse = w.sqrt();
    let tau_theta = grid.d_theta(tau);

    let mean_sq_gap = match embed_r3(metric) {
        Ok(base) => Some((mean_sq_from_base(&base, tau)? - &ext.mean_sq).max_abs()),
        Err(Error::NonEmbeddable { .. }) => None,
        Err(e) => return Err(e),
    };

    // ĥ_θc τ^c = ĥ_θθ σ^{θθ} τ_θ
    let h_tau = &ext.hhat.theta_theta * &tau_theta / (p * p);
    let gauge_one_form = (&ext.breve_alpha.theta - &h_tau / &lapse).max_abs();

    let alpha_grad = metric.pair(&ext.breve_alpha, tau)?;
    let projection_relation = (&ext.hhat_mean + &ext.breve_h + &alpha_grad / &lapse).max_abs();
    let projection_relation_squared = (&ext.hhat_mean + &ext.breve_h + &alpha_grad / &w).max_abs();

    let h = -(&lapse * &ext.breve_h) - &alpha_grad;
    let generalized_mean = (&h - &lapse * &ext.hhat_mean).max_abs();
    let generalized_mean_reciprocal = (&h * &lapse - &ext.hhat_mean).max_abs();

    let inv_hat = (p_hat * p_hat).map(|v| 1.0 / v);
    let tau_up = &tau_theta / (p * p);
    let inv_formula = (p * p).map(|v| 1.0 / v) - &tau_up * &tau_up / &w;
    // ∇̂_θ τ = τ_θ, since τ_θ is a coordinate derivative.
    let grad_hat = &inv_hat * &tau_theta;
    let inverse_metric = (&inv_hat - &inv_formula)
        .max_abs()
        .max((grad_hat - &tau_up / &w).max_abs());

    let alpha_up = &ext.breve_alpha.theta / (p * p);
    let flux_field = -(&inv_hat * &ext.hhat.theta_theta * &tau_up / &lapse)
        - &tau_up * &alpha_grad / &w
        + alpha_up;
    // Index lowered with σ_θθ = P².
    let flux = (flux_field * p * p).max_abs();

    let isometry = surface
        .projected
        .isometry_residual()
        .max(surface.minkowski_isometry_residual());
    let alpha_phi = ext.frame().map(|f| f.alpha_h.phi().max_abs()).unwrap_or(0.0);

    Ok(IdentityDeviations {
        mean_sq_gap,
        gauge_one_form,
        projection_relation,
        generalized_mean,
        generalized_mean_reciprocal,
        projection_relation_squared,
        inverse_metric,
        flux,
        isometry,
        alpha_phi,
    })
}
