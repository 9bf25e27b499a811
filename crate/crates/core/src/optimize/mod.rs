//! Minimization of `E(Σ, τ)` over axisymmetric time functions
//! `τ = Σ_{l≥1} c_l P_l(cos θ)`, guarded by the convexity condition.

mod methods;

pub use methods::{method_registry, Bfgs, DescentMethod, DescentState, GradientDescent, MethodRegistry};

use crate::energy::{qle, residual, RESIDUAL_SIGN};
use crate::error::{Error, Result};
use crate::geometry::{AxisymMetric, Grid, ScalarField};
use crate::physdata::PhysicalData;

pub const DEFAULT_MODES: usize = 8;

/// Legendre coefficients `c_1..c_L`; the constant mode is left out because
/// the energy does not see it.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct TauCoefficients {
    coeffs: Vec<f64>,
}

impl TauCoefficients {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::param("tau", format!("coefficient {c} is not finite")));
        }
        Ok(TauCoefficients { coeffs })
    }

    pub fn zeros(modes: usize) -> Self {
        TauCoefficients {
            coeffs: vec![0.0; modes],
        }
    }

    /// Projection of node values onto `P_1..P_modes`.
    pub fn from_field(grid: &Grid, f: &ScalarField, modes: usize) -> Result<Self> {
        if modes >= grid.n_nodes() {
            return Err(Error::param(
                "modes",
                format!("{modes} modes need more than {} nodes", grid.n_nodes()),
            ));
        }
        f.check_len(grid.n_nodes())?;
        TauCoefficients::new(grid.legendre_coefficients(f)[1..=modes].to_vec())
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_l` for `l = 1..=modes`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn to_field(&self, grid: &Grid) -> ScalarField {
        self.coeffs
            .iter()
            .enumerate()
            .fold(ScalarField::zeros(grid.n_nodes()), |acc, (i, &c)| acc + c * grid.legendre(i + 1))
    }
}

/// Smallest of `K̂`, `K`, and `K + det(∇²τ)/(1+|∇τ|²)` over the nodes; the
/// convexity condition holds when the margin is positive.
pub fn convexity_guard(m: &AxisymMetric, tau: &ScalarField) -> Result<f64> {
    let k = m.gauss_curvature();
    let w = m.gradient_norm_sq(tau)? + 1.0;
    let det = m.mixed_det(&m.hessian(tau)?);
    let lifted = &k + det / &w;
    let hat = &lifted / &w;
    Ok(hat.min().min(k.min()).min(lifted.min()))
}

fn gradient_from_residual(d: &PhysicalData, r: &ScalarField, modes: impl Iterator<Item = usize>) -> Result<Vec<f64>> {
    let grid = d.grid();
    modes
        .map(|l| Ok(RESIDUAL_SIGN * d.metric.integrate_surface(&(r * grid.legendre(l)))?))
        .collect()
}

/// `∂E/∂c_l` for `l = 1..=L`, from the residual paired with `P_l`.
pub fn energy_gradient(d: &PhysicalData, tau: &TauCoefficients) -> Result<Vec<f64>> {
    let r = residual(d, &tau.to_field(d.grid()))?;
    gradient_from_residual(d, &r, 1..=tau.modes())
}

/// `∂E/∂c_l` for a single mode, including the excluded `l = 0`.
pub fn mode_gradient(d: &PhysicalData, tau: &ScalarField, l: usize) -> Result<f64> {
    let r = residual(d, tau)?;
    Ok(gradient_from_residual(d, &r, std::iter::once(l))?[0])
}

/// Central finite differences of `E` in each coefficient.
pub fn finite_difference_gradient(d: &PhysicalData, tau: &TauCoefficients, step: f64) -> Result<Vec<f64>> {
    let grid = d.grid();
    let base = tau.to_field(grid);
    (1..=tau.modes())
        .map(|l| {
            let p = grid.legendre(l);
            let plus = qle(d, &(&base + step * &p))?.total;
            let minus = qle(d, &(&base - step * &p))?.total;
            Ok((plus - minus) / (2.0 * step))
        })
        .collect()
}

/// `max_l |g_l − g_l^{fd}| / max(max_l |g_l^{fd}|, floor)`.
pub fn gradient_discrepancy(analytic: &[f64], fd: &[f64], floor: f64) -> f64 {
    let scale = fd.iter().fold(floor, |m, v| m.max(v.abs()));
    analytic
        .iter()
        .zip(fd)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MinimizeOptions {
    pub method: String,
    pub tol: f64,
    pub max_iter: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking stops below this step length.
    pub min_step: f64,
    /// Step for the finite-difference check at the initial point.
    pub fd_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            method: "bfgs".into(),
            tol: 1e-7,
            max_iter: 500,
            armijo: 1e-4,
            min_step: 1e-14,
            fd_step: 1e-5,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol", self.tol),
            ("armijo", self.armijo),
            ("min_step", self.min_step),
            ("fd_step", self.fd_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if self.armijo >= 1.0 {
            return Err(Error::param("armijo", "must be below 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    GradientTolerance,
    IterationCap,
    /// The predicted decrease fell below the resolution of the energy.
    EnergyResolution,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Iterate {
    pub iteration: usize,
    pub energy: f64,
    pub gradient_norm: f64,
    pub step: f64,
    pub guard_margin: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MinimizeReport {
    pub method: String,
    pub tau_star: TauCoefficients,
    pub energy_star: f64,
    /// `(∫_Σ residual² dv)^{1/2}` at `τ*`.
    pub residual_norm: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    /// Whether any trial step was rejected by the convexity guard.
    pub guard_active: bool,
    pub guard_margin: f64,
    /// Relative gap between the residual gradient and finite differences at the initial point.
    pub initial_fd_discrepancy: f64,
    /// Only the convexity condition is enforced; the remaining admissibility
    /// conditions are not checked.
    pub admissibility: &'static str,
    pub trace: Vec<Iterate>,
}

struct Point {
    coeffs: Vec<f64>,
    energy: f64,
    grad: Vec<f64>,
    margin: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Energy and guard margin at a trial point; `None` when the guard or the
/// embedding rejects it.
fn trial(d: &PhysicalData, coeffs: &[f64]) -> Result<Option<(f64, f64)>> {
    let tau = TauCoefficients::new(coeffs.to_vec())?.to_field(d.grid());
    let margin = convexity_guard(&d.metric, &tau)?;
    if !(margin > 0.0) {
        return Ok(None);
    }
    match qle(d, &tau) {
        Ok(e) if e.total.is_finite() => Ok(Some((e.total, margin))),
        Ok(_) | Err(Error::NonEmbeddable { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Descend `E(Σ, ·)` from `init` with the method named in `opts`.
pub fn minimize_energy(d: &PhysicalData, init: &TauCoefficients, opts: &MinimizeOptions) -> Result<MinimizeReport> {
    minimize_with(d, init, opts, &method_registry())
}

pub fn minimize_with(
    d: &PhysicalData,
    init: &TauCoefficients,
    opts: &MinimizeOptions,
    registry: &MethodRegistry,
) -> Result<MinimizeReport> {
    opts.validate()?;
    let method = registry.get(&opts.method)?;
    if init.modes() == 0 || init.modes() >= d.grid().n_nodes() {
        return Err(Error::param(
            "modes",
            format!("need 1 ≤ modes < {}, got {}", d.grid().n_nodes(), init.modes()),
        ));
    }
    let grid = d.grid();
    let tau0 = init.to_field(grid);
    let margin0 = convexity_guard(&d.metric, &tau0)?;
    if !(margin0 > 0.0) {
        return Err(Error::GuardViolated { margin: margin0 });
    }
    let grad0 = energy_gradient(d, init)?;
    let fd0 = finite_difference_gradient(d, init, opts.fd_step)?;
    let initial_fd_discrepancy = gradient_discrepancy(&grad0, &fd0, 1e-8);

    let mut x = Point {
        coeffs: init.coeffs.clone(),
        energy: qle(d, &tau0)?.total,
        grad: grad0,
        margin: margin0,
    };
    let mut trace = vec![Iterate {
        iteration: 0,
        energy: x.energy,
        gradient_norm: norm(&x.grad),
        step: 0.0,
        guard_margin: x.margin,
    }];
    let mut state = method.start(init.modes());
    let mut guard_active = false;
    let mut iterations = 0;
    let mut stop = StopReason::IterationCap;

    while iterations < opts.max_iter {
        if norm(&x.grad) < opts.tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        let mut dir = state.direction(&x.grad);
        let mut slope: f64 = dir.iter().zip(&x.grad).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            state.reset();
            dir = x.grad.iter().map(|g| -g).collect();
            slope = -norm(&x.grad).powi(2);
        }
        let resolution = 64.0 * f64::EPSILON * x.energy.abs().max(1.0);
        let mut t = state.initial_step();
        let accepted = loop {
            let cand: Vec<f64> = x.coeffs.iter().zip(&dir).map(|(c, v)| c + t * v).collect();
            match trial(d, &cand)? {
                None => guard_active = true,
                Some((e, margin)) => {
                    let armijo = e <= x.energy + opts.armijo * t * slope;
                    let below_resolution = -t * slope < resolution;
                    if armijo || (below_resolution && e <= x.energy) {
                        break Some((cand, e, margin));
                    }
                    if below_resolution {
                        break None;
                    }
                }
            }
            t *= 0.5;
            if t < opts.min_step {
                return Err(Error::LineSearch { step: t });
            }
        };
        let Some((coeffs, energy, margin)) = accepted else {
            stop = StopReason::EnergyResolution;
            break;
        };
        let grad = energy_gradient(d, &TauCoefficients::new(coeffs.clone())?)?;
        let s: Vec<f64> = coeffs.iter().zip(&x.coeffs).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad.iter().zip(&x.grad).map(|(a, b)| a - b).collect();
        state.accept(t, &s, &y);
        iterations += 1;
        x = Point {
            coeffs,
            energy,
            grad,
            margin,
        };
        trace.push(Iterate {
            iteration: iterations,
            energy: x.energy,
            gradient_norm: norm(&x.grad),
            step: norm(&s),
            guard_margin: x.margin,
        });
    }
    if iterations == opts.max_iter && norm(&x.grad) < opts.tol {
        stop = StopReason::GradientTolerance;
    }

    let tau_star = TauCoefficients::new(x.coeffs)?;
    let r = residual(d, &tau_star.to_field(grid))?;
    let residual_norm = d.metric.integrate_surface(&(&r * &r))?.sqrt();
    Ok(MinimizeReport {
        method: method.name().to_string(),
        tau_star,
        energy_star: x.energy,
        residual_norm,
        gradient_norm: norm(&x.grad),
        iterations,
        stop_reason: stop,
        guard_active,
        guard_margin: x.margin,
        initial_fd_discrepancy,
        admissibility: "unknown: only the convexity condition is enforced",
        trace,
    })
}
