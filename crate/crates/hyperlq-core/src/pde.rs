//! Exact delay-line simulation of the closed loop, cost measurement, and
//! the resolvent/Yosida probes.
//!
//! In the flux variable `w = λ0 z` the transport equation becomes a pure
//! shift along characteristics: `w(1, t) = w(0, t - p(1))`. The simulation
//! therefore works in travel-time coordinates where each intra-period
//! sample index evolves independently by the closed-loop matrix
//! `A_F = A_d + B_d F`:
//!
//! ```text
//! w(1, t + p(1)) = (A_d + B_d F) w(1, t),    u = F w(1),   y = (C_d + D_d F) w(1).
//! ```
//!
//! There is no CFL restriction and no numerical diffusion; the only
//! discretization error is the time quadrature of the cost integrand. The
//! infinite tail is summed in closed form through the discrete Lyapunov
//! solution, so simulated cost and the Riccati prediction can be compared
//! at quadrature accuracy.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
// Unused whenever std is in the build graph (its inherent f64 methods
// win); required for the pure no_std build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{
    weighted_inner_product, BoundarySystem, DiscreteQuadruple, ModelError, SpatialProfile,
    StateFunction,
};
use crate::numerics::{solve_linear, spectral_radius, vec_norm, DenseMatrix, NumericsError};
use crate::quadrature;
use crate::riccati::{closed_loop_lyapunov, RiccatiError, RiccatiSolution, UniquenessReport};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdeError {
    /// A closed-form tail or Lyapunov cost was requested for an unstable
    /// loop.
    UnstableMatrix,
    /// The resolvent argument exceeds the guard `tol::RESOLVENT_S_MAX / p(1)`
    /// or is not positive.
    OverflowGuard,
    Model(ModelError),
    Numerics(NumericsError),
}

impl fmt::Display for PdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdeError::UnstableMatrix => write!(f, "closed loop is not stable"),
            PdeError::OverflowGuard => write!(f, "resolvent argument outside the guarded range"),
            PdeError::Model(e) => write!(f, "{e}"),
            PdeError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PdeError {}

impl From<ModelError> for PdeError {
    fn from(e: ModelError) -> Self {
        PdeError::Model(e)
    }
}

impl From<NumericsError> for PdeError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::UnstableMatrix => PdeError::UnstableMatrix,
            other => PdeError::Numerics(other),
        }
    }
}

impl From<RiccatiError> for PdeError {
    fn from(e: RiccatiError) -> Self {
        match e {
            RiccatiError::Numerics(n) => PdeError::from(n),
            RiccatiError::NoConvergence => PdeError::Numerics(NumericsError::NoConvergence),
        }
    }
}

/// Boundary trace `w(1, t) = (λ0 z)(1, t)` sampled at `t = k dt`.
#[derive(Clone, Debug)]
pub struct TravelTimeTrace {
    pub dt: f64,
    pub samples: Vec<Vec<Complex64>>,
}

/// Simulation output with measured, tail, and predicted costs.
#[derive(Clone, Debug)]
pub struct SimulationResult {
    pub trace: TravelTimeTrace,
    /// `u(t_k) = F w(1, t_k)`.
    pub inputs: Vec<Vec<Complex64>>,
    /// `y(t_k) = (C_d + D_d F) w(1, t_k)`.
    pub outputs: Vec<Vec<Complex64>>,
    /// Quadrature of `‖u‖² + ‖y‖²` over the simulated horizon.
    pub measured_cost: f64,
    /// Exact remainder over `[T, ∞)` from the Lyapunov matrix.
    pub tail_cost: f64,
    /// `⟨z0, Σ_F z0⟩_X`, the closed-form total cost.
    pub predicted_cost: f64,
    /// Per-period contributions to the measured cost.
    pub period_costs: Vec<f64>,
    pub gain_used: DenseMatrix,
    /// False when the loop is unstable and the tail was skipped.
    pub tail_valid: bool,
}

/// Linear interpolation of the flux `λ0 z0` at position `zeta`.
fn flux_at(
    profile: &SpatialProfile,
    z0: &StateFunction,
    zeta: f64,
) -> Result<Vec<Complex64>, PdeError> {
    let grid = profile.grid();
    let z = zeta.clamp(0.0, 1.0);
    let mut k = grid.partition_point(|&g| g <= z);
    k = k.saturating_sub(1).min(grid.len() - 2);
    let t = (z - grid[k]) / (grid[k + 1] - grid[k]);
    let lam0 = profile.values()[k];
    let lam1 = profile.values()[k + 1];
    let v0 = &z0.values()[k];
    let v1 = &z0.values()[k + 1];
    Ok((0..z0.dim())
        .map(|i| {
            let a = v0[i] * lam0;
            let b = v1[i] * lam1;
            a + (b - a) * t
        })
        .collect())
}

/// One period of the initial boundary trace,
/// `h(t_k) = (λ0 z0)(p⁻¹(p(1) - t_k))` for `k = 0 .. points_per_period`.
pub fn initial_trace(
    system: &BoundarySystem,
    z0: &StateFunction,
    points_per_period: usize,
) -> Result<TravelTimeTrace, PdeError> {
    let seg = initial_segment_extended(system, z0, points_per_period)?;
    let dt = system.profile().total_travel_time() / points_per_period as f64;
    Ok(TravelTimeTrace {
        dt,
        samples: seg.into_iter().take(points_per_period).collect(),
    })
}

/// The initial period including the left-limit value at `t = p(1)`,
/// i.e. `points_per_period + 1` samples.
fn initial_segment_extended(
    system: &BoundarySystem,
    z0: &StateFunction,
    points_per_period: usize,
) -> Result<Vec<Vec<Complex64>>, PdeError> {
    if points_per_period == 0
        || z0.dim() != system.n()
        || !system.profile().same_grid(z0.grid())
    {
        return Err(PdeError::Model(ModelError::DimensionMismatch));
    }
    let profile = system.profile();
    let p1 = profile.total_travel_time();
    let dt = p1 / points_per_period as f64;
    let mut seg = Vec::with_capacity(points_per_period + 1);
    for k in 0..=points_per_period {
        let tau = (p1 - k as f64 * dt).max(0.0);
        let zeta = profile.travel_time_inverse(tau)?;
        seg.push(flux_at(profile, z0, zeta)?);
    }
    Ok(seg)
}

/// `‖F v‖² + ‖(C_d + D_d F) v‖²` evaluator.
struct CostForm {
    f: DenseMatrix,
    c_f: DenseMatrix,
}

impl CostForm {
    fn new(quad: &DiscreteQuadruple, f: &DenseMatrix) -> Self {
        Self {
            f: f.clone(),
            c_f: &quad.c_d + &(&quad.d_d * f),
        }
    }

    fn density(&self, v: &[Complex64]) -> f64 {
        let u = self.f.mul_vec(v);
        let y = self.c_f.mul_vec(v);
        u.iter().map(|z| z.norm_sqr()).sum::<f64>() + y.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

/// Simulate the closed loop `u = F w(1, ·)` from `z0` over `periods`
/// delay periods with `points_per_period` samples each.
///
/// The measured cost integrates `‖u‖² + ‖y‖²` per period (Simpson for an
/// even sample count); the tail over `[T, ∞)` is summed exactly through
/// `Σ_F = closed_loop_lyapunov(quad, F)`. With `require_tail` set, an
/// unstable loop is an error; otherwise the tail is skipped and flagged.
pub fn simulate_closed_loop(
    system: &BoundarySystem,
    quad: &DiscreteQuadruple,
    f: &DenseMatrix,
    z0: &StateFunction,
    periods: usize,
    points_per_period: usize,
    require_tail: bool,
) -> Result<SimulationResult, PdeError> {
    if f.rows() != quad.inputs() || f.cols() != quad.n() {
        return Err(PdeError::Model(ModelError::DimensionMismatch));
    }
    let ppp = points_per_period;
    let p1 = system.profile().total_travel_time();
    let dt = p1 / ppp as f64;
    let a_f = &quad.a_d + &(&quad.b_d * f);
    let stable = spectral_radius(&a_f)? < 1.0 - tol::STABILITY_MARGIN;
    if require_tail && !stable {
        return Err(PdeError::UnstableMatrix);
    }
    let cost = CostForm::new(quad, f);

    let mut seg = initial_segment_extended(system, z0, ppp)?;
    let mut trace = Vec::with_capacity(periods * ppp + 1);
    let mut period_costs = Vec::with_capacity(periods);
    for _ in 0..periods {
        trace.extend(seg.iter().take(ppp).cloned());
        let densities: Vec<f64> = seg.iter().map(|v| cost.density(v)).collect();
        period_costs.push(quadrature::integrate_uniform(dt, &densities));
        for v in seg.iter_mut() {
            *v = a_f.mul_vec(v);
        }
    }
    trace.push(seg[0].clone());
    let measured_cost: f64 = period_costs.iter().sum();

    let (tail_cost, predicted_cost, tail_valid) = if stable {
        let sigma = closed_loop_lyapunov(quad, f)?;
        let densities: Vec<f64> = seg
            .iter()
            .map(|v| {
                let sv = sigma.mul_vec(v);
                v.iter()
                    .zip(&sv)
                    .map(|(a, b)| (a.conj() * b).re)
                    .sum::<f64>()
            })
            .collect();
        let tail = quadrature::integrate_uniform(dt, &densities);
        let predicted = cost_exact(system, quad, f, z0)?;
        (tail, predicted, true)
    } else {
        (0.0, f64::INFINITY, false)
    };

    let inputs = trace.iter().map(|v| cost.f.mul_vec(v)).collect();
    let outputs = trace.iter().map(|v| cost.c_f.mul_vec(v)).collect();
    Ok(SimulationResult {
        trace: TravelTimeTrace { dt, samples: trace },
        inputs,
        outputs,
        measured_cost,
        tail_cost,
        predicted_cost,
        period_costs,
        gain_used: f.clone(),
        tail_valid,
    })
}

/// Closed-form total cost `J(F) = ⟨z0, Σ_F z0⟩_X` of the stabilizing gain
/// `F` (geometric sum of the delay recursion).
pub fn cost_exact(
    system: &BoundarySystem,
    quad: &DiscreteQuadruple,
    f: &DenseMatrix,
    z0: &StateFunction,
) -> Result<f64, PdeError> {
    let sigma = closed_loop_lyapunov(quad, f)?;
    quadratic_state_cost(system, &sigma, z0)
}

fn quadratic_state_cost(
    system: &BoundarySystem,
    weight: &DenseMatrix,
    z0: &StateFunction,
) -> Result<f64, PdeError> {
    if z0.dim() != weight.rows() {
        return Err(PdeError::Model(ModelError::DimensionMismatch));
    }
    let mapped = StateFunction::new(
        z0.grid().to_vec(),
        z0.values().iter().map(|v| weight.mul_vec(v)).collect(),
    )?;
    let ip = weighted_inner_product(z0, &mapped, system.profile())?;
    Ok(ip.re)
}

/// Optimal cost `⟨z0, Π z0⟩_X` with its certification status.
#[derive(Clone, Copy, Debug)]
pub struct OptimalCost {
    pub value: f64,
    /// True when a uniqueness certificate was supplied and holds; without
    /// it the value is only a candidate lower bound.
    pub certified: bool,
}

pub fn optimal_cost(
    system: &BoundarySystem,
    care: &RiccatiSolution,
    z0: &StateFunction,
    certificate: Option<&UniquenessReport>,
) -> Result<OptimalCost, PdeError> {
    let value = quadratic_state_cost(system, &care.pi, z0)?;
    Ok(OptimalCost {
        value,
        certified: certificate.map(|c| c.unique).unwrap_or(false),
    })
}

/// Exponential-weighted interval weights: `E0 = ∫₀¹ e^{-wτ} dτ` and
/// `E1 = ∫₀¹ τ e^{-wτ} dτ`, stable for all `w >= 0`.
fn exp_weights(w: f64) -> (f64, f64) {
    if w < 1e-3 {
        let e0 = 1.0 - w / 2.0 + w * w / 6.0 - w * w * w / 24.0 + w * w * w * w / 120.0;
        let e1 = 0.5 - w / 3.0 + w * w / 8.0 - w * w * w / 30.0 + w * w * w * w / 144.0;
        (e0, e1)
    } else {
        let em = (-w).exp_m1();
        let e0 = -em / w;
        let e1 = (e0 - (em + 1.0)) / w;
        (e0, e1)
    }
}

/// `∫_{ζ_k}^{ζ_{k+1}} e^{-s (p(η) - p_ref)} g(η) dη` with `p` and `g`
/// piecewise linear; exact per interval, only decaying exponentials.
fn interval_integral(
    dz: f64,
    front: f64,
    w: f64,
    g0: &[Complex64],
    g1: &[Complex64],
    out: &mut [Complex64],
) {
    let (e0, e1) = exp_weights(w);
    for i in 0..out.len() {
        out[i] += (g0[i] * e0 + (g1[i] - g0[i]) * e1) * (dz * front);
    }
}

/// Apply the adjoint resolvent `(sI - A*)⁻¹` to `g`:
///
/// ```text
/// ((sI - A*)⁻¹ g)(ζ) = λ0(ζ)⁻¹ [ e^{-s(p(1)-p(ζ))} A_d*(I - e^{-s p(1)} A_d*)⁻¹ I_0
///                               + ∫_ζ¹ e^{-s(p(η)-p(ζ))} g(η) dη ],
/// I_0 = ∫₀¹ e^{-s p(η)} g(η) dη,
/// ```
///
/// where the kernel exponent is the travel time between the two points.
/// The quadrature is a product rule, exact for the piecewise-linear `p`
/// and `g`, so its error stays bounded relative to the decaying integrand
/// for every `s` (plain Simpson loses all accuracy once `s` is large).
pub fn apply_resolvent_adjoint(
    system: &BoundarySystem,
    quad: &DiscreteQuadruple,
    s: f64,
    g: &StateFunction,
) -> Result<StateFunction, PdeError> {
    let profile = system.profile();
    let p1 = profile.total_travel_time();
    if s.is_nan() || s <= 0.0 || s * p1 > tol::RESOLVENT_S_MAX {
        return Err(PdeError::OverflowGuard);
    }
    if g.dim() != system.n() || !profile.same_grid(g.grid()) {
        return Err(PdeError::Model(ModelError::DimensionMismatch));
    }
    let n = system.n();
    let grid = profile.grid();
    let p = profile.cumulative();
    let values = g.values();
    let last = grid.len() - 1;

    // I_0 = ∫₀¹ e^{-s p(η)} g(η) dη, accumulated left to right.
    let mut i0 = vec![Complex64::ZERO; n];
    for k in 0..last {
        let dz = grid[k + 1] - grid[k];
        let w = s * (p[k + 1] - p[k]);
        let front = (-s * p[k]).exp();
        interval_integral(dz, front, w, &values[k], &values[k + 1], &mut i0);
    }

    // Boundary coefficient c = A_d* (I - e^{-s p1} A_d*)⁻¹ I_0.
    let decay_total = (-s * p1).exp();
    let lhs = DenseMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { Complex64::ONE } else { Complex64::ZERO };
        diag - quad.a_d.adjoint()[(i, j)] * decay_total
    });
    let rhs = DenseMatrix::column(&quad.a_d.adjoint().mul_vec(&i0));
    let c = solve_linear(&lhs, &rhs)?;

    // Tail integrals V_k = ∫_{ζ_k}^1 e^{-s (p(η) - p_k)} g dη by the stable
    // right-to-left recurrence.
    let mut tails = vec![vec![Complex64::ZERO; n]; grid.len()];
    for k in (0..last).rev() {
        let dz = grid[k + 1] - grid[k];
        let dp = p[k + 1] - p[k];
        let w = s * dp;
        let decay = (-w).exp();
        let mut acc = vec![Complex64::ZERO; n];
        interval_integral(dz, 1.0, w, &values[k], &values[k + 1], &mut acc);
        for i in 0..n {
            acc[i] += tails[k + 1][i] * decay;
        }
        tails[k] = acc;
    }

    let mut out = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let front = (-s * (p1 - p[k])).exp();
        let lam = profile.values()[k];
        let row: Vec<Complex64> = (0..n)
            .map(|i| (c[(i, 0)] * front + tails[k][i]) / lam)
            .collect();
        out.push(row);
    }
    Ok(StateFunction::new(grid.to_vec(), out)?)
}

/// Yosida-extension probe: `B* s (sI - A*)⁻¹ g` against the boundary
/// target `B_d* (λ0 g)(0⁺)`.
#[derive(Clone, Debug)]
pub struct YosidaProbe {
    pub s_values: Vec<f64>,
    /// `B_d* λ0(0) s ((sI - A*)⁻¹ g)(0)` per probe frequency.
    pub values: Vec<Vec<Complex64>>,
    pub target: Vec<Complex64>,
    /// `‖value(s) - target‖` per probe frequency.
    pub errors: Vec<f64>,
}

pub fn yosida_probe(
    system: &BoundarySystem,
    quad: &DiscreteQuadruple,
    g: &StateFunction,
    s_list: &[f64],
) -> Result<YosidaProbe, PdeError> {
    let profile = system.profile();
    let lam0 = profile.values()[0];
    let b_adj = quad.b_d.adjoint();
    let target: Vec<Complex64> = b_adj.mul_vec(
        &g.values()[0]
            .iter()
            .map(|&z| z * lam0)
            .collect::<Vec<_>>(),
    );
    let mut values = Vec::with_capacity(s_list.len());
    let mut errors = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let resolved = apply_resolvent_adjoint(system, quad, s, g)?;
        let at_zero: Vec<Complex64> = resolved.values()[0]
            .iter()
            .map(|&z| z * (lam0 * s))
            .collect();
        let value = b_adj.mul_vec(&at_zero);
        let err = vec_norm(
            &value
                .iter()
                .zip(&target)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        values.push(value);
        errors.push(err);
    }
    Ok(YosidaProbe {
        s_values: s_list.to_vec(),
        values,
        target,
        errors,
    })
}
