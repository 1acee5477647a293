//! Transfer function, Popov function, and the candidate spectral factor.
//!
//! The transfer function of the boundary system is
//! `Ĝ(s) = C_d (e^{s p(1)} - A_d)⁻¹ B_d + D_d` and the Popov function is
//! `Φ(iω) = I + Ĝ(iω)* Ĝ(iω)`. The CARE solution supplies the closed-form
//! factor candidate
//!
//! ```text
//! χ(s) = P^{1/2} [I - F_d (e^{s p(1)} - A_d)⁻¹ B_d],
//! ```
//!
//! which satisfies `χ(iω)* χ(iω) = Φ(iω)` away from poles. Its
//! high-frequency limit is `Ω = P^{1/2}`, and `Ω*Ω = P` differs from
//! `I + D_d* D_d` by exactly `B_d* Π B_d` — the reason the naive Riccati
//! weight fails for boundary control.
//!
//! Membership of `χ` and `χ⁻¹` in H∞ is reported through a spectral-radius
//! proxy only: `χ` has right-half-plane poles iff `r(A_d) > 1` and `χ⁻¹`
//! iff `r(A_d + B_d F_d) > 1`; the boundary case `r = 1` is not claimed.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::model::DiscreteQuadruple;
use crate::numerics::{
    min_eigenvalue_hermitian, solve_linear, spectral_radius, DenseMatrix, NumericsError,
};
use crate::riccati::RiccatiSolution;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyError {
    /// `e^{s p(1)}` is (numerically) an eigenvalue of `A_d`.
    PoleHit,
    Numerics(NumericsError),
}

impl fmt::Display for FrequencyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencyError::PoleHit => write!(f, "frequency hits a transfer-function pole"),
            FrequencyError::Numerics(e) => write!(f, "numerics failure: {e}"),
        }
    }
}

impl core::error::Error for FrequencyError {}

impl From<NumericsError> for FrequencyError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::SingularMatrix => FrequencyError::PoleHit,
            other => FrequencyError::Numerics(other),
        }
    }
}

/// `(e^{s p1} - A_d)⁻¹ rhs`.
fn resolvent_apply(
    quad: &DiscreteQuadruple,
    p1: f64,
    s: Complex64,
    rhs: &DenseMatrix,
) -> Result<DenseMatrix, FrequencyError> {
    let z = (s * p1).exp();
    let m = DenseMatrix::from_fn(quad.n(), quad.n(), |i, j| {
        let diag = if i == j { z } else { Complex64::ZERO };
        diag - quad.a_d[(i, j)]
    });
    Ok(solve_linear(&m, rhs)?)
}

/// Transfer function `Ĝ(s) = C_d (e^{s p1} - A_d)⁻¹ B_d + D_d`.
pub fn transfer(
    quad: &DiscreteQuadruple,
    p1: f64,
    s: Complex64,
) -> Result<DenseMatrix, FrequencyError> {
    let x = resolvent_apply(quad, p1, s, &quad.b_d)?;
    Ok(&(&quad.c_d * &x) + &quad.d_d)
}

/// Popov function `Φ(iω) = I + Ĝ(iω)* Ĝ(iω)`, Hermitian-symmetrized.
pub fn popov(quad: &DiscreteQuadruple, p1: f64, omega: f64) -> Result<DenseMatrix, FrequencyError> {
    let g = transfer(quad, p1, Complex64::new(0.0, omega))?;
    let phi = &DenseMatrix::identity(quad.inputs()) + &(&g.adjoint() * &g);
    Ok(phi.hermitian_part())
}

/// Spectral-factor candidate `χ(s) = Ω [I - F_d (e^{s p1} - A_d)⁻¹ B_d]`.
pub fn spectral_factor(
    quad: &DiscreteQuadruple,
    sol: &RiccatiSolution,
    p1: f64,
    s: Complex64,
) -> Result<DenseMatrix, FrequencyError> {
    let x = resolvent_apply(quad, p1, s, &quad.b_d)?;
    let inner = &DenseMatrix::identity(quad.inputs()) - &(&sol.f_d * &x);
    Ok(&sol.omega * &inner)
}

/// All frequency-domain quantities at one point `s = iω`.
#[derive(Clone, Debug)]
pub struct FrequencySample {
    pub s: Complex64,
    /// `Ĝ(s)`.
    pub transfer: DenseMatrix,
    /// `Φ(iω)`, Hermitian.
    pub phi: DenseMatrix,
    /// `χ(s)`.
    pub chi: DenseMatrix,
    /// `||Φ(iω) - χ(iω)* χ(iω)||_F`.
    pub factorization_residual: f64,
}

/// Evaluate transfer, Popov function, factor, and the factorization
/// defect at a single frequency.
pub fn sample(
    quad: &DiscreteQuadruple,
    sol: &RiccatiSolution,
    p1: f64,
    omega: f64,
) -> Result<FrequencySample, FrequencyError> {
    let s = Complex64::new(0.0, omega);
    let transfer_value = transfer(quad, p1, s)?;
    let phi = (&DenseMatrix::identity(quad.inputs())
        + &(&transfer_value.adjoint() * &transfer_value))
        .hermitian_part();
    let chi = spectral_factor(quad, sol, p1, s)?;
    let factorization_residual = (&phi - &(&chi.adjoint() * &chi)).norm_fro();
    Ok(FrequencySample {
        s,
        transfer: transfer_value,
        phi,
        chi,
        factorization_residual,
    })
}

/// Worst factorization defect over a frequency grid.
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    /// `max_ω ||Φ(iω) - χ(iω)* χ(iω)||_F` over evaluated points.
    pub max_residual: f64,
    /// Frequency attaining the maximum.
    pub worst_omega: f64,
    /// Grid points skipped because they hit a pole.
    pub skipped: Vec<f64>,
    /// Number of evaluated points.
    pub evaluated: usize,
}

pub fn factorization_residual(
    quad: &DiscreteQuadruple,
    sol: &RiccatiSolution,
    p1: f64,
    omega_grid: &[f64],
) -> Result<FactorizationReport, FrequencyError> {
    let mut report = FactorizationReport {
        max_residual: 0.0,
        worst_omega: f64::NAN,
        skipped: Vec::new(),
        evaluated: 0,
    };
    for &omega in omega_grid {
        let s = Complex64::new(0.0, omega);
        let (phi, chi) = match (popov(quad, p1, omega), spectral_factor(quad, sol, p1, s)) {
            (Ok(phi), Ok(chi)) => (phi, chi),
            (Err(FrequencyError::PoleHit), _) | (_, Err(FrequencyError::PoleHit)) => {
                report.skipped.push(omega);
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let defect = (&phi - &(&chi.adjoint() * &chi)).norm_fro();
        report.evaluated += 1;
        if defect > report.max_residual || report.evaluated == 1 {
            report.max_residual = defect;
            report.worst_omega = omega;
        }
    }
    Ok(report)
}

/// Coercivity margin of the Popov function over a frequency grid.
#[derive(Clone, Debug)]
pub struct CoercivityReport {
    /// `min_ω (λ_min(Φ(iω)) - 1)`; coercivity means this stays above
    /// roundoff level.
    pub margin: f64,
    pub worst_omega: f64,
    pub skipped: Vec<f64>,
    pub evaluated: usize,
}

pub fn coercivity_margin(
    quad: &DiscreteQuadruple,
    p1: f64,
    omega_grid: &[f64],
) -> Result<CoercivityReport, FrequencyError> {
    let mut report = CoercivityReport {
        margin: f64::INFINITY,
        worst_omega: f64::NAN,
        skipped: Vec::new(),
        evaluated: 0,
    };
    for &omega in omega_grid {
        let phi = match popov(quad, p1, omega) {
            Ok(phi) => phi,
            Err(FrequencyError::PoleHit) => {
                report.skipped.push(omega);
                continue;
            }
            Err(e) => return Err(e),
        };
        let lam = min_eigenvalue_hermitian(&phi)?;
        report.evaluated += 1;
        if lam - 1.0 < report.margin {
            report.margin = lam - 1.0;
            report.worst_omega = omega;
        }
    }
    Ok(report)
}

/// Comparison of the true factor limit `Ω*Ω = P` against the naive weight
/// `I + D_d* D_d`; the gap equals `||B_d* Π B_d||_F`.
#[derive(Clone, Debug)]
pub struct OmegaLimitReport {
    pub omega: DenseMatrix,
    pub naive: DenseMatrix,
    pub gap: f64,
}

pub fn omega_limit_check(quad: &DiscreteQuadruple, sol: &RiccatiSolution) -> OmegaLimitReport {
    let omega = (&sol.omega.adjoint() * &sol.omega).hermitian_part();
    let naive = &DenseMatrix::identity(quad.inputs()) + &(&quad.d_d.adjoint() * &quad.d_d);
    let gap = (&omega - &naive).norm_fro();
    OmegaLimitReport { omega, naive, gap }
}

/// Spectral-radius proxy for H∞ membership of `χ` and `χ⁻¹`.
#[derive(Clone, Copy, Debug)]
pub struct HinfProxy {
    pub r_open: f64,
    pub r_closed: f64,
    /// `χ` free of right-half-plane poles: `r(A_d) < 1` with margin.
    pub chi_bounded: bool,
    /// `χ⁻¹` free of right-half-plane poles: `r(A_Π) < 1` with margin.
    pub chi_inv_bounded: bool,
}

pub fn hinf_proxy(
    quad: &DiscreteQuadruple,
    sol: &RiccatiSolution,
) -> Result<HinfProxy, FrequencyError> {
    let r_open = spectral_radius(&quad.a_d)?;
    let r_closed = spectral_radius(&sol.a_pi)?;
    Ok(HinfProxy {
        r_open,
        r_closed,
        chi_bounded: r_open < 1.0 - tol::STABILITY_MARGIN,
        chi_inv_bounded: r_closed < 1.0 - tol::STABILITY_MARGIN,
    })
}

/// Default sweep: 1001 uniform points on `[-50/p1, 50/p1]`, covering
/// several periods of the `2π/p1`-periodic frequency response.
pub fn default_omega_grid(p1: f64) -> Vec<f64> {
    uniform_omega_grid(-50.0 / p1, 50.0 / p1, 1001)
}

/// Uniform grid with `points >= 1` samples; a single point sits at the
/// lower bound.
pub fn uniform_omega_grid(omega_min: f64, omega_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return [omega_min].into_iter().collect();
    }
    (0..points)
        .map(|k| omega_min + (omega_max - omega_min) * k as f64 / (points - 1) as f64)
        .collect()
}
