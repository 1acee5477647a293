//! Discrete-time Riccati equations and the optimal boundary gain.
//!
//! With the quadruple `(A_d, B_d, C_d, D_d)`, the control algebraic
//! Riccati equation (CARE) reads
//!
//! ```text
//! A_d* Π A_d - Π + C_d* C_d = V* P⁻¹ V,
//! P = I + D_d* D_d + B_d* Π B_d,    V = D_d* C_d + B_d* Π A_d,
//! ```
//!
//! and the optimal boundary gain is `F_d = -P⁻¹ V`, acting on the boundary
//! flux: `u(t) = F_d (λ0 z)(1, t)`. The solver is monotone value iteration
//! from `Π₀ = 0`, which converges to the smallest nonnegative solution
//! whenever one exists. Uniqueness is certified by solvability of the dual
//! filter equation (FARE) together with `r(A_d + B_d F_d) < 1`.
//!
//! The FARE constant term is implemented as `B_d B_d*` (n×n); the printed
//! form `B_d* B_d` is `p×p` and only matches the other terms when `n = p`.

use core::fmt;

use crate::model::DiscreteQuadruple;
use crate::numerics::{
    min_eigenvalue_hermitian, solve_dlyap, solve_linear, spectral_radius, sqrtm_hpd, DenseMatrix,
    NumericsError,
};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiccatiError {
    /// Value iteration diverged or exhausted its budget without meeting
    /// the step tolerance; no nonnegative solution was found.
    NoConvergence,
    /// A kernel below the solver failed.
    Numerics(NumericsError),
}

impl fmt::Display for RiccatiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiccatiError::NoConvergence => {
                write!(f, "value iteration found no nonnegative solution within budget")
            }
            RiccatiError::Numerics(e) => write!(f, "numerics failure: {e}"),
        }
    }
}

impl core::error::Error for RiccatiError {}

impl From<NumericsError> for RiccatiError {
    fn from(e: NumericsError) -> Self {
        RiccatiError::Numerics(e)
    }
}

/// CARE solution bundle.
#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    /// Smallest nonnegative CARE solution; also the matrix realization of
    /// the cost operator on the state space.
    pub pi: DenseMatrix,
    /// `P = I + D_d* D_d + B_d* Π B_d` (Hermitian positive definite).
    pub p: DenseMatrix,
    /// `V = D_d* C_d + B_d* Π A_d`.
    pub v: DenseMatrix,
    /// Optimal boundary gain `F_d = -P⁻¹ V`.
    pub f_d: DenseMatrix,
    /// Closed-loop matrix `A_d + B_d F_d`.
    pub a_pi: DenseMatrix,
    /// `Ω = P^{1/2}`, the high-frequency limit of the spectral factor.
    pub omega: DenseMatrix,
    /// Value-iteration steps taken (0 when built directly from Π).
    pub iterations: usize,
    /// Frobenius norm of the CARE residual at Π.
    pub residual: f64,
}

/// FARE solution bundle.
#[derive(Clone, Debug)]
pub struct FilterSolution {
    /// Smallest nonnegative FARE solution.
    pub pi_tilde: DenseMatrix,
    /// `W = B_d D_d* + A_d Π̃ C_d*`.
    pub w: DenseMatrix,
    /// `T = I + D_d D_d* + C_d Π̃ C_d*`.
    pub t: DenseMatrix,
    pub iterations: usize,
    /// Frobenius norm of the FARE residual at Π̃.
    pub residual: f64,
}

fn care_p(quad: &DiscreteQuadruple, pi: &DenseMatrix) -> DenseMatrix {
    let dd = &quad.d_d.adjoint() * &quad.d_d;
    let bpb = &(&quad.b_d.adjoint() * pi) * &quad.b_d;
    (&(&DenseMatrix::identity(quad.inputs()) + &dd) + &bpb).hermitian_part()
}

fn care_v(quad: &DiscreteQuadruple, pi: &DenseMatrix) -> DenseMatrix {
    let dc = &quad.d_d.adjoint() * &quad.c_d;
    let bpa = &(&quad.b_d.adjoint() * pi) * &quad.a_d;
    &dc + &bpa
}

/// One Bellman update `Π -> A* Π A + C* C - V* P⁻¹ V`, Hermitian-symmetrized.
fn care_step(quad: &DiscreteQuadruple, pi: &DenseMatrix) -> Result<DenseMatrix, RiccatiError> {
    let p = care_p(quad, pi);
    let v = care_v(quad, pi);
    let p_inv_v = solve_linear(&p, &v)?;
    let apa = &(&quad.a_d.adjoint() * pi) * &quad.a_d;
    let cc = &quad.c_d.adjoint() * &quad.c_d;
    let next = &(&apa + &cc) - &(&v.adjoint() * &p_inv_v);
    Ok(next.hermitian_part())
}

/// Frobenius norm of `A* Π A - Π + C* C - V* P⁻¹ V`.
pub fn care_residual(quad: &DiscreteQuadruple, pi: &DenseMatrix) -> Result<f64, RiccatiError> {
    let next = care_step(quad, pi)?;
    Ok((&next - pi).norm_fro())
}

fn solve_care_inner(
    quad: &DiscreteQuadruple,
    step_tol: f64,
    max_iter: usize,
    mut on_step: impl FnMut(&DenseMatrix, &DenseMatrix) -> Result<(), RiccatiError>,
) -> Result<RiccatiSolution, RiccatiError> {
    let n = quad.n();
    let mut pi = DenseMatrix::zeros(n, n);
    let mut iterations = 0;
    loop {
        if iterations >= max_iter {
            return Err(RiccatiError::NoConvergence);
        }
        let next = care_step(quad, &pi)?;
        iterations += 1;
        if next.norm_fro() > tol::CARE_DIVERGENCE_NORM {
            return Err(RiccatiError::NoConvergence);
        }
        on_step(&pi, &next)?;
        let delta = (&next - &pi).norm_fro();
        let done = delta <= step_tol * (1.0 + pi.norm_fro());
        pi = next;
        if done {
            break;
        }
    }
    RiccatiSolution::from_pi_with_iterations(quad, pi, iterations)
}

/// Solve the CARE by monotone value iteration from `Π₀ = 0`.
///
/// Stops when `||Π_{k+1} - Π_k||_F <= tol (1 + ||Π_k||_F)`; iterates are
/// Hermitian-symmetrized each step. `NoConvergence` signals that no
/// nonnegative solution was found within the budget (divergence or
/// exhaustion).
///
/// # Example
///
/// ```
/// use hyperlq_core::riccati::solve_care;
/// use hyperlq_core::{DenseMatrix, DiscreteQuadruple};
///
/// // Scalar transport loop: Π solves 4Π² + 7Π - 1 = 0.
/// let quad = DiscreteQuadruple::new(
///     DenseMatrix::scalar(-0.5),
///     DenseMatrix::scalar(1.0),
///     DenseMatrix::scalar(-0.5),
///     DenseMatrix::scalar(1.0),
/// )
/// .unwrap();
/// let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
/// let pi = sol.pi[(0, 0)].re;
/// assert!((4.0 * pi * pi + 7.0 * pi - 1.0).abs() < 1e-12);
/// ```
pub fn solve_care(
    quad: &DiscreteQuadruple,
    step_tol: f64,
    max_iter: usize,
) -> Result<RiccatiSolution, RiccatiError> {
    solve_care_inner(quad, step_tol, max_iter, |_, _| Ok(()))
}

/// Like [`solve_care`], additionally returning the smallest eigenvalue of
/// any iteration step `Π_{k+1} - Π_k` (monotonicity margin; value
/// iteration from zero should keep it at or above roundoff level).
pub fn solve_care_monitored(
    quad: &DiscreteQuadruple,
    step_tol: f64,
    max_iter: usize,
) -> Result<(RiccatiSolution, f64), RiccatiError> {
    let mut margin = f64::INFINITY;
    let sol = solve_care_inner(quad, step_tol, max_iter, |pi, next| {
        let diff = next - pi;
        let min_eig = min_eigenvalue_hermitian(&diff)?;
        if min_eig < margin {
            margin = min_eig;
        }
        Ok(())
    })?;
    Ok((sol, margin))
}

impl RiccatiSolution {
    /// Assemble the solution bundle from a given `Π` (useful for
    /// perturbation studies; `iterations` is 0 and `residual` is evaluated
    /// at the given matrix).
    pub fn from_pi(quad: &DiscreteQuadruple, pi: DenseMatrix) -> Result<Self, RiccatiError> {
        Self::from_pi_with_iterations(quad, pi, 0)
    }

    fn from_pi_with_iterations(
        quad: &DiscreteQuadruple,
        pi: DenseMatrix,
        iterations: usize,
    ) -> Result<Self, RiccatiError> {
        let p = care_p(quad, &pi);
        let v = care_v(quad, &pi);
        let f_d = solve_linear(&p, &v)?.scale(-1.0);
        let a_pi = &quad.a_d + &(&quad.b_d * &f_d);
        let omega = sqrtm_hpd(&p)?;
        let residual = care_residual(quad, &pi)?;
        Ok(Self {
            pi,
            p,
            v,
            f_d,
            a_pi,
            omega,
            iterations,
            residual,
        })
    }
}

/// The optimal boundary feedback gain; the physical control law is
/// `u(t) = F_d λ0(1) z(1, t)`.
pub fn feedback_gain(sol: &RiccatiSolution) -> &DenseMatrix {
    &sol.f_d
}

/// Solve the FARE `A_d Π̃ A_d* - Π̃ + B_d B_d* = W T⁻¹ W*` by the dual
/// value iteration from zero.
pub fn solve_fare(
    quad: &DiscreteQuadruple,
    step_tol: f64,
    max_iter: usize,
) -> Result<FilterSolution, RiccatiError> {
    // Dual quadruple: the FARE is the CARE of (A*, C*, B*, D*).
    let dual = DiscreteQuadruple::new(
        quad.a_d.adjoint(),
        quad.c_d.adjoint(),
        quad.b_d.adjoint(),
        quad.d_d.adjoint(),
    )
    .expect("dual quadruple dimensions are consistent by construction");
    let sol = solve_care(&dual, step_tol, max_iter)?;
    let pi_tilde = sol.pi;
    let w = &(&quad.b_d * &quad.d_d.adjoint())
        + &(&(&quad.a_d * &pi_tilde) * &quad.c_d.adjoint());
    let dd = &quad.d_d * &quad.d_d.adjoint();
    let ctc = &(&quad.c_d * &pi_tilde) * &quad.c_d.adjoint();
    let t = (&(&DenseMatrix::identity(quad.outputs()) + &dd) + &ctc).hermitian_part();
    Ok(FilterSolution {
        pi_tilde,
        w,
        t,
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

/// Spectral radii of the open and closed loop.
#[derive(Clone, Copy, Debug)]
pub struct StabilityCertificate {
    pub r_closed: f64,
    pub r_open: f64,
    /// `r_closed < 1 - tol::STABILITY_MARGIN`.
    pub stable: bool,
}

pub fn stability_certificate(
    quad: &DiscreteQuadruple,
    sol: &RiccatiSolution,
) -> Result<StabilityCertificate, RiccatiError> {
    let r_closed = spectral_radius(&sol.a_pi)?;
    let r_open = spectral_radius(&quad.a_d)?;
    Ok(StabilityCertificate {
        r_closed,
        r_open,
        stable: r_closed < 1.0 - tol::STABILITY_MARGIN,
    })
}

/// Uniqueness certificate for the CARE solution: FARE solvable and the
/// closed loop stable. When it holds, `⟨z0, Π z0⟩_X` is the optimal cost.
#[derive(Clone, Copy, Debug)]
pub struct UniquenessReport {
    pub fare_solvable: bool,
    pub r_closed: f64,
    pub unique: bool,
}

pub fn uniqueness_certificate(
    care: &RiccatiSolution,
    fare: Result<&FilterSolution, &RiccatiError>,
) -> Result<UniquenessReport, RiccatiError> {
    let r_closed = spectral_radius(&care.a_pi)?;
    let fare_solvable = fare.is_ok();
    Ok(UniquenessReport {
        fare_solvable,
        r_closed,
        unique: fare_solvable && r_closed < 1.0,
    })
}

/// Closed-loop observability-type Gramian
/// `Σ_F = Σ_k (A+BF)^{*k} [F*F + (C+DF)*(C+DF)] (A+BF)^k`.
pub fn closed_loop_lyapunov(
    quad: &DiscreteQuadruple,
    f: &DenseMatrix,
) -> Result<DenseMatrix, RiccatiError> {
    let a_f = &quad.a_d + &(&quad.b_d * f);
    let cf = &quad.c_d + &(&quad.d_d * f);
    let q = &(&f.adjoint() * f) + &(&cf.adjoint() * &cf);
    Ok(solve_dlyap(&a_f, &q.hermitian_part())?)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn scalar_example_root() {
        let quad = scalar_example_quadruple();
        let sol = solve_care(&quad, tol::CARE_STEP_REL, tol::CARE_MAX_ITER).unwrap();
        let pi = sol.pi[(0, 0)].re;
        // Root of 4Π² + 7Π - 1 = 0.
        let golden = (65.0f64.sqrt() - 7.0) / 8.0;
        assert!((pi - golden).abs() < 1e-12, "Pi = {pi}");
        assert!((4.0 * pi * pi + 7.0 * pi - 1.0).abs() < 1e-12);
        // F_d = (1+Π)/(2(2+Π)).
        let f = sol.f_d[(0, 0)].re;
        assert!((f - (1.0 + golden) / (2.0 * (2.0 + golden))).abs() < 1e-12);
        // Ω² = P = 2 + Π.
        let om = sol.omega[(0, 0)].re;
        assert!((om * om - (2.0 + golden)).abs() < 1e-12);
    }

    #[test]
    fn zero_state_cost_solves_in_one_step() {
        let quad = DiscreteQuadruple::new(
            DenseMatrix::scalar(0.7),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(2.0),
        )
        .unwrap();
        let sol = solve_care(&quad, 1e-13, 100).unwrap();
        assert!(sol.pi.norm_fro() == 0.0);
        assert_eq!(sol.iterations, 1);
        assert!(sol.f_d.norm_fro() == 0.0);
    }

    #[test]
    fn random_quadruples_match_dp_oracle() {
        // Independent oracle: finite-horizon dynamic programming truncated
        // at T = 200 steps, written out directly.
        let mut rng = SplitMix64::new(0xCAFE);
        for _ in 0..10 {
            let quad = random_stable_quadruple(&mut rng, 3, 2, 2, 0.8);
            let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
            assert!(sol.residual <= 1e-10 * (1.0 + sol.pi.norm_fro()));

            let mut pi = DenseMatrix::zeros(3, 3);
            for _ in 0..200 {
                let p = care_p(&quad, &pi);
                let v = care_v(&quad, &pi);
                let pv = solve_linear(&p, &v).unwrap();
                let apa = &(&quad.a_d.adjoint() * &pi) * &quad.a_d;
                let cc = &quad.c_d.adjoint() * &quad.c_d;
                pi = (&(&apa + &cc) - &(&v.adjoint() * &pv)).hermitian_part();
            }
            assert!(
                (&sol.pi - &pi).norm_fro() <= 1e-8 * (1.0 + pi.norm_fro()),
                "DP oracle disagrees"
            );
        }
    }

    #[test]
    fn fare_scalar_example() {
        let quad = scalar_example_quadruple();
        let fare = solve_fare(&quad, 1e-13, 200_000).unwrap();
        let pt = fare.pi_tilde[(0, 0)].re;
        // Root of Π̃² + 7Π̃ - 4 = 0.
        let golden = (65.0f64.sqrt() - 7.0) / 2.0;
        assert!((pt - golden).abs() < 1e-8, "PiTilde = {pt}");
        assert!((pt * pt + 7.0 * pt - 4.0).abs() < 1e-7);
    }

    #[test]
    fn fare_zero_input_map() {
        let quad = DiscreteQuadruple::new(
            DenseMatrix::scalar(0.5),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        let fare = solve_fare(&quad, 1e-13, 1000).unwrap();
        assert!(fare.pi_tilde.norm_fro() == 0.0);
    }

    #[test]
    fn fare_equals_care_of_transposed_quadruple() {
        let mut rng = SplitMix64::new(0xD0A1);
        for _ in 0..10 {
            let quad = random_stable_quadruple(&mut rng, 3, 2, 2, 0.8);
            let fare = solve_fare(&quad, 1e-13, 200_000).unwrap();
            let dual = DiscreteQuadruple::new(
                quad.a_d.adjoint(),
                quad.c_d.adjoint(),
                quad.b_d.adjoint(),
                quad.d_d.adjoint(),
            )
            .unwrap();
            let care = solve_care(&dual, 1e-13, 200_000).unwrap();
            assert!(
                (&fare.pi_tilde - &care.pi).norm_fro() <= 1e-9 * (1.0 + care.pi.norm_fro())
            );
        }
    }

    #[test]
    fn gain_satisfies_defining_identity() {
        let mut rng = SplitMix64::new(0xFEED);
        for _ in 0..10 {
            let quad = random_stable_quadruple(&mut rng, 4, 2, 3, 0.8);
            let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
            let pf = &sol.p * &sol.f_d;
            assert!((&pf + &sol.v).norm_fro() <= 1e-12 * (1.0 + sol.v.norm_fro()));
        }
    }

    #[test]
    fn zero_v_gives_zero_gain() {
        let quad = DiscreteQuadruple::new(
            DenseMatrix::scalar(0.5),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        let sol = solve_care(&quad, 1e-13, 1000).unwrap();
        assert!(feedback_gain(&sol).norm_fro() == 0.0);
    }

    #[test]
    fn stability_certificate_examples() {
        let quad = scalar_example_quadruple();
        let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
        let cert = stability_certificate(&quad, &sol).unwrap();
        assert!((cert.r_open - 0.5).abs() < 1e-12);
        assert!((cert.r_closed - 0.234435562925).abs() < 1e-9);
        assert!(cert.stable);

        // No cost on the state: Π = 0, F_d = 0, unstable open loop stays.
        let free = DiscreteQuadruple::new(
            DenseMatrix::scalar(1.5),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        let sol = solve_care(&free, 1e-13, 1000).unwrap();
        let cert = stability_certificate(&free, &sol).unwrap();
        assert!((cert.r_closed - 1.5).abs() < 1e-12);
        assert!(!cert.stable);

        let trivial = DiscreteQuadruple::new(
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        let sol = solve_care(&trivial, 1e-13, 1000).unwrap();
        let cert = stability_certificate(&trivial, &sol).unwrap();
        assert!(cert.r_closed == 0.0);
    }

    #[test]
    fn uniqueness_certificate_examples() {
        let quad = scalar_example_quadruple();
        let care = solve_care(&quad, 1e-13, 200_000).unwrap();
        let fare = solve_fare(&quad, 1e-13, 200_000);
        let report = uniqueness_certificate(&care, fare.as_ref()).unwrap();
        assert!(report.fare_solvable && report.unique);

        // Uncontrolled unstable system with no cost: not unique.
        let free = DiscreteQuadruple::new(
            DenseMatrix::scalar(1.5),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        let care = solve_care(&free, 1e-13, 1000).unwrap();
        let fare = solve_fare(&free, 1e-13, 1000);
        let report = uniqueness_certificate(&care, fare.as_ref()).unwrap();
        assert!(!report.unique);

        // No control, stable dynamics, nonzero observation: Π̃ = 0 and
        // uniqueness comes down to r(A_d) < 1.
        let no_input = DiscreteQuadruple::new(
            DenseMatrix::scalar(0.5),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        let care = solve_care(&no_input, 1e-13, 10_000).unwrap();
        let fare = solve_fare(&no_input, 1e-13, 10_000);
        assert!(fare.as_ref().unwrap().pi_tilde.norm_fro() == 0.0);
        let report = uniqueness_certificate(&care, fare.as_ref()).unwrap();
        assert!(report.fare_solvable && report.unique);
    }

    #[test]
    fn closed_loop_lyapunov_recovers_pi() {
        let quad = scalar_example_quadruple();
        let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
        let sigma = closed_loop_lyapunov(&quad, &sol.f_d).unwrap();
        assert!(
            (&sigma - &sol.pi).norm_fro() <= 1e-10 * (1.0 + sol.pi.norm_fro()),
            "Lyapunov/Riccati identity"
        );

        // Open-loop Gramian for F = 0 on the scalar example:
        // C²/(1-A²) = 0.25/0.75 = 1/3.
        let sigma0 = closed_loop_lyapunov(&quad, &DenseMatrix::zeros(1, 1)).unwrap();
        assert!((sigma0[(0, 0)].re - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn value_iteration_is_monotone() {
        let mut rng = SplitMix64::new(0xACE);
        for _ in 0..5 {
            let quad = random_stable_quadruple(&mut rng, 3, 1, 2, 0.8);
            let (_, margin) = solve_care_monitored(&quad, 1e-13, 200_000).unwrap();
            assert!(margin >= -1e-12, "monotonicity margin {margin}");
        }
    }

    #[test]
    fn gain_invariant_under_unitary_state_transform() {
        let mut rng = SplitMix64::new(0x0DD);
        for _ in 0..5 {
            let quad = random_stable_quadruple(&mut rng, 2, 1, 2, 0.8);
            // Unitary S from a rotation angle.
            let th = rng.next_symmetric();
            let (c, s) = (th.cos(), th.sin());
            let u = DenseMatrix::from_real(2, 2, &[c, s, -s, c]);
            let conj = DiscreteQuadruple::new(
                &(&u.adjoint() * &quad.a_d) * &u,
                &u.adjoint() * &quad.b_d,
                &quad.c_d * &u,
                quad.d_d.clone(),
            )
            .unwrap();
            let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
            let sol_c = solve_care(&conj, 1e-13, 200_000).unwrap();
            // Π transforms as S* Π S, F_d as F_d S.
            let pi_t = &(&u.adjoint() * &sol.pi) * &u;
            assert!((&pi_t - &sol_c.pi).norm_fro() <= 1e-9 * (1.0 + sol.pi.norm_fro()));
            let f_t = &sol.f_d * &u;
            assert!((&f_t - &sol_c.f_d).norm_fro() <= 1e-9 * (1.0 + sol.f_d.norm_fro()));
        }
    }

    #[test]
    fn divergent_problem_reports_no_convergence() {
        // Unstable, uncontrollable, but observed: the finite-horizon cost
        // grows without bound.
        let quad = DiscreteQuadruple::new(
            DenseMatrix::scalar(1.5),
            DenseMatrix::scalar(0.0),
            DenseMatrix::scalar(1.0),
            DenseMatrix::scalar(0.0),
        )
        .unwrap();
        assert_eq!(
            solve_care(&quad, 1e-13, 200_000).err(),
            Some(RiccatiError::NoConvergence)
        );
    }
}
