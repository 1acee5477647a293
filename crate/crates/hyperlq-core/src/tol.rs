//! Centralized tolerances and iteration budgets.
//!
//! Every hard-coded threshold used by the kernels lives here so the whole
//! pipeline can be audited (and tightened) in one place.

/// Relative pivot guard for LU elimination: a pivot below
/// `PIVOT_REL * ||A||_F` aborts with `SingularMatrix`.
pub const PIVOT_REL: f64 = 1e-13;

/// Allowed Hermitian defect `max |M_ij - conj(M_ji)|` relative to
/// `1 + ||M||_F`.
pub const HERMITIAN_DEFECT_REL: f64 = 1e-12;

/// A Hermitian matrix counts as positive definite only when its smallest
/// eigenvalue exceeds `HPD_MIN_EIG_REL * ||M||_F`.
pub const HPD_MIN_EIG_REL: f64 = 1e-13;

/// Off-diagonal Frobenius mass (relative to `||A||_F`) at which the cyclic
/// Jacobi sweep stops.
pub const JACOBI_OFF_REL: f64 = 1e-14;

/// Jacobi sweep budget; exceeding it is `NoConvergence`.
pub const JACOBI_MAX_SWEEPS: usize = 60;

/// Shifted-QR step budget per deflated eigenvalue; exceeding it is
/// `NoConvergence`.
pub const QR_STEPS_PER_EIGENVALUE: usize = 200;

/// Relative residual guaranteed by the discrete Lyapunov doubling solver.
pub const DLYAP_RESIDUAL_REL: f64 = 1e-12;

/// Doubling step budget for the Lyapunov solver.
pub const DLYAP_MAX_DOUBLINGS: usize = 128;

/// Default relative step tolerance for Riccati value iteration.
pub const CARE_STEP_REL: f64 = 1e-13;

/// Default iteration budget for Riccati value iteration.
pub const CARE_MAX_ITER: usize = 200_000;

/// Frobenius norm at which a Riccati iterate counts as divergent.
pub const CARE_DIVERGENCE_NORM: f64 = 1e12;

/// Relative CARE/FARE residual a returned solution is expected to meet.
pub const CARE_RESIDUAL_REL: f64 = 1e-10;

/// Margin used by all spectral-radius stability checks: stable means
/// `r < 1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-10;

/// Bisection tolerance (in travel time) for inverting the travel-time map.
pub const TRAVEL_TIME_BISECTION: f64 = 1e-12;

/// Grid endpoints may deviate from 0 and 1 by at most this before
/// construction fails; closer values are snapped.
pub const GRID_ENDPOINT_TOL: f64 = 1e-12;

/// Overflow guard for the resolvent probe: `s * p(1)` beyond this is
/// rejected. The evaluation only ever forms decaying exponentials, so the
/// bound is generous; it exists to catch nonsensical arguments.
pub const RESOLVENT_S_MAX: f64 = 1e6;

/// Boundary-membership defect tolerated by verification test pairs.
pub const PAIR_MEMBERSHIP_TOL: f64 = 1e-12;
