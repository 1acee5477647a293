//! Discrete Lyapunov equation by squaring (doubling) iteration.

use super::{spectral_radius, DenseMatrix, NumericsError};
use crate::tol;

/// Solve `S - A* S A = Q` for Hermitian PSD `Q` and stable `A`.
///
/// Doubling: with `S_0 = Q`, `M_0 = A`, iterate `S <- S + M* S M`,
/// `M <- M^2`; the partial sums converge quadratically to
/// `S = sum_k (A*)^k Q A^k`. Fails with `UnstableMatrix` when
/// `r(A) >= 1 - tol::STABILITY_MARGIN`.
pub fn solve_dlyap(a: &DenseMatrix, q: &DenseMatrix) -> Result<DenseMatrix, NumericsError> {
    assert!(a.is_square(), "solve_dlyap requires a square matrix");
    assert_eq!(a.rows(), q.rows(), "Q must match A in size");
    assert!(q.is_square(), "Q must be square");

    let radius = spectral_radius(a)?;
    if radius >= 1.0 - tol::STABILITY_MARGIN {
        return Err(NumericsError::UnstableMatrix);
    }

    let mut s = q.hermitian_part();
    let mut m = a.clone();
    for _ in 0..tol::DLYAP_MAX_DOUBLINGS {
        let increment = &(&m.adjoint() * &s) * &m;
        let next = (&s + &increment).hermitian_part();
        let done = increment.norm_fro() <= 0.25 * tol::DLYAP_RESIDUAL_REL * next.norm_fro();
        s = next;
        if done {
            break;
        }
        m = &m * &m;
    }
    Ok(s)
}
