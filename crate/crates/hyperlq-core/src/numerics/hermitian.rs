//! Hermitian eigendecomposition by cyclic Jacobi rotations, and the
//! positive-definite matrix square root built on it.

use alloc::vec::Vec;

use num_complex::Complex64;
// Unused whenever std is in the build graph (its inherent f64 methods
// win); required for the pure no_std build.
#[allow(unused_imports)]
use num_traits::Float;

use super::{DenseMatrix, NumericsError};
use crate::tol;

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition `A = V diag(w) V*` of a Hermitian matrix.
///
/// Returns the (unsorted) real eigenvalues and the unitary `V` whose columns
/// are the eigenvectors. The input is Hermitian-symmetrized first, so small
/// defects are tolerated.
pub fn hermitian_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), NumericsError> {
    assert!(a.is_square(), "hermitian_eigen requires a square matrix");
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = DenseMatrix::identity(n);
    if n <= 1 {
        let w = (0..n).map(|i| m[(i, i)].re).collect();
        return Ok((w, v));
    }
    let scale = m.norm_fro();
    let stop = tol::JACOBI_OFF_REL * scale.max(f64::MIN_POSITIVE);

    for _sweep in 0..tol::JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= stop {
            let w = (0..n).map(|i| m[(i, i)].re).collect();
            return Ok((w, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Inner rotation angle as in the real Jacobi method, with the
                // phase of a_pq folded into the sine.
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = t * c;
                let s = apq / mag * sigma;

                // A <- J* A J with J = I except J[p,p]=c, J[p,q]=s,
                // J[q,p]=-conj(s), J[q,q]=c.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s.conj() * akq;
                    m[(k, q)] = s * akp + c * akq;
                    m[(p, k)] = m[(k, p)].conj();
                    m[(q, k)] = m[(k, q)].conj();
                }
                let delta = 2.0 * c * sigma * mag;
                let new_pp = c * c * app + sigma * sigma * aqq - delta;
                let new_qq = sigma * sigma * app + c * c * aqq + delta;
                m[(p, p)] = Complex64::new(new_pp, 0.0);
                m[(q, q)] = Complex64::new(new_qq, 0.0);
                m[(p, q)] = Complex64::ZERO;
                m[(q, p)] = Complex64::ZERO;

                // Accumulate V <- V J.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s.conj() * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(NumericsError::NoConvergence)
}

/// Eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>, NumericsError> {
    let (mut w, _) = hermitian_eigen(a)?;
    w.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(w)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(a: &DenseMatrix) -> Result<f64, NumericsError> {
    Ok(hermitian_eigenvalues(a)?
        .first()
        .copied()
        .unwrap_or(0.0))
}

/// Hermitian square root of a Hermitian positive-definite matrix.
///
/// Fails with `NotPositiveDefinite` when the smallest eigenvalue is at or
/// below `tol::HPD_MIN_EIG_REL * ||P||_F`.
pub fn sqrtm_hpd(p: &DenseMatrix) -> Result<DenseMatrix, NumericsError> {
    let (w, v) = hermitian_eigen(p)?;
    let floor = tol::HPD_MIN_EIG_REL * p.norm_fro();
    let n = p.rows();
    for &lambda in &w {
        if lambda <= floor {
            return Err(NumericsError::NotPositiveDefinite);
        }
    }
    let mut scaled = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let r = w[j].sqrt();
        for i in 0..n {
            scaled[(i, j)] = v[(i, j)] * r;
        }
    }
    Ok((&scaled * &v.adjoint()).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_hermitian(n: usize, rng: &mut SplitMix64) -> DenseMatrix {
        let g = DenseMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.next_symmetric(), rng.next_symmetric())
        });
        (&g + &g.adjoint()).scale(0.5)
    }

    #[test]
    fn identity_root() {
        let s = sqrtm_hpd(&DenseMatrix::identity(3)).unwrap();
        assert!((&s - &DenseMatrix::identity(3)).norm_fro() < 1e-14);
    }

    #[test]
    fn scalar_roots() {
        let s = sqrtm_hpd(&DenseMatrix::scalar(4.0)).unwrap();
        assert!((s[(0, 0)].re - 2.0).abs() < 1e-14);

        // P = 2 + Pi of the worked transport example.
        let p = 2.132782218537319;
        let s = sqrtm_hpd(&DenseMatrix::scalar(p)).unwrap();
        assert!((s[(0, 0)].re - p.sqrt()).abs() < 1e-14);
        assert!((s[(0, 0)].re - 1.460404813).abs() < 1e-9);
    }

    #[test]
    fn rejects_indefinite() {
        let p = DenseMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(sqrtm_hpd(&p), Err(NumericsError::NotPositiveDefinite));
        assert_eq!(
            sqrtm_hpd(&DenseMatrix::zeros(2, 2)),
            Err(NumericsError::NotPositiveDefinite)
        );
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let mut rng = SplitMix64::new(0xBEEF);
        for n in 1..=6 {
            for _ in 0..10 {
                let a = random_hermitian(n, &mut rng);
                let (w, v) = hermitian_eigen(&a).unwrap();
                // V diag(w) V* == A
                let mut d = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    d[(i, i)] = Complex64::new(w[i], 0.0);
                }
                let rebuilt = &(&v * &d) * &v.adjoint();
                assert!(
                    (&rebuilt - &a).norm_fro() <= 1e-12 * (1.0 + a.norm_fro()),
                    "reconstruction failed at n={n}"
                );
                // V unitary
                let vv = &v.adjoint() * &v;
                assert!((&vv - &DenseMatrix::identity(n)).norm_fro() < 1e-12);
            }
        }
    }

    #[test]
    fn square_of_root_is_identity_map() {
        let mut rng = SplitMix64::new(0x5EED);
        for n in 1..=5 {
            for _ in 0..10 {
                // S random Hermitian PD via S = G*G + I/2.
                let g = DenseMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.next_symmetric(), rng.next_symmetric())
                });
                let mut p = &g.adjoint() * &g;
                for i in 0..n {
                    p[(i, i)] += Complex64::new(0.5, 0.0);
                }
                let s = sqrtm_hpd(&p).unwrap();
                let ss = &s * &s;
                let rel = (&ss - &p).norm_fro() / p.norm_fro();
                assert!(rel < 1e-12, "S*S relative error {rel}");
                // sqrtm(S*S) = S for the PD root.
                let s2 = sqrtm_hpd(&ss).unwrap();
                let rel2 = (&s2 - &s).norm_fro() / s.norm_fro();
                assert!(rel2 < 1e-10, "root round-trip error {rel2}");
            }
        }
    }
}
