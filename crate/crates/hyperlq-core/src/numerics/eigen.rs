//! Eigenvalues of general complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by the
//! explicitly shifted QR iteration with Wilkinson shifts. Sizes 1 and 2 use
//! closed forms. Only eigenvalues are produced; no Schur vectors are
//! accumulated.

use alloc::vec::Vec;

use num_complex::Complex64;
// Unused whenever std is in the build graph (its inherent f64 methods
// win); required for the pure no_std build.
#[allow(unused_imports)]
use num_traits::Float;

use super::{DenseMatrix, NumericsError};
use crate::tol;

/// Householder similarity reduction to upper Hessenberg form, in place.
fn hessenberg_in_place(h: &mut DenseMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // Reflector for the subcolumn h[k+1.., k].
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha.norm() == 0.0 {
            Complex64::ONE
        } else {
            alpha / alpha.norm()
        };
        let s = phase * norm;
        v[0] += s;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sqr;

        // Left: rows k+1..n, columns k..n.
        for j in k..n {
            let mut dot = Complex64::ZERO;
            for i in 0..m {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            let f = beta * dot;
            for i in 0..m {
                let sub = f * v[i];
                h[(k + 1 + i, j)] -= sub;
            }
        }
        // Right: columns k+1..n, all rows.
        for i in 0..n {
            let mut dot = Complex64::ZERO;
            for j in 0..m {
                dot += h[(i, k + 1 + j)] * v[j];
            }
            let f = beta * dot;
            for j in 0..m {
                let sub = f * v[j].conj();
                h[(i, k + 1 + j)] -= sub;
            }
        }
        // The reflector maps the subcolumn onto -s e1 exactly.
        h[(k + 1, k)] = -s;
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::ZERO;
        }
    }
}

/// Eigenvalues of a 2x2 block, larger-magnitude root first.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let t = 0.5 * (a + d);
    let disc = (0.5 * (a - d)) * (0.5 * (a - d)) + b * c;
    let sq = disc.sqrt();
    let l1 = t + sq;
    let l2 = t - sq;
    let (big, small) = if l1.norm() >= l2.norm() { (l1, l2) } else { (l2, l1) };
    if big.norm() == 0.0 {
        return (big, small);
    }
    // Recompute the small root from the determinant for accuracy.
    (big, (a * d - b * c) / big)
}

fn wilkinson_shift(h: &DenseMatrix, last: usize) -> Complex64 {
    let a = h[(last - 1, last - 1)];
    let b = h[(last - 1, last)];
    let c = h[(last, last - 1)];
    let d = h[(last, last)];
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens pair `(c, s)` with `c` real such that
/// `[[c, s], [-conj(s), c]] * [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if rho == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let sign_a = a / a.norm();
    (a.norm() / rho, sign_a * b.conj() / rho)
}

/// One explicit shifted QR step on the irreducible block `lo..=last`.
fn qr_step(h: &mut DenseMatrix, lo: usize, last: usize, mu: Complex64) {
    let n = h.rows();
    for k in lo..=last {
        h[(k, k)] -= mu;
    }
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(last - lo);
    for k in lo..last {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..n {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c * x + s * y;
            h[(k + 1, j)] = -s.conj() * x + c * y;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        for i in 0..=last {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = c * x + s.conj() * y;
            h[(i, k + 1)] = -s * x + c * y;
        }
    }
    for k in lo..=last {
        h[(k, k)] += mu;
    }
}

fn subdiag_negligible(h: &DenseMatrix, i: usize) -> bool {
    let sub = h[(i, i - 1)].norm();
    let scale = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
    if scale == 0.0 {
        sub == 0.0
    } else {
        sub <= f64::EPSILON * scale
    }
}

/// All eigenvalues of a square complex matrix.
///
/// Fails with `NoConvergence` if any eigenvalue needs more than
/// `tol::QR_STEPS_PER_EIGENVALUE` QR steps.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>, NumericsError> {
    assert!(a.is_square(), "eigenvalues require a square matrix");
    let n = a.rows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok([a[(0, 0)]].into_iter().collect()),
        2 => {
            let (l1, l2) = eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
            return Ok([l1, l2].into_iter().collect());
        }
        _ => {}
    }

    let mut h = a.clone();
    hessenberg_in_place(&mut h);

    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut last = n - 1;
    let mut steps = 0usize;
    loop {
        // Deflate trailing 1x1 blocks.
        while last > 0 && subdiag_negligible(&h, last) {
            h[(last, last - 1)] = Complex64::ZERO;
            eigs.push(h[(last, last)]);
            last -= 1;
            steps = 0;
        }
        if last == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Locate the irreducible block lo..=last.
        let mut lo = last;
        while lo > 0 && !subdiag_negligible(&h, lo) {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = Complex64::ZERO;
        }
        if last - lo == 1 {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, lo + 1)], h[(last, lo)], h[(last, last)]);
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break;
            }
            last = lo - 1;
            steps = 0;
            continue;
        }
        steps += 1;
        if steps > tol::QR_STEPS_PER_EIGENVALUE {
            return Err(NumericsError::NoConvergence);
        }
        let mu = if steps.is_multiple_of(12) {
            // Exceptional shift to break symmetric stalls.
            h[(last, last)] + Complex64::new(0.75 * h[(last, last - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, last)
        };
        qr_step(&mut h, lo, last, mu);
    }
    Ok(eigs)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64, NumericsError> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::determinant;
    use crate::rng::SplitMix64;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn scalar_matrix() {
        let e = eigenvalues(&DenseMatrix::scalar(-0.5)).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((spectral_radius(&DenseMatrix::scalar(-0.5)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rotation_matrix_has_unit_imaginary_pair() {
        let a = DenseMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let e = sorted(eigenvalues(&a).unwrap());
        assert!((e[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((e[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((spectral_radius(&a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangular_spectrum() {
        let a = DenseMatrix::from_real(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let e = sorted(eigenvalues(&a).unwrap());
        assert!((e[0].re - 2.0).abs() < 1e-14 && e[0].im.abs() < 1e-14);
        assert!((e[1].re - 3.0).abs() < 1e-14 && e[1].im.abs() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // Characteristic polynomial (x-1)(x-2)(x-3).
        let a = DenseMatrix::from_real(3, 3, &[6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let e = sorted(eigenvalues(&a).unwrap());
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - Complex64::new(want, 0.0)).norm() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_diagonal_blocks() {
        // Block diagonal: rotation by 0.3 scaled by 0.9, plus eigenvalue 2.
        let (c, s) = (0.3f64.cos() * 0.9, 0.3f64.sin() * 0.9);
        let a = DenseMatrix::from_real(
            3,
            3,
            &[c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 2.0],
        );
        let e = eigenvalues(&a).unwrap();
        let mut mags: Vec<f64> = e.iter().map(|z| z.norm()).collect();
        mags.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((mags[0] - 0.9).abs() < 1e-12);
        assert!((mags[1] - 0.9).abs() < 1e-12);
        assert!((mags[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_and_determinant_consistency() {
        let mut rng = SplitMix64::new(0xE16);
        for n in 1..=6 {
            for _ in 0..10 {
                let a = DenseMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.next_symmetric(), rng.next_symmetric())
                });
                let e = eigenvalues(&a).unwrap();
                let sum: Complex64 = e.iter().sum();
                let tr = a.trace();
                assert!(
                    (sum - tr).norm() <= 1e-10 * (1.0 + tr.norm()),
                    "trace mismatch: {sum} vs {tr}"
                );
                let prod: Complex64 = e.iter().product();
                let det = determinant(&a).unwrap();
                assert!(
                    (prod - det).norm() <= 1e-8 * (1.0 + det.norm()),
                    "determinant mismatch: {prod} vs {det}"
                );
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let a = DenseMatrix::from_real(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let e = eigenvalues(&a).unwrap();
        for z in e {
            assert!((z - Complex64::ONE).norm() < 1e-5, "defective eigenvalue {z}");
        }
        let zero = DenseMatrix::zeros(4, 4);
        for z in eigenvalues(&zero).unwrap() {
            assert_eq!(z, Complex64::ZERO);
        }
    }
}
