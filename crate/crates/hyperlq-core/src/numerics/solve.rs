//! LU elimination with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DenseMatrix, NumericsError};
use crate::tol;

struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

fn lu_factor(a: &DenseMatrix) -> Result<LuFactors, NumericsError> {
    assert!(a.is_square(), "LU factorization requires a square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let pivot_floor = tol::PIVOT_REL * a.norm_fro();

    for k in 0..n {
        let mut best = k;
        let mut best_mag = lu[(k, k)].norm();
        for i in (k + 1)..n {
            let mag = lu[(i, k)].norm();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag < pivot_floor || best_mag == 0.0 {
            return Err(NumericsError::SingularMatrix);
        }
        if best != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = tmp;
            }
            perm.swap(k, best);
            swaps += 1;
        }
        let piv = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / piv;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(LuFactors { lu, perm, swaps })
}

/// Solve `A X = B` for `X` by partial-pivoted elimination.
///
/// Fails with `SingularMatrix` when a pivot falls below
/// `tol::PIVOT_REL * ||A||_F`.
pub fn solve_linear(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, NumericsError> {
    assert_eq!(a.rows(), b.rows(), "right-hand side row count must match");
    let n = a.rows();
    let f = lu_factor(a)?;
    let m = b.cols();
    let mut x = DenseMatrix::zeros(n, m);

    for col in 0..m {
        // Forward substitution on the permuted right-hand side.
        let mut y = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = b[(f.perm[i], col)];
            for (j, &yj) in y.iter().enumerate().take(i) {
                acc -= f.lu[(i, j)] * yj;
            }
            y[i] = acc;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= f.lu[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc / f.lu[(i, i)];
        }
    }
    Ok(x)
}

/// Matrix inverse through `solve_linear(A, I)`.
pub fn inverse(a: &DenseMatrix) -> Result<DenseMatrix, NumericsError> {
    solve_linear(a, &DenseMatrix::identity(a.rows()))
}

/// Determinant from the LU factorization.
pub fn determinant(a: &DenseMatrix) -> Result<Complex64, NumericsError> {
    let f = lu_factor(a)?;
    let mut det = if f.swaps % 2 == 0 {
        Complex64::ONE
    } else {
        -Complex64::ONE
    };
    for i in 0..a.rows() {
        det *= f.lu[(i, i)];
    }
    Ok(det)
}
