//! Dense complex matrix kernels for small systems (n up to ~16).
//!
//! Everything is complex; real matrices are the zero-imaginary special
//! case. All kernels are deterministic (no randomized pivoting) so CLI
//! output is bit-reproducible, and all functions are pure.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
// Unused whenever std is in the build graph (its inherent f64 methods
// win); required for the pure no_std build.
#[allow(unused_imports)]
use num_traits::Float;

mod dlyap;
mod eigen;
mod hermitian;
mod solve;

pub use dlyap::solve_dlyap;
pub use eigen::{eigenvalues, spectral_radius};
pub use hermitian::{hermitian_eigen, hermitian_eigenvalues, min_eigenvalue_hermitian, sqrtm_hpd};
pub use solve::{determinant, inverse, solve_linear};

/// Errors raised by the matrix kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericsError {
    /// A pivot fell below the relative guard `tol::PIVOT_REL * ||A||_F`.
    SingularMatrix,
    /// An iterative kernel exhausted its budget.
    NoConvergence,
    /// A matrix required to be Hermitian positive definite is not.
    NotPositiveDefinite,
    /// A matrix required to have spectral radius below one does not.
    UnstableMatrix,
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::SingularMatrix => write!(f, "matrix is numerically singular"),
            NumericsError::NoConvergence => write!(f, "iteration budget exhausted"),
            NumericsError::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            NumericsError::UnstableMatrix => write!(f, "matrix has spectral radius >= 1"),
        }
    }
}

impl core::error::Error for NumericsError {}

/// Dense row-major complex matrix.
///
/// # Example
///
/// ```
/// use hyperlq_core::numerics::{solve_linear, DenseMatrix};
///
/// let a = DenseMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 4.0]);
/// let b = DenseMatrix::from_real(2, 1, &[1.0, 1.0]);
/// let x = solve_linear(&a, &b).unwrap();
/// assert!((x[(0, 0)].re - 0.5).abs() < 1e-14);
/// assert!((x[(1, 0)].re - 0.25).abs() < 1e-14);
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major slice of complex entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must be rows*cols");
        Self { rows, cols, data }
    }

    /// Build from a row-major slice of real entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must be rows*cols");
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// 1x1 matrix holding a real scalar.
    pub fn scalar(x: f64) -> Self {
        Self::from_real(1, 1, &[x])
    }

    /// Column vector from a slice.
    pub fn column(v: &[Complex64]) -> Self {
        Self::from_row_major(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Columns `start..start+count` as a new matrix.
    pub fn columns(&self, start: usize, count: usize) -> Self {
        assert!(start + count <= self.cols, "column range out of bounds");
        Self::from_fn(self.rows, count, |i, j| self[(i, start + j)])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.scale_c(Complex64::new(factor, 0.0))
    }

    pub fn scale_c(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn norm_fro(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "hermitian defect requires a square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && self.hermitian_defect() <= crate::tol::HERMITIAN_DEFECT_REL * (1.0 + self.norm_fro())
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian part requires a square matrix");
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)].conj())
        })
    }

    /// Matrix-vector product on a plain slice.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length must match column count");
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;

    fn neg(self) -> DenseMatrix {
        self.scale(-1.0)
    }
}

/// Euclidean norm of a complex slice.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
