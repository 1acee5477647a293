//! Numerical oracles for the Riccati identities.
//!
//! Test functions are polynomials in the flux variable `w = λ0 z`; with
//! the `λ0`-weighted inner product, every integral in the identities
//! reduces to exact coefficient arithmetic, independent of the speed
//! profile and free of quadrature error. What remains in the residuals is
//! Riccati and floating-point error only.
//!
//! Three residuals are computed for a CARE solution `Π`:
//!
//! - the operator-node identity on pairs `(z, u)` with
//!   `w(0) - A_d w(1) = B_d u`:
//!   `2 Re⟨A&B[z;u], Πz⟩ + ‖C&D[z;u]‖² + ‖u‖² = ‖P^{-1/2}V w(1) + P^{1/2}u‖²`,
//! - the Weiss–Weiss form on `u = 0` pairs, with weight `(Ω*Ω)⁻¹ = P⁻¹`,
//! - the naive form with weight `(I + D_d*D_d)⁻¹`, which fails by exactly
//!   the `B_d* Π B_d` contribution whenever it is nonzero.
//!
//! Pairs are drawn from a SplitMix64 stream (see [`crate::rng`]): for each
//! state component, `degree+1` coefficients as `re, im` uniform in
//! `[-1,1)`, then (for input pairs) the input vector the same way. The
//! boundary defect `δ = B_d u + A_d w(1) - w(0)` is cancelled by adding
//! the affine correction `(1-ζ) δ`, which shifts `w(0)` and leaves `w(1)`
//! untouched.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Unused whenever std is in the build graph (its inherent f64 methods
// win); required for the pure no_std build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::DiscreteQuadruple;
use crate::numerics::{solve_linear, vec_norm, DenseMatrix, NumericsError};
use crate::riccati::RiccatiSolution;
use crate::rng::SplitMix64;

/// Complex polynomial with ascending coefficients, exact on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![Complex64::ZERO],
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficient-wise conjugate; equals `conj(p(t))` for real `t`.
    pub fn conjugated(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Exact `∫₀¹ p(t) dt = Σ c_k / (k+1)`.
    pub fn integral_unit(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c / (k as f64 + 1.0))
            .sum()
    }

    fn add_affine(&mut self, constant: Complex64, slope: Complex64) {
        while self.coeffs.len() < 2 {
            self.coeffs.push(Complex64::ZERO);
        }
        self.coeffs[0] += constant;
        self.coeffs[1] += slope;
    }

    fn scale(&self, factor: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }
}

/// Which operator domain the pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `(z, u)` with `w(0) - A_d w(1) = B_d u`.
    DomainS,
    /// `z` with `w(0) = A_d w(1)` (input-free).
    DomainA,
}

/// A flux-polynomial test pair satisfying its boundary membership exactly.
#[derive(Clone, Debug)]
pub struct TestFunctionPair {
    w: Vec<Polynomial>,
    u: Vec<Complex64>,
    membership: Membership,
}

impl TestFunctionPair {
    /// Wrap raw polynomials and an input, then cancel the boundary defect
    /// with the affine correction `(1-ζ) δ`.
    pub fn new(quad: &DiscreteQuadruple, mut w: Vec<Polynomial>, u: Vec<Complex64>) -> Self {
        assert_eq!(w.len(), quad.n(), "one polynomial per state component");
        assert_eq!(u.len(), quad.inputs(), "input dimension mismatch");
        let w1: Vec<Complex64> = w.iter().map(|p| p.eval(1.0)).collect();
        let w0: Vec<Complex64> = w.iter().map(|p| p.eval(0.0)).collect();
        let target: Vec<Complex64> = {
            let aw1 = quad.a_d.mul_vec(&w1);
            let bu = quad.b_d.mul_vec(&u);
            aw1.iter().zip(&bu).map(|(a, b)| a + b).collect()
        };
        for (i, poly) in w.iter_mut().enumerate() {
            let delta = target[i] - w0[i];
            poly.add_affine(delta, -delta);
        }
        let membership = if u.iter().all(|z| *z == Complex64::ZERO) {
            Membership::DomainA
        } else {
            Membership::DomainS
        };
        Self { w, u, membership }
    }

    pub fn w(&self) -> &[Polynomial] {
        &self.w
    }

    pub fn u(&self) -> &[Complex64] {
        &self.u
    }

    pub fn membership(&self) -> Membership {
        self.membership
    }

    /// `w(0)`.
    pub fn boundary_left(&self) -> Vec<Complex64> {
        self.w.iter().map(|p| p.eval(0.0)).collect()
    }

    /// `w(1)`.
    pub fn boundary_right(&self) -> Vec<Complex64> {
        self.w.iter().map(|p| p.eval(1.0)).collect()
    }

    /// `‖w(0) - A_d w(1) - B_d u‖`.
    pub fn membership_defect(&self, quad: &DiscreteQuadruple) -> f64 {
        let w0 = self.boundary_left();
        let w1 = self.boundary_right();
        let aw1 = quad.a_d.mul_vec(&w1);
        let bu = quad.b_d.mul_vec(&self.u);
        let defect: Vec<Complex64> = (0..w0.len()).map(|i| w0[i] - aw1[i] - bu[i]).collect();
        vec_norm(&defect)
    }

    /// Rescale so that `‖w(1)‖ = 1`; `None` when the boundary trace
    /// vanishes. Membership is preserved (the constraint is linear).
    pub fn normalized_boundary(&self) -> Option<TestFunctionPair> {
        let norm = vec_norm(&self.boundary_right());
        if norm <= 0.0 {
            return None;
        }
        let factor = 1.0 / norm;
        Some(TestFunctionPair {
            w: self.w.iter().map(|p| p.scale(factor)).collect(),
            u: self.u.iter().map(|&z| z * factor).collect(),
            membership: self.membership,
        })
    }
}

/// Draw a degree-8 test pair from the seeded stream.
pub fn make_test_pair(
    quad: &DiscreteQuadruple,
    seed: u64,
    membership: Membership,
) -> TestFunctionPair {
    make_test_pair_with_degree(quad, seed, membership, 8)
}

/// Draw a test pair with configurable polynomial degree.
pub fn make_test_pair_with_degree(
    quad: &DiscreteQuadruple,
    seed: u64,
    membership: Membership,
    degree: usize,
) -> TestFunctionPair {
    let mut rng = SplitMix64::new(seed);
    let mut draw = || Complex64::new(rng.next_symmetric(), rng.next_symmetric());
    let w: Vec<Polynomial> = (0..quad.n())
        .map(|_| Polynomial::new((0..=degree).map(|_| draw()).collect()))
        .collect();
    let u: Vec<Complex64> = match membership {
        Membership::DomainS => (0..quad.inputs()).map(|_| draw()).collect(),
        Membership::DomainA => vec![Complex64::ZERO; quad.inputs()],
    };
    TestFunctionPair::new(quad, w, u)
}

/// `K&L[z; u] = P^{-1/2} V w(1) + P^{1/2} u`; vanishes exactly on optimal
/// pairs `u = F_d w(1)`.
pub fn kl_operator(
    quad: &DiscreteQuadruple,
    care: &RiccatiSolution,
    pair: &TestFunctionPair,
) -> Result<Vec<Complex64>, NumericsError> {
    assert_eq!(pair.w.len(), quad.n(), "pair/state dimension mismatch");
    let w1 = pair.boundary_right();
    let vw1 = care.v.mul_vec(&w1);
    let half_inv = solve_linear(&care.omega, &DenseMatrix::column(&vw1))?;
    let omega_u = care.omega.mul_vec(pair.u());
    Ok((0..vw1.len()).map(|i| half_inv[(i, 0)] + omega_u[i]).collect())
}

/// `2 Re ⟨A&B[z;u], Πz⟩ = -2 Re ∫₀¹ w* Π w' dζ`, exact in the
/// coefficients (the `λ0` weights cancel since `z = w/λ0` and the state
/// inner product carries weight `λ0`).
fn dynamic_term(pi: &DenseMatrix, pair: &TestFunctionPair) -> f64 {
    let n = pair.w.len();
    let mut acc = Complex64::ZERO;
    for i in 0..n {
        let wi_conj = pair.w[i].conjugated();
        for j in 0..n {
            let entry = pi[(i, j)];
            if entry == Complex64::ZERO {
                continue;
            }
            acc += entry * wi_conj.mul(&pair.w[j].derivative()).integral_unit();
        }
    }
    -2.0 * acc.re
}

fn lhs_value(quad: &DiscreteQuadruple, care: &RiccatiSolution, pair: &TestFunctionPair) -> f64 {
    let w1 = pair.boundary_right();
    let cw = quad.c_d.mul_vec(&w1);
    let du = quad.d_d.mul_vec(pair.u());
    let out: Vec<Complex64> = cw.iter().zip(&du).map(|(a, b)| a + b).collect();
    let u_norm_sqr: f64 = pair.u().iter().map(|z| z.norm_sqr()).sum();
    dynamic_term(&care.pi, pair) + vec_norm(&out).powi(2) + u_norm_sqr
}

/// Relative residual of the operator-node Riccati identity on a `DomainS`
/// pair: `|LHS - RHS| / (1 + |LHS|)`.
pub fn node_residual(
    quad: &DiscreteQuadruple,
    care: &RiccatiSolution,
    pair: &TestFunctionPair,
) -> Result<f64, NumericsError> {
    let lhs = lhs_value(quad, care, pair);
    let kl = kl_operator(quad, care, pair)?;
    let rhs = vec_norm(&kl).powi(2);
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs()))
}

/// Weighted boundary form `v* W⁻¹ v` with `v = B_d* Π w(0) + D_d* C_d w(1)`.
fn boundary_form(
    quad: &DiscreteQuadruple,
    pi: &DenseMatrix,
    weight: &DenseMatrix,
    pair: &TestFunctionPair,
) -> Result<f64, NumericsError> {
    let w0 = pair.boundary_left();
    let w1 = pair.boundary_right();
    let bp = &quad.b_d.adjoint() * pi;
    let dc = &quad.d_d.adjoint() * &quad.c_d;
    let v: Vec<Complex64> = {
        let a = bp.mul_vec(&w0);
        let b = dc.mul_vec(&w1);
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    };
    let solved = solve_linear(weight, &DenseMatrix::column(&v))?;
    let mut acc = Complex64::ZERO;
    for i in 0..v.len() {
        acc += v[i].conj() * solved[(i, 0)];
    }
    Ok(acc.re)
}

/// Relative residual of the Weiss–Weiss Riccati identity (weight
/// `(Ω*Ω)⁻¹ = P⁻¹`) on a `DomainA` pair: `|LHS - RHS| / (1 + |LHS|)`.
pub fn weiss_weiss_residual(
    quad: &DiscreteQuadruple,
    care: &RiccatiSolution,
    pair: &TestFunctionPair,
) -> Result<f64, NumericsError> {
    let lhs = lhs_value(quad, care, pair);
    let rhs = boundary_form(quad, &care.pi, &care.p, pair)?;
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs()))
}

/// Identity gap of the naive Riccati form (weight `(I + D_d*D_d)⁻¹`) on a
/// `DomainA` pair, normalized by the boundary energy `‖w(1)‖²` so that
/// unit-trace pairs report the raw gap. Zero exactly when
/// `B_d* Π B_d = 0`; strictly positive otherwise.
pub fn naive_residual(
    quad: &DiscreteQuadruple,
    care: &RiccatiSolution,
    pair: &TestFunctionPair,
) -> Result<f64, NumericsError> {
    let lhs = lhs_value(quad, care, pair);
    let naive_weight = (&DenseMatrix::identity(quad.inputs())
        + &(&quad.d_d.adjoint() * &quad.d_d))
        .hermitian_part();
    let rhs = boundary_form(quad, &care.pi, &naive_weight, pair)?;
    let scale = pair
        .boundary_right()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>();
    if scale > 0.0 {
        Ok((lhs - rhs).abs() / scale)
    } else {
        Ok((lhs - rhs).abs())
    }
}
