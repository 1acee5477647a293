//! The boundary-controlled transport system and its reduction.
//!
//! State equation: `z_t(ζ,t) = -(λ0(ζ) z(ζ,t))_ζ` on `ζ ∈ [0,1]` with
//! boundary relations
//!
//! ```text
//! [0; I] u(t) = -K (λ0 z)(0,t) - L (λ0 z)(1,t)
//!        y(t) = -K_y (λ0 z)(0,t) - L_y (λ0 z)(1,t)
//! ```
//!
//! With `A_d = -K⁻¹L`, `B_d = -K⁻¹[0; I]`, `C_d = K_y K⁻¹ L - L_y`,
//! `D_d = K_y K⁻¹ [0; I]` the dynamics become the delay-difference system
//! `B_d u = (λ0 z)(0) - A_d (λ0 z)(1)`, `y = C_d (λ0 z)(1) + D_d u`, which
//! drives the whole synthesis pipeline.
//!
//! An optional zero-order term `M(ζ) z` is eliminated by the change of
//! variables `z̃ = Q z` with `Q' = -λ0⁻¹ Q M`, `Q(0) = I`; since
//! `z̃(1) = Q(1) z(1)` and `z̃(0) = z(0)`, the transformed boundary matrices
//! are `K̃ = K`, `L̃ = L Q(1)⁻¹`, `K̃_y = K_y`, `L̃_y = L_y Q(1)⁻¹`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::numerics::{inverse, DenseMatrix, NumericsError};
use crate::quadrature;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelError {
    /// The boundary matrix `K` is numerically singular.
    SingularK,
    /// The speed profile has a sample at or below zero.
    NonPositiveSpeed,
    /// Shapes of matrices, grids, or state values do not agree.
    DimensionMismatch,
    /// The zero-order transform matrix `Q(1)` is numerically singular.
    SingularQ,
    /// A position or travel time outside the domain was requested.
    OutOfDomain,
    /// The sample grid is not strictly increasing from 0 to 1.
    InvalidGrid,
    /// The operation requires the zero-order term to be eliminated first.
    ZeroOrderTermPresent,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::SingularK => write!(f, "boundary matrix K is singular"),
            ModelError::NonPositiveSpeed => write!(f, "speed profile must be strictly positive"),
            ModelError::DimensionMismatch => write!(f, "dimension mismatch"),
            ModelError::SingularQ => write!(f, "zero-order transform Q(1) is singular"),
            ModelError::OutOfDomain => write!(f, "argument outside the domain"),
            ModelError::InvalidGrid => write!(f, "grid must increase strictly from 0 to 1"),
            ModelError::ZeroOrderTermPresent => {
                write!(f, "apply q_transform before reducing a system with M != 0")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// Scalar transport speed `λ0` sampled on a grid over `[0, 1]`,
/// interpreted piecewise-linearly, together with the precomputed
/// travel-time map `p(ζ) = ∫₀^ζ dη / λ0(η)`.
///
/// # Example
///
/// ```
/// use hyperlq_core::SpatialProfile;
///
/// let profile = SpatialProfile::constant(2.0, 101).unwrap();
/// assert!((profile.total_travel_time() - 0.5).abs() < 1e-14);
/// assert!((profile.travel_time_inverse(0.25).unwrap() - 0.5).abs() < 1e-12);
/// ```
#[derive(Clone, Debug)]
pub struct SpatialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
    eps: f64,
}

impl SpatialProfile {
    /// Build from samples. The grid must increase strictly from 0 to 1 and
    /// every speed sample must be positive.
    pub fn from_samples(mut grid: Vec<f64>, values: Vec<f64>) -> Result<Self, ModelError> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(ModelError::DimensionMismatch);
        }
        if grid[0].abs() > tol::GRID_ENDPOINT_TOL
            || (grid[grid.len() - 1] - 1.0).abs() > tol::GRID_ENDPOINT_TOL
        {
            return Err(ModelError::InvalidGrid);
        }
        let last = grid.len() - 1;
        grid[0] = 0.0;
        grid[last] = 1.0;
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidGrid);
        }
        let mut eps = f64::INFINITY;
        for &v in &values {
            if v.is_nan() || v <= 0.0 {
                return Err(ModelError::NonPositiveSpeed);
            }
            eps = eps.min(v);
        }
        // Composite trapezoid of 1/λ0 gives p on the grid.
        let mut cumulative = vec![0.0; grid.len()];
        for k in 0..last {
            let h = grid[k + 1] - grid[k];
            cumulative[k + 1] =
                cumulative[k] + 0.5 * h * (1.0 / values[k] + 1.0 / values[k + 1]);
        }
        Ok(Self {
            grid,
            values,
            cumulative,
            eps,
        })
    }

    /// Constant speed on a uniform grid with `points` samples.
    pub fn constant(value: f64, points: usize) -> Result<Self, ModelError> {
        Self::affine(value, 0.0, points)
    }

    /// Affine speed `λ0(ζ) = a + b ζ` on a uniform grid.
    pub fn affine(a: f64, b: f64, points: usize) -> Result<Self, ModelError> {
        if points < 2 {
            return Err(ModelError::DimensionMismatch);
        }
        let grid: Vec<f64> = (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect();
        let values = grid.iter().map(|&z| a + b * z).collect();
        Self::from_samples(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Lower speed bound `ε = min λ0 > 0`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Travel time at grid points.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Total crossing delay `p(1)`.
    pub fn total_travel_time(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    fn segment_of(&self, zeta: f64) -> usize {
        let n = self.grid.len();
        let mut k = self.grid.partition_point(|&g| g <= zeta);
        k = k.saturating_sub(1);
        k.min(n - 2)
    }

    /// Piecewise-linear interpolation of the speed at `zeta`.
    pub fn value_at(&self, zeta: f64) -> Result<f64, ModelError> {
        if !(-tol::GRID_ENDPOINT_TOL..=1.0 + tol::GRID_ENDPOINT_TOL).contains(&zeta) {
            return Err(ModelError::OutOfDomain);
        }
        let z = zeta.clamp(0.0, 1.0);
        let k = self.segment_of(z);
        let t = (z - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
        Ok(self.values[k] + t * (self.values[k + 1] - self.values[k]))
    }

    /// Travel time `p(ζ)` by linear interpolation of the cumulative map.
    pub fn travel_time(&self, zeta: f64) -> Result<f64, ModelError> {
        if !(-tol::GRID_ENDPOINT_TOL..=1.0 + tol::GRID_ENDPOINT_TOL).contains(&zeta) {
            return Err(ModelError::OutOfDomain);
        }
        let z = zeta.clamp(0.0, 1.0);
        let k = self.segment_of(z);
        let t = (z - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
        Ok(self.cumulative[k] + t * (self.cumulative[k + 1] - self.cumulative[k]))
    }

    /// Inverse travel-time map `p⁻¹(τ)`.
    ///
    /// The bracketing segment is found by bisection on the monotone
    /// cumulative map (to `tol::TRAVEL_TIME_BISECTION` in `τ`), then the
    /// piecewise-linear segment is inverted exactly.
    pub fn travel_time_inverse(&self, tau: f64) -> Result<f64, ModelError> {
        let p1 = self.total_travel_time();
        if !(-tol::TRAVEL_TIME_BISECTION..=p1 + tol::TRAVEL_TIME_BISECTION).contains(&tau) {
            return Err(ModelError::OutOfDomain);
        }
        let t = tau.clamp(0.0, p1);
        let mut lo = 0usize;
        let mut hi = self.grid.len() - 1;
        while hi - lo > 1 && self.cumulative[hi] - self.cumulative[lo] > tol::TRAVEL_TIME_BISECTION
        {
            let mid = lo + (hi - lo) / 2;
            if self.cumulative[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let span = self.cumulative[hi] - self.cumulative[lo];
        if span <= 0.0 {
            return Ok(self.grid[lo]);
        }
        let frac = (t - self.cumulative[lo]) / span;
        Ok(self.grid[lo] + frac * (self.grid[hi] - self.grid[lo]))
    }

    /// Grids are shared by construction; equality is exact.
    pub fn same_grid(&self, grid: &[f64]) -> bool {
        self.grid.len() == grid.len() && self.grid.iter().zip(grid).all(|(a, b)| a == b)
    }
}

/// A state-space function `[0,1] → ℂⁿ` sampled on the profile grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFunction {
    grid: Vec<f64>,
    values: Vec<Vec<Complex64>>,
}

impl StateFunction {
    pub fn new(grid: Vec<f64>, values: Vec<Vec<Complex64>>) -> Result<Self, ModelError> {
        if grid.len() != values.len() || values.is_empty() {
            return Err(ModelError::DimensionMismatch);
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(ModelError::DimensionMismatch);
        }
        Ok(Self { grid, values })
    }

    /// Constant function with the given value vector.
    pub fn constant(profile: &SpatialProfile, value: Vec<Complex64>) -> Self {
        let values = vec![value; profile.len()];
        Self {
            grid: profile.grid().to_vec(),
            values,
        }
    }

    /// Sample a vector-valued closure on the profile grid.
    pub fn from_fn(
        profile: &SpatialProfile,
        f: impl Fn(f64) -> Vec<Complex64>,
    ) -> Result<Self, ModelError> {
        let values: Vec<Vec<Complex64>> = profile.grid().iter().map(|&z| f(z)).collect();
        Self::new(profile.grid().to_vec(), values)
    }

    /// Sample a scalar real closure (dimension-1 state).
    pub fn from_scalar_fn(profile: &SpatialProfile, f: impl Fn(f64) -> f64) -> Self {
        let values = profile
            .grid()
            .iter()
            .map(|&z| vec![Complex64::new(f(z), 0.0)])
            .collect();
        Self {
            grid: profile.grid().to_vec(),
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }
}

/// `X`-weighted inner product `⟨f, g⟩ = ∫₀¹ g*(ζ) λ0(ζ) f(ζ) dζ`
/// by composite Simpson (trapezoid fallback on grids Simpson cannot use).
pub fn weighted_inner_product(
    f: &StateFunction,
    g: &StateFunction,
    profile: &SpatialProfile,
) -> Result<Complex64, ModelError> {
    if f.dim() != g.dim()
        || !profile.same_grid(f.grid())
        || !profile.same_grid(g.grid())
    {
        return Err(ModelError::DimensionMismatch);
    }
    let samples: Vec<Complex64> = (0..profile.len())
        .map(|k| {
            let lam = profile.values()[k];
            f.values[k]
                .iter()
                .zip(&g.values[k])
                .map(|(&fv, &gv)| gv.conj() * fv * lam)
                .sum()
        })
        .collect();
    Ok(quadrature::integrate_complex(profile.grid(), &samples))
}

/// Validation summary for a boundary system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    /// Frobenius condition number `||K||_F ||K⁻¹||_F`.
    pub k_condition: f64,
    /// Lower speed bound `ε`.
    pub eps: f64,
}

/// The reduced discrete-time quadruple `(A_d, B_d, C_d, D_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteQuadruple {
    pub a_d: DenseMatrix,
    pub b_d: DenseMatrix,
    pub c_d: DenseMatrix,
    pub d_d: DenseMatrix,
}

impl DiscreteQuadruple {
    pub fn new(
        a_d: DenseMatrix,
        b_d: DenseMatrix,
        c_d: DenseMatrix,
        d_d: DenseMatrix,
    ) -> Result<Self, ModelError> {
        let n = a_d.rows();
        let p = b_d.cols();
        let m = c_d.rows();
        if !a_d.is_square()
            || b_d.rows() != n
            || c_d.cols() != n
            || d_d.rows() != m
            || d_d.cols() != p
        {
            return Err(ModelError::DimensionMismatch);
        }
        Ok(Self { a_d, b_d, c_d, d_d })
    }

    pub fn n(&self) -> usize {
        self.a_d.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b_d.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c_d.rows()
    }
}

/// The PDE system: boundary matrices, speed profile, and the optional
/// zero-order term sampled on the profile grid.
#[derive(Clone, Debug)]
pub struct BoundarySystem {
    n: usize,
    p_in: usize,
    m_out: usize,
    k: DenseMatrix,
    l: DenseMatrix,
    k_y: DenseMatrix,
    l_y: DenseMatrix,
    lambda0: SpatialProfile,
    zero_order: Option<Vec<DenseMatrix>>,
}

impl BoundarySystem {
    pub fn new(
        k: DenseMatrix,
        l: DenseMatrix,
        k_y: DenseMatrix,
        l_y: DenseMatrix,
        p_in: usize,
        lambda0: SpatialProfile,
    ) -> Result<Self, ModelError> {
        let n = k.rows();
        if !k.is_square() || !l.is_square() || l.rows() != n {
            return Err(ModelError::DimensionMismatch);
        }
        let m_out = k_y.rows();
        if k_y.cols() != n || l_y.rows() != m_out || l_y.cols() != n {
            return Err(ModelError::DimensionMismatch);
        }
        if p_in == 0 || p_in > n {
            return Err(ModelError::DimensionMismatch);
        }
        Ok(Self {
            n,
            p_in,
            m_out,
            k,
            l,
            k_y,
            l_y,
            lambda0,
            zero_order: None,
        })
    }

    /// Attach a zero-order term `M(ζ)`, one `n×n` matrix per grid point.
    pub fn with_zero_order(mut self, m: Vec<DenseMatrix>) -> Result<Self, ModelError> {
        if m.len() != self.lambda0.len()
            || m.iter().any(|mk| mk.rows() != self.n || mk.cols() != self.n)
        {
            return Err(ModelError::DimensionMismatch);
        }
        self.zero_order = Some(m);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inputs(&self) -> usize {
        self.p_in
    }

    pub fn outputs(&self) -> usize {
        self.m_out
    }

    pub fn profile(&self) -> &SpatialProfile {
        &self.lambda0
    }

    pub fn zero_order(&self) -> Option<&[DenseMatrix]> {
        self.zero_order.as_deref()
    }

    pub fn boundary_matrices(&self) -> (&DenseMatrix, &DenseMatrix, &DenseMatrix, &DenseMatrix) {
        (&self.k, &self.l, &self.k_y, &self.l_y)
    }

    /// Well-posedness check: `K` invertible and the speed bounded away
    /// from zero. Returns the condition number of `K` and `ε`.
    pub fn validate(&self) -> Result<ValidationReport, ModelError> {
        let k_inv = inverse(&self.k).map_err(|e| match e {
            NumericsError::SingularMatrix => ModelError::SingularK,
            _ => ModelError::DimensionMismatch,
        })?;
        let eps = self.lambda0.eps();
        if eps.is_nan() || eps <= 0.0 {
            return Err(ModelError::NonPositiveSpeed);
        }
        Ok(ValidationReport {
            k_condition: self.k.norm_fro() * k_inv.norm_fro(),
            eps,
        })
    }

    /// Eliminate the zero-order term by the change of variables
    /// `z̃ = Q z`, integrating `Q' = -λ0⁻¹ Q M`, `Q(0) = I` with classical
    /// RK4 on the grid. Returns the equivalent `M = 0` system and `Q(1)`.
    pub fn q_transform(&self) -> Result<(BoundarySystem, DenseMatrix), ModelError> {
        let n = self.n;
        let grid = self.lambda0.grid();
        let speeds = self.lambda0.values();
        let mut q = DenseMatrix::identity(n);

        if let Some(m_samples) = &self.zero_order {
            let rhs = |qm: &DenseMatrix, lam: f64, m: &DenseMatrix| (qm * m).scale(-1.0 / lam);
            for k in 0..grid.len() - 1 {
                let h = grid[k + 1] - grid[k];
                let lam_mid = 0.5 * (speeds[k] + speeds[k + 1]);
                let m_mid = (&m_samples[k] + &m_samples[k + 1]).scale(0.5);

                let k1 = rhs(&q, speeds[k], &m_samples[k]);
                let k2 = rhs(&(&q + &k1.scale(0.5 * h)), lam_mid, &m_mid);
                let k3 = rhs(&(&q + &k2.scale(0.5 * h)), lam_mid, &m_mid);
                let k4 = rhs(&(&q + &k3.scale(h)), speeds[k + 1], &m_samples[k + 1]);
                let step = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
                q = &q + &step.scale(h / 6.0);
            }
        }

        let q_inv = inverse(&q).map_err(|e| match e {
            NumericsError::SingularMatrix => ModelError::SingularQ,
            _ => ModelError::SingularQ,
        })?;
        let transformed = BoundarySystem {
            n,
            p_in: self.p_in,
            m_out: self.m_out,
            k: self.k.clone(),
            l: &self.l * &q_inv,
            k_y: self.k_y.clone(),
            l_y: &self.l_y * &q_inv,
            lambda0: self.lambda0.clone(),
            zero_order: None,
        };
        Ok((transformed, q))
    }

    /// Reduce to the discrete quadruple. The zero-order term must have
    /// been eliminated first.
    pub fn reduce(&self) -> Result<DiscreteQuadruple, ModelError> {
        if self.zero_order.is_some() {
            return Err(ModelError::ZeroOrderTermPresent);
        }
        let k_inv = inverse(&self.k).map_err(|e| match e {
            NumericsError::SingularMatrix => ModelError::SingularK,
            _ => ModelError::SingularK,
        })?;
        let n = self.n;
        let p = self.p_in;
        let tail = k_inv.columns(n - p, p);
        let a_d = (&k_inv * &self.l).scale(-1.0);
        let b_d = tail.scale(-1.0);
        let c_d = &(&self.k_y * &(&k_inv * &self.l)) - &self.l_y;
        let d_d = &self.k_y * &tail;
        DiscreteQuadruple::new(a_d, b_d, c_d, d_d)
    }
}
