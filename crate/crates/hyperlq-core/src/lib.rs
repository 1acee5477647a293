//! LQ-optimal boundary feedback for 1-D hyperbolic transport systems.
//!
//! The system class is the transport equation `z_t = -(λ0 z)_ζ` on `[0, 1]`
//! with boundary input and output defined through four matrices `K, L, K_y,
//! L_y`. Everything reduces to a discrete-time quadruple `(A_d, B_d, C_d,
//! D_d)`; the optimal boundary gain comes out of a discrete-time Riccati
//! equation and every identity the synthesis relies on (spectral
//! factorization of the Popov function, the operator-node and Weiss--Weiss
//! Riccati forms, the optimal-cost formula) can be checked numerically.
//!
//! Module map:
//!
//! - [`numerics`]: dense complex matrix kernels (LU solve, QR eigenvalues,
//!   Hermitian Jacobi, matrix square root, discrete Lyapunov).
//! - [`model`]: the boundary system, travel-time maps, zero-order-term
//!   elimination, and the reduction to the discrete quadruple.
//! - [`riccati`]: control/filter Riccati solvers, optimal gain, stability
//!   and uniqueness certificates.
//! - [`frequency`]: transfer function, Popov function, candidate spectral
//!   factor and the factorization/coercivity checks.
//! - [`pde`]: exact delay-line simulation, cost measurement, resolvent and
//!   Yosida-extension probes.
//! - [`verify`]: polynomial test pairs and the Riccati identity residuals.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod frequency;
pub mod model;
pub mod numerics;
pub mod pde;
mod quadrature;
pub mod riccati;
pub mod rng;
pub mod tol;
pub mod verify;

pub use num_complex::Complex64;

pub use model::{BoundarySystem, DiscreteQuadruple, SpatialProfile, StateFunction};
pub use numerics::DenseMatrix;
pub use riccati::{FilterSolution, RiccatiSolution};
