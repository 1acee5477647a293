//! Randomized invariants of the numeric kernels and the model layer.

use proptest::prelude::*;

use hyperlq_core::model::{weighted_inner_product, StateFunction};
use hyperlq_core::numerics::{eigenvalues, solve_dlyap, solve_linear, spectral_radius, sqrtm_hpd};
use hyperlq_core::{Complex64, DenseMatrix, SpatialProfile};

fn matrix_strategy(n: usize) -> impl Strategy<Value = DenseMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |entries| {
        DenseMatrix::from_row_major(
            n,
            n,
            entries
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_recovers_planted_solution(n in 1usize..5, seed in matrix_strategy(4)) {
        // Diagonally dominated system: well-conditioned by construction.
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = seed[(i % 4, j % 4)];
            }
            a[(i, i)] += Complex64::new(4.0, 0.0);
        }
        let x0 = DenseMatrix::from_fn(n, 1, |i, _| seed[(i % 4, (i + 1) % 4)]);
        let b = &a * &x0;
        let x = solve_linear(&a, &b).unwrap();
        let rel = (&x - &x0).norm_fro() / (1.0 + x0.norm_fro());
        prop_assert!(rel < 1e-10, "relative error {rel}");
    }

    #[test]
    fn hermitian_root_squares_back(g in matrix_strategy(4)) {
        let mut p = &g.adjoint() * &g;
        for i in 0..4 {
            p[(i, i)] += Complex64::new(0.3, 0.0);
        }
        let s = sqrtm_hpd(&p).unwrap();
        let rel = (&(&s * &s) - &p).norm_fro() / p.norm_fro();
        prop_assert!(rel < 1e-12);
        // The root of the square recovers the PD root.
        let s2 = sqrtm_hpd(&(&s * &s)).unwrap();
        prop_assert!((&s2 - &s).norm_fro() / s.norm_fro() < 1e-10);
    }

    #[test]
    fn dlyap_residual_is_tiny_on_stable_dynamics(a_raw in matrix_strategy(3), q_raw in matrix_strategy(3)) {
        let r = spectral_radius(&a_raw).unwrap();
        prop_assume!(r > 1e-6);
        let a = a_raw.scale(0.9 / r);
        let q = (&q_raw.adjoint() * &q_raw).hermitian_part();
        let sigma = solve_dlyap(&a, &q).unwrap();
        let residual = (&(&sigma - &(&(&a.adjoint() * &sigma) * &a)) - &q).norm_fro();
        prop_assert!(residual <= 1e-12 * (1.0 + q.norm_fro().max(sigma.norm_fro())));
    }

    #[test]
    fn eigenvalue_sum_matches_trace(a in matrix_strategy(5)) {
        let eigs = eigenvalues(&a).unwrap();
        let sum: Complex64 = eigs.iter().sum();
        let tr = a.trace();
        prop_assert!((sum - tr).norm() <= 1e-10 * (1.0 + tr.norm()));
    }

    #[test]
    fn travel_time_map_is_monotone_and_invertible(a in 0.2f64..3.0, b in -0.15f64..3.0, frac in 0.0f64..1.0) {
        // Affine profiles stay positive for these ranges.
        let profile = SpatialProfile::affine(a, b, 301).unwrap();
        for w in profile.cumulative().windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        let tau = frac * profile.total_travel_time();
        let zeta = profile.travel_time_inverse(tau).unwrap();
        let roundtrip = profile.travel_time(zeta).unwrap();
        prop_assert!((roundtrip - tau).abs() <= 1e-10);
    }

    #[test]
    fn weighted_norm_dominates_plain_norm(a in 0.3f64..2.0, b in 0.0f64..2.0, amp in -2.0f64..2.0) {
        let profile = SpatialProfile::affine(a, b, 201).unwrap();
        let f = StateFunction::from_scalar_fn(&profile, |z| amp * (1.0 + z * z));
        let weighted = weighted_inner_product(&f, &f, &profile).unwrap().re;
        let unit = SpatialProfile::constant(1.0, 201).unwrap();
        let plain = weighted_inner_product(
            &StateFunction::from_scalar_fn(&unit, |z| amp * (1.0 + z * z)),
            &StateFunction::from_scalar_fn(&unit, |z| amp * (1.0 + z * z)),
            &unit,
        )
        .unwrap()
        .re;
        prop_assert!(weighted >= profile.eps() * plain - 1e-9);
    }
}
