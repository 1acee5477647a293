//! Acceptance suite: one test per pipeline-level criterion, each printing
//! a PASS line with the measured numbers (run with `--nocapture` to see
//! them). Tolerances and runtime budgets are pinned in the assertions.

use std::time::Instant;

use hyperlq_core::frequency::{
    coercivity_margin, factorization_residual, omega_limit_check, uniform_omega_grid,
};
use hyperlq_core::model::StateFunction;
use hyperlq_core::numerics::spectral_radius;
use hyperlq_core::pde::{cost_exact, simulate_closed_loop, yosida_probe};
use hyperlq_core::riccati::{
    closed_loop_lyapunov, solve_care, solve_care_monitored, solve_fare,
};
use hyperlq_core::rng::SplitMix64;
use hyperlq_core::verify::{
    make_test_pair, naive_residual, node_residual, weiss_weiss_residual, Membership,
};
use hyperlq_core::{BoundarySystem, Complex64, DenseMatrix, DiscreteQuadruple, SpatialProfile};

fn scalar_example(points: usize) -> (BoundarySystem, DiscreteQuadruple) {
    let sys = BoundarySystem::new(
        DenseMatrix::scalar(-1.0),
        DenseMatrix::scalar(-0.5),
        DenseMatrix::scalar(-1.0),
        DenseMatrix::scalar(0.0),
        1,
        SpatialProfile::constant(1.0, points).unwrap(),
    )
    .unwrap();
    let quad = sys.reduce().unwrap();
    (sys, quad)
}

fn golden_pi() -> f64 {
    (65.0f64.sqrt() - 7.0) / 8.0
}

/// Random quadruple with entries in [-1, 1] and `r(A_d)` scaled to the
/// requested radius.
fn random_quadruple(rng: &mut SplitMix64, n: usize, p: usize, m: usize, radius: f64) -> DiscreteQuadruple {
    let raw = DenseMatrix::from_fn(n, n, |_, _| Complex64::new(rng.next_symmetric(), 0.0));
    let r = spectral_radius(&raw).unwrap();
    let a = if r > 1e-12 { raw.scale(radius / r) } else { raw };
    let b = DenseMatrix::from_fn(n, p, |_, _| Complex64::new(rng.next_symmetric(), 0.0));
    let c = DenseMatrix::from_fn(m, n, |_, _| Complex64::new(rng.next_symmetric(), 0.0));
    let d = DenseMatrix::from_fn(m, p, |_, _| Complex64::new(rng.next_symmetric(), 0.0));
    DiscreteQuadruple::new(a, b, c, d).unwrap()
}

fn dims(rng: &mut SplitMix64) -> (usize, usize, usize) {
    let n = 1 + (rng.next_u64() % 4) as usize;
    let p = 1 + (rng.next_u64() % 2) as usize;
    let m = 1 + (rng.next_u64() % 2) as usize;
    (n, p.min(n), m)
}

#[test]
fn acceptance_01_worked_example_regression() {
    let start = Instant::now();
    let (_, quad) = scalar_example(101);
    let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
    let pi = sol.pi[(0, 0)].re;
    let quadratic = (4.0 * pi * pi + 7.0 * pi - 1.0).abs();
    let root_gap = (pi - golden_pi()).abs();
    let f_expected = (1.0 + pi) / (2.0 * (2.0 + pi));
    let f_gap = (sol.f_d[(0, 0)].re - f_expected).abs();
    let elapsed = start.elapsed().as_secs_f64();

    assert!(quadratic <= 1e-12, "|4Pi^2+7Pi-1| = {quadratic}");
    assert!(root_gap <= 1e-10, "|Pi - (sqrt(65)-7)/8| = {root_gap}");
    assert!(f_gap <= 1e-10, "F_d gap = {f_gap}");
    assert!(elapsed < 0.1, "runtime {elapsed:.4}s exceeds 0.1s");
    println!(
        "acceptance 1 (worked-example regression): PASS — Pi = {pi:.14}, |quadratic| = {quadratic:.2e}, F_d gap = {f_gap:.2e}, {elapsed:.4}s"
    );
}

#[test]
fn acceptance_02_counterexample_demonstration() {
    let start = Instant::now();
    let (_, quad) = scalar_example(101);
    let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
    let mut worst_weiss = 0.0f64;
    let mut naive_values = Vec::new();
    let mut seed = 0u64;
    let mut tested = 0;
    while tested < 25 {
        seed += 1;
        let pair = match make_test_pair(&quad, seed, Membership::DomainA).normalized_boundary() {
            Some(p) => p,
            None => continue,
        };
        tested += 1;
        worst_weiss = worst_weiss.max(weiss_weiss_residual(&quad, &sol, &pair).unwrap());
        naive_values.push(naive_residual(&quad, &sol, &pair).unwrap());
    }
    let elapsed = start.elapsed().as_secs_f64();

    assert!(worst_weiss <= 1e-10, "weiss residual {worst_weiss}");
    for &nv in &naive_values {
        assert!(
            (9.5e-3..=1.05e-2).contains(&nv),
            "naive residual {nv} outside [9.5e-3, 1.05e-2]"
        );
    }
    assert!(elapsed < 1.0, "runtime {elapsed:.3}s exceeds 1s");
    println!(
        "acceptance 2 (counterexample: weight must be (Ω*Ω)⁻¹): PASS — weiss ≤ {worst_weiss:.2e}, naive ≈ {:.6}, {elapsed:.3}s",
        naive_values[0]
    );
}

#[test]
fn acceptance_03_spectral_factorization() {
    let start = Instant::now();
    let grid = uniform_omega_grid(-50.0, 50.0, 1001);

    let mut worst_residual = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    let mut check = |quad: &DiscreteQuadruple| {
        let sol = solve_care(quad, 1e-13, 200_000).expect("CARE must converge");
        let fact = factorization_residual(quad, &sol, 1.0, &grid).unwrap();
        assert!(fact.skipped.is_empty());
        let coer = coercivity_margin(quad, 1.0, &grid).unwrap();
        worst_residual = worst_residual.max(fact.max_residual);
        worst_margin = worst_margin.min(coer.margin);
    };

    let (_, scalar_quad) = scalar_example(101);
    check(&scalar_quad);
    let mut rng = SplitMix64::new(0xFAC7);
    for _ in 0..50 {
        let (n, p, m) = dims(&mut rng);
        let quad = random_quadruple(&mut rng, n, p, m, 0.9);
        check(&quad);
    }
    let elapsed = start.elapsed().as_secs_f64();

    assert!(worst_residual <= 1e-9, "factorization residual {worst_residual}");
    assert!(worst_margin >= -1e-12, "coercivity margin {worst_margin}");
    assert!(elapsed < 5.0, "runtime {elapsed:.2}s exceeds 5s");
    println!(
        "acceptance 3 (spectral factorization on 51 systems x 1001 freqs): PASS — max ‖Φ-χ*χ‖ = {worst_residual:.2e}, min margin = {worst_margin:.2e}, {elapsed:.2}s"
    );
}

#[test]
fn acceptance_04_omega_gap() {
    let (_, quad) = scalar_example(101);
    let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
    let report = omega_limit_check(&quad, &sol);
    let pi = sol.pi[(0, 0)].re;
    assert!((report.gap - pi).abs() <= 1e-10, "gap {} vs Pi {pi}", report.gap);
    assert!(report.gap > 0.0, "gap must be strictly positive");
    println!(
        "acceptance 4 (Ω*Ω ≠ I + D*D): PASS — ‖Ω*Ω - (I+D*D)‖ = {:.12} = Pi, strictly positive",
        report.gap
    );
}

#[test]
fn acceptance_05_operator_node_identity() {
    let start = Instant::now();
    let (_, scalar_quad) = scalar_example(101);
    let scalar_sol = solve_care(&scalar_quad, 1e-13, 200_000).unwrap();

    let mut worst = 0.0f64;
    for seed in 0..100 {
        let pair = make_test_pair(&scalar_quad, seed, Membership::DomainS);
        worst = worst.max(node_residual(&scalar_quad, &scalar_sol, &pair).unwrap());
    }
    let mut rng = SplitMix64::new(0x90DE);
    for _ in 0..50 {
        let (n, p, m) = dims(&mut rng);
        let quad = random_quadruple(&mut rng, n, p, m, 0.85);
        let sol = match solve_care(&quad, 1e-13, 200_000) {
            Ok(sol) => sol,
            Err(_) => continue,
        };
        for seed in 0..100 {
            let pair = make_test_pair(&quad, seed, Membership::DomainS);
            worst = worst.max(node_residual(&quad, &sol, &pair).unwrap());
        }
    }

    // Sensitivity: Π + 0.01 I must be visible.
    let shifted = {
        let bump = DenseMatrix::identity(scalar_quad.n()).scale(0.01);
        hyperlq_core::RiccatiSolution::from_pi(&scalar_quad, &scalar_sol.pi + &bump).unwrap()
    };
    let mut perturbed_min = f64::INFINITY;
    for seed in 0..20 {
        let pair = make_test_pair(&scalar_quad, seed, Membership::DomainS);
        perturbed_min = perturbed_min.min(node_residual(&scalar_quad, &shifted, &pair).unwrap());
    }
    let elapsed = start.elapsed().as_secs_f64();

    assert!(worst <= 1e-10, "node residual {worst}");
    assert!(perturbed_min > 1e-4, "perturbed Π residual {perturbed_min}");
    assert!(elapsed < 5.0, "runtime {elapsed:.2}s exceeds 5s");
    println!(
        "acceptance 5 (operator-node identity, 5100 pairs): PASS — max residual {worst:.2e}, perturbed ≥ {perturbed_min:.2e}, {elapsed:.2}s"
    );
}

#[test]
fn acceptance_06_optimal_cost_via_simulation() {
    let start = Instant::now();
    let (sys, quad) = scalar_example(2001);
    let sol = solve_care(&quad, 1e-13, 200_000).unwrap();
    let z0 = StateFunction::from_scalar_fn(sys.profile(), |_| 1.0);

    let sim = simulate_closed_loop(&sys, &quad, &sol.f_d, &z0, 40, 512, true).unwrap();
    let total = sim.measured_cost + sim.tail_cost;
    let pi = golden_pi();
    let cost_gap = (total - pi).abs();

    let optimal = cost_exact(&sys, &quad, &sol.f_d, &z0).unwrap();
    let mut suboptimal_ok = true;
    let mut tested = 0;
    for j in 0..21 {
        let delta = -0.2 + 0.02 * j as f64;
        if j == 10 {
            continue; // delta = 0 is the optimum itself
        }
        tested += 1;
        let gain = &sol.f_d + &DenseMatrix::scalar(delta);
        let cost = cost_exact(&sys, &quad, &gain, &z0).unwrap();
        suboptimal_ok &= cost > optimal;
    }
    let elapsed = start.elapsed().as_secs_f64();

    assert!(cost_gap <= 1e-5, "|measured + tail - Pi| = {cost_gap}");
    assert_eq!(tested, 20);
    assert!(suboptimal_ok, "every perturbed gain must cost more");
    assert!(elapsed < 2.0, "runtime {elapsed:.2}s exceeds 2s");
    println!(
        "acceptance 6 (simulated cost = ⟨z0, Πz0⟩): PASS — gap {cost_gap:.2e}, 20/20 perturbed gains cost more, {elapsed:.2}s"
    );
}

#[test]
fn acceptance_07_yosida_probe() {
    let (sys, quad) = scalar_example(2001);
    let z0 = StateFunction::from_scalar_fn(sys.profile(), |_| 1.0);
    let probe = yosida_probe(&sys, &quad, &z0, &[10.0, 100.0, 1000.0]).unwrap();

    // Closed form of the probe value for this system.
    let closed = |s: f64| (1.0 - (-s).exp()) / (1.0 + 0.5 * (-s).exp());
    for (k, &s) in probe.s_values.iter().enumerate() {
        let gap = (probe.values[k][0].re - closed(s)).abs();
        assert!(gap <= 1e-8, "probe vs closed form at s = {s}: {gap}");
    }
    assert!(
        probe.errors[0] > probe.errors[1] && probe.errors[1] > probe.errors[2],
        "errors must decrease: {:?}",
        probe.errors
    );
    assert!(probe.errors[1] <= 1e-4, "error at s = 100 is {}", probe.errors[1]);
    println!(
        "acceptance 7 (Yosida probe B*s(sI-A*)⁻¹g → B_d*(λ0 g)(0⁺)): PASS — errors {:.2e} > {:.2e} > {:.2e}",
        probe.errors[0], probe.errors[1], probe.errors[2]
    );
}

#[test]
fn acceptance_08_q_transform_pipeline() {
    let profile = SpatialProfile::constant(1.0, 2001).unwrap();
    for &c in &[-1.0, 0.5, 2.0] {
        let m: Vec<DenseMatrix> = (0..profile.len()).map(|_| DenseMatrix::scalar(c)).collect();
        let sys = BoundarySystem::new(
            DenseMatrix::scalar(-1.0),
            DenseMatrix::scalar(-0.5),
            DenseMatrix::scalar(-1.0),
            DenseMatrix::scalar(0.0),
            1,
            profile.clone(),
        )
        .unwrap()
        .with_zero_order(m)
        .unwrap();
        let (transformed, q1) = sys.q_transform().unwrap();
        let expect = (-c).exp();
        let gap = (q1[(0, 0)].re - expect).abs();
        assert!(gap <= 1e-8, "Q(1) gap {gap} for c = {c}");

        // The transformed quadruple must run through the whole pipeline.
        let quad = transformed.reduce().unwrap();
        let sol = solve_care(&quad, 1e-13, 200_000).expect("CARE on transformed system");
        let _ = solve_fare(&quad, 1e-13, 200_000).expect("FARE on transformed system");
        let grid = uniform_omega_grid(-50.0, 50.0, 101);
        let fact = factorization_residual(&quad, &sol, 1.0, &grid).unwrap();
        assert!(fact.max_residual <= 1e-9, "factorization after transform");
    }
    println!(
        "acceptance 8 (zero-order elimination): PASS — Q(1) = e^(-c) to 1e-8 for c in {{-1, 0.5, 2}}, pipeline clean"
    );
}

#[test]
fn acceptance_09_property_suite() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x9009);
    let mut lyapunov_checked = 0;
    let mut worst_monotone = f64::INFINITY;
    let mut worst_lyap = 0.0f64;
    let mut worst_dual = 0.0f64;
    for _ in 0..200 {
        let (n, p, m) = dims(&mut rng);
        let quad = random_quadruple(&mut rng, n, p, m, 0.9);
        let (sol, margin) =
            solve_care_monitored(&quad, 1e-13, 200_000).expect("CARE must converge");
        worst_monotone = worst_monotone.min(margin);

        let r_closed = spectral_radius(&sol.a_pi).unwrap();
        if r_closed < 1.0 - 1e-10 {
            let sigma = closed_loop_lyapunov(&quad, &sol.f_d).unwrap();
            let gap = (&sigma - &sol.pi).norm_fro() / (1.0 + sol.pi.norm_fro());
            worst_lyap = worst_lyap.max(gap);
            lyapunov_checked += 1;
        }

        let fare = solve_fare(&quad, 1e-13, 200_000).expect("FARE must converge");
        let dual = DiscreteQuadruple::new(
            quad.a_d.adjoint(),
            quad.c_d.adjoint(),
            quad.b_d.adjoint(),
            quad.d_d.adjoint(),
        )
        .unwrap();
        let dual_sol = solve_care(&dual, 1e-13, 200_000).unwrap();
        let dual_gap =
            (&fare.pi_tilde - &dual_sol.pi).norm_fro() / (1.0 + dual_sol.pi.norm_fro());
        worst_dual = worst_dual.max(dual_gap);
    }
    let elapsed = start.elapsed().as_secs_f64();

    assert!(worst_monotone >= -1e-12, "value-iteration monotonicity {worst_monotone}");
    assert!(worst_lyap <= 1e-9, "Π vs closed-loop Lyapunov gap {worst_lyap}");
    assert!(worst_dual <= 1e-9, "FARE/CARE duality gap {worst_dual}");
    assert!(lyapunov_checked > 0);
    assert!(elapsed < 30.0, "runtime {elapsed:.1}s exceeds 30s");
    println!(
        "acceptance 9 (property suite, 200 random quadruples): PASS — monotonicity ≥ {worst_monotone:.1e}, lyapunov ≤ {worst_lyap:.1e} ({lyapunov_checked} stable loops), duality ≤ {worst_dual:.1e}, {elapsed:.1}s"
    );
}
