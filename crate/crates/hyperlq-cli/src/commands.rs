//! The five pipeline commands: reduce, solve, verify, popov, simulate.

use std::io::Write;
use std::path::Path;

use hyperlq_core::frequency::{
    coercivity_margin, factorization_residual, hinf_proxy, omega_limit_check,
    sample as frequency_sample, uniform_omega_grid, FrequencyError,
};
use hyperlq_core::model::StateFunction;
use hyperlq_core::numerics::min_eigenvalue_hermitian;
use hyperlq_core::pde::{initial_trace, optimal_cost, simulate_closed_loop};
use hyperlq_core::riccati::{
    solve_care, solve_fare, stability_certificate, uniqueness_certificate, RiccatiSolution,
};
use hyperlq_core::verify::{
    make_test_pair_with_degree, naive_residual, node_residual, weiss_weiss_residual, Membership,
};
use hyperlq_core::{Complex64, DenseMatrix, DiscreteQuadruple};
use serde_json::{json, Value};

use crate::config::{Loaded, SystemConfig};
use crate::error::CmdError;
use crate::parallel::{ordered_map, thread_cap};
use crate::report::{csv_cell, matrix_value, to_json};

fn load(config: &Path) -> Result<Loaded, CmdError> {
    SystemConfig::from_file(config)?.load()
}

pub fn cmd_reduce(config: &Path) -> Result<(), CmdError> {
    let loaded = load(config)?;
    let report = json!({
        "A_d": matrix_value(&loaded.quad.a_d),
        "B_d": matrix_value(&loaded.quad.b_d),
        "C_d": matrix_value(&loaded.quad.c_d),
        "D_d": matrix_value(&loaded.quad.d_d),
        "p1": loaded.p1,
    });
    println!("{}", to_json(&report));
    Ok(())
}

fn synthesis_report(
    quad: &DiscreteQuadruple,
    tol: f64,
    max_iter: usize,
) -> Result<Value, CmdError> {
    let care = solve_care(quad, tol, max_iter)?;
    let fare = solve_fare(quad, tol, max_iter);
    let stability = stability_certificate(quad, &care)?;
    let uniqueness = uniqueness_certificate(&care, fare.as_ref())?;
    let fare_value = match &fare {
        Ok(f) => json!({
            "Pi_tilde": matrix_value(&f.pi_tilde),
            "residual": f.residual,
            "iterations": f.iterations,
        }),
        Err(_) => Value::Null,
    };
    let report = json!({
        "Pi": matrix_value(&care.pi),
        "P": matrix_value(&care.p),
        "V": matrix_value(&care.v),
        "F_d": matrix_value(&care.f_d),
        "Omega": matrix_value(&care.omega),
        "A_Pi": matrix_value(&care.a_pi),
        "care_residual": care.residual,
        "care_iterations": care.iterations,
        "r_open": stability.r_open,
        "r_closed": stability.r_closed,
        "stable": stability.stable,
        "fare": fare_value,
        "fare_solvable": uniqueness.fare_solvable,
        "unique": uniqueness.unique,
    });
    Ok(report)
}

pub fn cmd_solve(config: &Path, tol: f64, max_iter: usize) -> Result<(), CmdError> {
    let loaded = load(config)?;
    let report = synthesis_report(&loaded.quad, tol, max_iter)?;
    println!("{}", to_json(&report));
    Ok(())
}

/// Split a grid into one contiguous chunk per worker.
fn grid_chunks(grid: &[f64]) -> Vec<&[f64]> {
    let workers = thread_cap().clamp(1, grid.len().max(1));
    let size = grid.len().div_ceil(workers);
    grid.chunks(size.max(1)).collect()
}

pub fn cmd_verify(
    config: &Path,
    trials: usize,
    seed: u64,
    degree: usize,
) -> Result<(), CmdError> {
    let loaded = load(config)?;
    let quad = &loaded.quad;
    let care = solve_care(quad, 1e-13, 200_000)?;
    let fare = solve_fare(quad, 1e-13, 200_000);
    let uniqueness = uniqueness_certificate(&care, fare.as_ref())?;

    // Identity residuals over seeded pairs, worst case reported.
    let (node_max, weiss_max, naive_max) = if trials > 0 {
        let seeds: Vec<u64> = (0..trials as u64).map(|k| seed.wrapping_add(k)).collect();
        let triples = ordered_map(&seeds, |&sd| -> Result<(f64, f64, f64), CmdError> {
            let s_pair = make_test_pair_with_degree(quad, sd, Membership::DomainS, degree);
            let a_pair = make_test_pair_with_degree(quad, sd, Membership::DomainA, degree);
            Ok((
                node_residual(quad, &care, &s_pair)?,
                weiss_weiss_residual(quad, &care, &a_pair)?,
                naive_residual(quad, &care, &a_pair)?,
            ))
        });
        let mut maxima = (0.0f64, 0.0f64, 0.0f64);
        for t in triples {
            let (n, w, v) = t?;
            maxima = (maxima.0.max(n), maxima.1.max(w), maxima.2.max(v));
        }
        (
            Value::from(maxima.0),
            Value::from(maxima.1),
            Value::from(maxima.2),
        )
    } else {
        (Value::Null, Value::Null, Value::Null)
    };

    // Frequency-domain checks over the default grid, chunked per worker.
    let grid = hyperlq_core::frequency::default_omega_grid(loaded.p1);
    let chunks = grid_chunks(&grid);
    let fact_parts = ordered_map(&chunks, |chunk| {
        factorization_residual(quad, &care, loaded.p1, chunk)
    });
    let coer_parts = ordered_map(&chunks, |chunk| coercivity_margin(quad, loaded.p1, chunk));
    let mut fact_max = 0.0f64;
    let mut fact_worst = f64::NAN;
    let mut margin = f64::INFINITY;
    let mut skipped: Vec<f64> = Vec::new();
    for part in fact_parts {
        let part = part?;
        if part.evaluated > 0 && (part.max_residual > fact_max || fact_worst.is_nan()) {
            fact_max = part.max_residual;
            fact_worst = part.worst_omega;
        }
        skipped.extend(part.skipped);
    }
    for part in coer_parts {
        let part = part?;
        if part.evaluated > 0 {
            margin = margin.min(part.margin);
        }
    }

    let omega_report = omega_limit_check(quad, &care);
    let proxy = hinf_proxy(quad, &care)?;

    // Yosida probe with g ≡ 1 against the boundary target.
    let probe_s: Vec<f64> = [10.0, 100.0, 1000.0]
        .into_iter()
        .filter(|s| s * loaded.p1 <= hyperlq_core::tol::RESOLVENT_S_MAX)
        .collect();
    let ones = StateFunction::constant(
        loaded.system.profile(),
        vec![Complex64::new(1.0, 0.0); quad.n()],
    );
    let probe = hyperlq_core::pde::yosida_probe(&loaded.system, quad, &ones, &probe_s)?;
    let yosida = json!({
        "s": probe.s_values,
        "error": probe.errors,
        "target": probe.target.iter().map(|z| z.re).collect::<Vec<f64>>(),
        "value": probe
            .values
            .iter()
            .map(|v| v.iter().map(|z| z.re).collect::<Vec<f64>>())
            .collect::<Vec<_>>(),
    });

    let report = json!({
        "trials": trials,
        "seed": seed,
        "degree": degree,
        "node_residual_max": node_max,
        "weiss_weiss_residual_max": weiss_max,
        "naive_residual_max": naive_max,
        "factorization_residual": fact_max,
        "factorization_worst_omega": fact_worst,
        "coercivity_margin": margin,
        "skipped_poles": skipped,
        "omega_gap": omega_report.gap,
        "care_residual": care.residual,
        "unique": uniqueness.unique,
        "hinf_proxy": {
            "r_open": proxy.r_open,
            "r_closed": proxy.r_closed,
            "chi_bounded": proxy.chi_bounded,
            "chi_inv_bounded": proxy.chi_inv_bounded,
        },
        "yosida": yosida,
    });
    println!("{}", to_json(&report));
    Ok(())
}

enum PopovRow {
    Value {
        omega: f64,
        sample: hyperlq_core::frequency::FrequencySample,
        min_eig_phi: f64,
    },
    PoleSkipped {
        omega: f64,
    },
}

pub fn cmd_popov(
    config: &Path,
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    points: usize,
    out: Option<&Path>,
) -> Result<(), CmdError> {
    let loaded = load(config)?;
    let quad = &loaded.quad;
    let care = solve_care(quad, 1e-13, 200_000)?;
    let lo = omega_min.unwrap_or(-50.0 / loaded.p1);
    let hi = omega_max.unwrap_or(50.0 / loaded.p1);
    let grid = uniform_omega_grid(lo, hi, points);

    let rows = ordered_map(&grid, |&omega| -> Result<PopovRow, CmdError> {
        let sample = match frequency_sample(quad, &care, loaded.p1, omega) {
            Ok(sample) => sample,
            Err(FrequencyError::PoleHit) => return Ok(PopovRow::PoleSkipped { omega }),
            Err(e) => return Err(e.into()),
        };
        let min_eig_phi = min_eigenvalue_hermitian(&sample.phi)?;
        Ok(PopovRow::Value {
            omega,
            sample,
            min_eig_phi,
        })
    });

    let mut text = String::new();
    text.push_str("omega");
    for i in 0..quad.outputs() {
        for j in 0..quad.inputs() {
            text.push_str(&format!(",G_{i}_{j}_re,G_{i}_{j}_im"));
        }
    }
    text.push_str(",min_eig_phi,fact_residual,pole_skipped\n");
    let blank_cells = 2 * quad.outputs() * quad.inputs() + 2;
    for row in rows {
        match row? {
            PopovRow::Value {
                omega,
                sample,
                min_eig_phi,
            } => {
                text.push_str(&csv_cell(omega));
                for i in 0..sample.transfer.rows() {
                    for j in 0..sample.transfer.cols() {
                        let z = sample.transfer[(i, j)];
                        text.push_str(&format!(",{},{}", csv_cell(z.re), csv_cell(z.im)));
                    }
                }
                text.push_str(&format!(
                    ",{},{},0\n",
                    csv_cell(min_eig_phi),
                    csv_cell(sample.factorization_residual)
                ));
            }
            PopovRow::PoleSkipped { omega } => {
                text.push_str(&csv_cell(omega));
                for _ in 0..blank_cells {
                    text.push(',');
                }
                text.push_str(",1\n");
            }
        }
    }
    write_output(out, &text)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CmdError> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| {
                CmdError::validation(format!("cannot write {}: {e}", path.display()))
            })?;
            file.write_all(text.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_gain(
    spec: &str,
    care: &RiccatiSolution,
    quad: &DiscreteQuadruple,
) -> Result<DenseMatrix, CmdError> {
    match spec {
        "optimal" => Ok(care.f_d.clone()),
        "zero" => Ok(DenseMatrix::zeros(quad.inputs(), quad.n())),
        text => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| {
                CmdError::validation(format!(
                    "--gain must be 'optimal', 'zero', or a JSON matrix: {e}"
                ))
            })?;
            if rows.len() != quad.inputs() || rows.iter().any(|r| r.len() != quad.n()) {
                return Err(CmdError::validation(format!(
                    "custom gain must be {}x{}",
                    quad.inputs(),
                    quad.n()
                )));
            }
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            Ok(DenseMatrix::from_real(quad.inputs(), quad.n(), &flat))
        }
    }
}

pub fn cmd_simulate(
    config: &Path,
    periods: usize,
    points_per_period: usize,
    gain_spec: &str,
    out: &Path,
) -> Result<(), CmdError> {
    let loaded = load(config)?;
    let quad = &loaded.quad;
    let care = solve_care(quad, 1e-13, 200_000)?;
    let fare = solve_fare(quad, 1e-13, 200_000);
    let uniqueness = uniqueness_certificate(&care, fare.as_ref())?;
    let gain = parse_gain(gain_spec, &care, quad)?;

    let result = simulate_closed_loop(
        &loaded.system,
        quad,
        &gain,
        &loaded.z0,
        periods,
        points_per_period,
        true,
    )?;
    let best = optimal_cost(&loaded.system, &care, &loaded.z0, Some(&uniqueness))?;

    // Trace CSV: for periods = 0 emit the one-period initial trace.
    let (dt, samples) = if periods == 0 {
        let init = initial_trace(&loaded.system, &loaded.z0, points_per_period)?;
        (init.dt, init.samples)
    } else {
        (result.trace.dt, result.trace.samples.clone())
    };
    let mut text = String::new();
    text.push('t');
    for i in 0..quad.n() {
        text.push_str(&format!(",w1_{i}"));
    }
    for j in 0..quad.inputs() {
        text.push_str(&format!(",u_{j}"));
    }
    for k in 0..quad.outputs() {
        text.push_str(&format!(",y_{k}"));
    }
    text.push('\n');
    let c_f = &quad.c_d + &(&quad.d_d * &gain);
    for (k, w) in samples.iter().enumerate() {
        text.push_str(&csv_cell(k as f64 * dt));
        let u = gain.mul_vec(w);
        let y = c_f.mul_vec(w);
        for z in w.iter().chain(&u).chain(&y) {
            text.push_str(&format!(",{}", csv_cell(z.re)));
        }
        text.push('\n');
    }
    write_output(Some(out), &text)?;

    let summary = json!({
        "measured_cost": result.measured_cost,
        "tail_cost": result.tail_cost,
        "predicted_cost": result.predicted_cost,
        "optimal_cost": best.value,
        "optimal_cost_certified": best.certified,
        "periods": periods,
        "points_per_period": points_per_period,
        "gain": matrix_value(&gain),
        "period_costs": result.period_costs,
        "trace_file": out.display().to_string(),
    });
    println!("{}", to_json(&summary));
    Ok(())
}
