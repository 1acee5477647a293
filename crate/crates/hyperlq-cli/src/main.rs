//! `hyperlq` — LQ-optimal boundary feedback for 1-D hyperbolic transport
//! systems: reduction to the discrete quadruple, Riccati synthesis,
//! identity verification, frequency sweeps, and exact closed-loop
//! simulation.
//!
//! Exit codes: 0 ok, 1 validation failure, 2 convergence failure,
//! 3 stability failure.

mod commands;
mod config;
mod error;
mod parallel;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "hyperlq",
    version,
    about = "LQ-optimal boundary feedback synthesis for 1-D hyperbolic transport systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a system description and print the reduced quadruple as JSON
    Reduce {
        /// JSON system description
        config: PathBuf,
    },
    /// Solve the control and filter Riccati equations; print the synthesis report
    Solve {
        config: PathBuf,
        /// Relative step tolerance of the value iteration
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        /// Iteration budget
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
    },
    /// Check the Riccati identities, spectral factorization, coercivity,
    /// the Ω-gap, and the Yosida probe; print the residual report
    Verify {
        config: PathBuf,
        /// Seeded test pairs per identity (0 = frequency checks only)
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Base seed; pair k uses seed + k
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Polynomial degree of the test functions
        #[arg(long, default_value_t = 8)]
        degree: usize,
    },
    /// Sweep transfer and Popov functions over frequencies; emit CSV
    Popov {
        config: PathBuf,
        /// Lower frequency bound (default -50/p1)
        #[arg(long)]
        omega_min: Option<f64>,
        /// Upper frequency bound (default 50/p1)
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        /// CSV output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the closed loop exactly and compare measured, tail, and
    /// predicted costs; emit a trace CSV and a summary JSON
    Simulate {
        config: PathBuf,
        #[arg(long, default_value_t = 40)]
        periods: usize,
        #[arg(long, default_value_t = 512)]
        points_per_period: usize,
        /// "optimal", "zero", or a JSON row-major matrix such as "[[0.3]]"
        #[arg(long, default_value = "optimal")]
        gain: String,
        /// Trace CSV output path
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Reduce { config } => commands::cmd_reduce(config),
        Command::Solve {
            config,
            tol,
            max_iter,
        } => commands::cmd_solve(config, *tol, *max_iter),
        Command::Verify {
            config,
            trials,
            seed,
            degree,
        } => commands::cmd_verify(config, *trials, *seed, *degree),
        Command::Popov {
            config,
            omega_min,
            omega_max,
            points,
            out,
        } => commands::cmd_popov(config, *omega_min, *omega_max, *points, out.as_deref()),
        Command::Simulate {
            config,
            periods,
            points_per_period,
            gain,
            out,
        } => commands::cmd_simulate(config, *periods, *points_per_period, gain, out),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
