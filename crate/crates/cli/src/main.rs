//! `sarkit` command-line driver.
//!
//! Exit codes: 0 on success, 1 for invalid input or configuration, 2 when a
//! numerical procedure fails (non-convergence, non-finite iterates).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod diagnose;
mod form;
mod geometry_config;
mod kernel;
mod problem;
mod simulate;
mod solve;
mod stats;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "sarkit", version, about = "Spotlight SAR simulation, imaging and reconstruction")]
pub struct Cli {
    /// Seed for every random draw; required by stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path of the primary artifact.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate phase-history data (or 1-D Fourier data) from a synthetic scene.
    Simulate(simulate::Args),
    /// Form an image from phase-history data.
    Form(form::Args),
    /// Regularized reconstruction.
    Solve(solve::Args),
    /// Evaluate the analytic imaging kernel.
    Kernel(kernel::Args),
    /// Monte Carlo check of the random-phase power formulas.
    Stats(stats::Args),
    /// Optimality residuals and certificate of a solution.
    Diagnose(diagnose::Args),
}

pub struct Globals {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Globals {
    pub fn out(&self) -> Result<&Path> {
        self.out.as_deref().context("--out is required for this command")
    }

    pub fn seed(&self, why: &str) -> Result<u64> {
        self.seed
            .with_context(|| format!("--seed is required {why}"))
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("could not configure the thread pool")?;
    }
    let globals = Globals {
        seed: cli.seed,
        out: cli.out,
    };
    match cli.command {
        Command::Simulate(a) => simulate::run(&globals, a),
        Command::Form(a) => form::run(&globals, a),
        Command::Solve(a) => solve::run(&globals, a),
        Command::Kernel(a) => kernel::run(&globals, a),
        Command::Stats(a) => stats::run(&globals, a),
        Command::Diagnose(a) => diagnose::run(&globals, a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<sarkit::Error>())
        .any(sarkit::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

/// The context chain joined by ": ", skipping causes already spelled out
/// by the message that wraps them.
fn message(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", message(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
