use crate::problem::{self, companion, Reg};
use crate::Globals;
use anyhow::{bail, Result};
use sarkit::io::{write_csv, write_vector};
use num_complex::Complex64;
use sarkit::solver::{admm_l1, LinearOperator, objective, optimality_residuals, tikhonov_solve, SolverConfig, StepRule};
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Phase-history or Fourier-coefficient file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    reg: Reg,
    #[arg(long)]
    lambda: f64,
    /// Augmented-Lagrangian penalty.
    #[arg(long, default_value_t = 32.0)]
    beta: f64,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Stop once the relative change of the iterate drops below this.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    /// Barzilai-Borwein steps instead of the fixed step.
    #[arg(long)]
    spectral: bool,
    #[arg(long, default_value_t = 1e-10)]
    cg_tol: f64,
    #[arg(long, default_value_t = 1000)]
    cg_maxit: usize,
    /// Objective history CSV (default `<out>.history.csv`).
    #[arg(long)]
    history: Option<PathBuf>,
}

/// `c A^H b` with `c` minimizing `||c A A^H b - b||`; equals `A^H b` when
/// `A A^H = I`.
fn scaled_adjoint(a: &dyn LinearOperator, b: &[Complex64]) -> Vec<Complex64> {
    let f = a.apply_adjoint(b);
    let af = a.apply(&f);
    let den: f64 = af.iter().map(|v| v.norm_sqr()).sum();
    let num: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    if den > 0.0 {
        f.into_iter().map(|v| v * (num / den)).collect()
    } else {
        f
    }
}

pub fn run(g: &Globals, a: Args) -> Result<()> {
    let out = g.out()?;
    if !(a.lambda >= 0.0) {
        bail!("--lambda must be nonnegative");
    }
    let p = problem::load(&a.input)?;

    if a.reg == Reg::Tikhonov {
        let d = p.differences()?;
        let f = tikhonov_solve(p.a.as_ref(), &p.b, a.lambda, d.as_ref(), a.cg_tol, a.cg_maxit)?;
        let misfit = objective(p.a.as_ref(), d.as_ref(), &p.b, &f, 0.0);
        println!("tikhonov: data misfit {misfit:.6e}");
        p.write_solution(out, f)?;
        return Ok(());
    }

    let t = p.regularizer(a.reg)?;
    let cfg = SolverConfig {
        lambda: a.lambda,
        beta: a.beta,
        max_iters: a.iters,
        tol: a.tol,
        step: if a.spectral { StepRule::Spectral } else { StepRule::Fixed(None) },
        inner_iters: 1,
    };
    let state = admm_l1(p.a.as_ref(), t.as_ref(), &p.b, &cfg, Some(scaled_adjoint(p.a.as_ref(), &p.b)))?;
    let r = optimality_residuals(p.a.as_ref(), t.as_ref(), &p.b, &state, a.lambda, a.beta)?;
    println!(
        "{} iterations, objective {:.6e} -> {:.6e}",
        state.iterations(),
        state.objective_history[0],
        state.objective_history[state.objective_history.len() - 1]
    );
    println!("residuals: r_f {:.3e} r_g {:.3e} r_c {:.3e}", r.r_f, r.r_g, r.r_c);

    let history = a.history.unwrap_or_else(|| companion(out, "history.csv"));
    let rows = state.objective_history.iter().enumerate().map(|(i, &obj)| {
        let change = if i == 0 { 0.0 } else { state.residual_history[i - 1] };
        vec![i as f64, obj, change]
    });
    write_csv(&history, &["iteration", "objective", "relative_change"], rows)?;
    write_csv(
        &companion(out, "residuals.csv"),
        &["r_f", "r_g", "r_c"],
        [vec![r.r_f, r.r_g, r.r_c]],
    )?;
    write_vector(&companion(out, "g"), &state.g)?;
    write_vector(&companion(out, "sigma"), &state.sigma)?;
    p.write_solution(out, state.f)?;
    Ok(())
}
