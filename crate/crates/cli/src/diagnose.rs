use crate::problem::{self, companion, Reg};
use crate::Globals;
use anyhow::{bail, Context, Result};
use sarkit::io::{read_complex, read_vector, write_csv};
use sarkit::solver::{objective, optimality_residuals, subgradient_certificate, SolverState};
use std::path::PathBuf;

/// Largest problem for which the dense certificate is attempted.
const CERTIFICATE_MAX_N: usize = 2048;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// The data the solution was computed from.
    #[arg(long)]
    input: PathBuf,
    /// Solution written by `solve`; its `.g` and `.sigma` companions are used when present.
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, value_enum)]
    reg: Reg,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 32.0)]
    beta: f64,
    /// Threshold defining the support of Tf for the certificate.
    #[arg(long, default_value_t = 1e-3)]
    support_tol: f64,
}

pub fn run(g: &Globals, a: Args) -> Result<()> {
    if a.reg == Reg::Tikhonov {
        bail!("diagnose applies to the l1-type problems (tv, l1, ptv)");
    }
    let out = g.out()?;
    let p = problem::load(&a.input)?;
    let t = p.regularizer(a.reg)?;
    let (_, f) = read_complex(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    if f.len() != p.n() {
        bail!("solution has {} values, the problem {}", f.len(), p.n());
    }
    let (gpath, spath) = (companion(&a.solution, "g"), companion(&a.solution, "sigma"));
    let (gv, sigma) = if gpath.exists() && spath.exists() {
        (read_vector(&gpath)?, read_vector(&spath)?)
    } else {
        log::warn!("no solver state next to the solution; using g = Tf and sigma = 0");
        (t.apply(&f), vec![num_complex::Complex64::new(0.0, 0.0); t.out_dim()])
    };
    let state = SolverState {
        f,
        g: gv,
        sigma,
        objective_history: Vec::new(),
        residual_history: Vec::new(),
    };
    let r = optimality_residuals(p.a.as_ref(), t.as_ref(), &p.b, &state, a.lambda, a.beta)?;
    let obj = objective(p.a.as_ref(), t.as_ref(), &p.b, &state.f, a.lambda);
    let cert = if p.n() <= CERTIFICATE_MAX_N {
        match subgradient_certificate(p.a.as_ref(), t.as_ref(), &p.b, &state.f, a.lambda, a.support_tol) {
            Ok(c) => Some(c),
            Err(e) => {
                log::warn!("no certificate: {e}");
                None
            }
        }
    } else {
        None
    };
    println!("objective {obj:.6e}");
    println!("residuals: r_f {:.3e} r_g {:.3e} r_c {:.3e}", r.r_f, r.r_g, r.r_c);
    match cert {
        Some(c) => println!("certificate {c:.6}"),
        None => println!("certificate unavailable"),
    }
    write_csv(
        out,
        &["r_f", "r_g", "r_c", "objective", "certificate"],
        [vec![r.r_f, r.r_g, r.r_c, obj, cert.unwrap_or(f64::NAN)]],
    )?;
    Ok(())
}
