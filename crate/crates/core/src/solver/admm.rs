//! Complex ADMM for `min ||Af - b||^2 + lambda ||Tf||_1`.
//!
//! The augmented Lagrangian is
//! `L = ||Af-b||^2 + lambda ||g||_1 + beta/2 ||Tf-g||^2 - Re(sigma^H (Tf-g))`.

use super::operators::{inner, norm2, operator_norm_sq, LinearOperator};
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

/// `max(|z| - tau, 0) z/|z|`.
pub fn shrink(z: Complex64, tau: f64) -> Complex64 {
    let r = z.norm();
    if r <= tau || r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((r - tau) / r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Fixed step; `None` uses `1 / (2||A||^2 + beta ||T||^2)`.
    Fixed(Option<f64>),
    /// Barzilai-Borwein steps on the smooth part of the f-subproblem.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub lambda: f64,
    pub beta: f64,
    pub max_iters: usize,
    /// Stop once `||f_{k+1} - f_k|| / ||f_{k+1}||` drops below this; 0 disables.
    pub tol: f64,
    pub step: StepRule,
    /// Gradient steps per f-update.
    pub inner_iters: usize,
}

impl SolverConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            beta: 32.0,
            max_iters: 500,
            tol: 0.0,
            step: StepRule::Fixed(None),
            inner_iters: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be finite and nonnegative, got {}", self.lambda)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.tol >= 0.0) {
            return Err(invalid("tol must be nonnegative"));
        }
        if self.inner_iters == 0 {
            return Err(invalid("inner_iters must be at least 1"));
        }
        if let StepRule::Fixed(Some(t)) = self.step {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(format!("step must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    pub sigma: Vec<Complex64>,
    /// Objective at the initial iterate followed by one entry per iteration.
    pub objective_history: Vec<f64>,
    /// Relative change of `f` per iteration.
    pub residual_history: Vec<f64>,
}

impl SolverState {
    /// `g = 0`, `sigma = 0`.
    pub fn initial(f: Vec<Complex64>, k: usize) -> Self {
        Self {
            f,
            g: vec![Complex64::new(0.0, 0.0); k],
            sigma: vec![Complex64::new(0.0, 0.0); k],
            objective_history: Vec::new(),
            residual_history: Vec::new(),
        }
    }

    pub fn iterations(&self) -> usize {
        self.residual_history.len()
    }
}

pub(crate) fn check_dims(a: &dyn LinearOperator, t: &dyn LinearOperator, b: &[Complex64]) -> Result<()> {
    if a.out_dim() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "data vector",
            expected: a.out_dim(),
            actual: b.len(),
        });
    }
    if a.in_dim() != t.in_dim() {
        return Err(Error::DimensionMismatch {
            what: "regularizer input",
            expected: a.in_dim(),
            actual: t.in_dim(),
        });
    }
    Ok(())
}

fn misfit(a: &dyn LinearOperator, b: &[Complex64], f: &[Complex64]) -> f64 {
    a.apply(f).iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

fn l1(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).sum()
}

/// `||Af - b||^2 + lambda ||Tf||_1`.
pub fn objective(a: &dyn LinearOperator, t: &dyn LinearOperator, b: &[Complex64], f: &[Complex64], lambda: f64) -> f64 {
    misfit(a, b, f) + lambda * l1(&t.apply(f))
}

/// The augmented Lagrangian at `(f, g, sigma)`.
#[allow(clippy::too_many_arguments)]
pub fn lagrangian(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[Complex64],
    f: &[Complex64],
    g: &[Complex64],
    sigma: &[Complex64],
    lambda: f64,
    beta: f64,
) -> f64 {
    let tf = t.apply(f);
    let c: Vec<Complex64> = tf.iter().zip(g).map(|(x, y)| x - y).collect();
    misfit(a, b, f) + lambda * l1(g) + 0.5 * beta * norm2(&c).powi(2) - inner(sigma, &c).re
}

/// `2A^H(Af-b) + beta T^H(Tf-g) - T^H sigma`: the direction for which
/// `d/dt L(f + t v) = Re<grad, v>`.
#[allow(clippy::too_many_arguments)]
pub fn lagrangian_gradient(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[Complex64],
    f: &[Complex64],
    g: &[Complex64],
    sigma: &[Complex64],
    beta: f64,
) -> Vec<Complex64> {
    let r: Vec<Complex64> = a.apply(f).iter().zip(b).map(|(x, y)| x - y).collect();
    let tf = t.apply(f);
    let w: Vec<Complex64> = tf
        .iter()
        .zip(g)
        .zip(sigma)
        .map(|((x, y), s)| beta * (x - y) - s)
        .collect();
    let mut grad = a.apply_adjoint(&r);
    for (o, v) in grad.iter_mut().zip(t.apply_adjoint(&w)) {
        *o = 2.0 * *o + v;
    }
    grad
}

/// Barzilai-Borwein step `<df, df> / Re<df, dgrad>`, clamped to
/// `[1e-12, 1e6]`; `fallback` when the denominator is not positive.
pub fn spectral_step(
    f_prev: &[Complex64],
    f_cur: &[Complex64],
    grad_prev: &[Complex64],
    grad_cur: &[Complex64],
    fallback: f64,
) -> f64 {
    let df: Vec<Complex64> = f_cur.iter().zip(f_prev).map(|(x, y)| x - y).collect();
    let dg: Vec<Complex64> = grad_cur.iter().zip(grad_prev).map(|(x, y)| x - y).collect();
    let num = inner(&df, &df).re;
    let den = inner(&df, &dg).re;
    if !(den > 0.0) || !num.is_finite() {
        return fallback;
    }
    (num / den).clamp(1e-12, 1e6)
}

/// Runs the alternating updates from `f_init` (default `A^H b`).
pub fn admm_l1(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[Complex64],
    config: &SolverConfig,
    f_init: Option<Vec<Complex64>>,
) -> Result<SolverState> {
    let f0 = f_init.unwrap_or_else(|| a.apply_adjoint(b));
    let state = SolverState::initial(f0, t.out_dim());
    admm_continue(a, t, b, config, state)
}

/// Continues the iteration from an existing state.
pub fn admm_continue(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[Complex64],
    config: &SolverConfig,
    mut state: SolverState,
) -> Result<SolverState> {
    config.validate()?;
    check_dims(a, t, b)?;
    if state.f.len() != a.in_dim() {
        return Err(Error::DimensionMismatch {
            what: "initial iterate",
            expected: a.in_dim(),
            actual: state.f.len(),
        });
    }
    if state.g.len() != t.out_dim() || state.sigma.len() != t.out_dim() {
        return Err(Error::DimensionMismatch {
            what: "split variable",
            expected: t.out_dim(),
            actual: state.g.len().min(state.sigma.len()),
        });
    }
    let (lambda, beta) = (config.lambda, config.beta);
    let fixed = match config.step {
        StepRule::Fixed(Some(tau)) => tau,
        _ => {
            let la = operator_norm_sq(a, 50, 11);
            let lt = operator_norm_sq(t, 50, 13);
            1.0 / (2.0 * la + beta * lt).max(f64::MIN_POSITIVE)
        }
    };
    let ahb = a.apply_adjoint(b);
    let start = state.iterations();

    let mut af = a.apply(&state.f);
    let mut tf = t.apply(&state.f);
    if state.objective_history.is_empty() {
        let m: f64 = af.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        state.objective_history.push(m + lambda * l1(&tf));
    }
    // curvature part 2A^H A f + beta T^H T f of the gradient, for BB steps
    let mut prev: Option<(Vec<Complex64>, Vec<Complex64>)> = None;

    for it in start..start + config.max_iters {
        let f_before = state.f.clone();
        for _ in 0..config.inner_iters {
            let aha = a.apply_adjoint(&af);
            let tht = t.apply_adjoint(&tf);
            let rhs_t: Vec<Complex64> = state
                .g
                .iter()
                .zip(&state.sigma)
                .map(|(g, s)| beta * g + s)
                .collect();
            let th_rhs = t.apply_adjoint(&rhs_t);
            let curv: Vec<Complex64> = aha.iter().zip(&tht).map(|(x, y)| 2.0 * x + beta * y).collect();
            let grad: Vec<Complex64> = curv
                .iter()
                .zip(&ahb)
                .zip(&th_rhs)
                .map(|((c, h), r)| c - 2.0 * h - r)
                .collect();
            let tau = match (config.step, &prev) {
                (StepRule::Spectral, Some((fp, cp))) => spectral_step(fp, &state.f, cp, &curv, fixed),
                _ => fixed,
            };
            prev = Some((state.f.clone(), curv));
            for (x, d) in state.f.iter_mut().zip(&grad) {
                *x -= tau * d;
            }
            if state.f.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::NonFinite { iteration: it + 1 });
            }
            af = a.apply(&state.f);
            tf = t.apply(&state.f);
        }

        for ((g, s), x) in state.g.iter_mut().zip(&state.sigma).zip(&tf) {
            *g = shrink(x - s / beta, lambda / beta);
        }
        for ((s, g), x) in state.sigma.iter_mut().zip(&state.g).zip(&tf) {
            *s -= beta * (x - g);
        }

        let m: f64 = af.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let obj = m + lambda * l1(&tf);
        if !obj.is_finite() {
            return Err(Error::NonFinite { iteration: it + 1 });
        }
        state.objective_history.push(obj);
        let change: f64 = state
            .f
            .iter()
            .zip(&f_before)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let rel = change / norm2(&state.f).max(f64::MIN_POSITIVE);
        state.residual_history.push(rel);
        if rel < config.tol {
            log::debug!("admm stopped after {} iterations (relative change {rel:.3e})", it + 1);
            break;
        }
    }
    Ok(state)
}
