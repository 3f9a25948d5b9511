//! First-order optimality checks for the l1 problem.

use super::admm::{check_dims, lagrangian_gradient, SolverState};
use super::operators::{norm_inf, LinearOperator};
use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `||grad_f L||_inf`.
    pub r_f: f64,
    /// Distance of `-(beta(g - Tf) + sigma)` from `lambda sign*(g)`.
    pub r_g: f64,
    /// `||Tf - g||_inf`.
    pub r_c: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.r_f.max(self.r_g).max(self.r_c)
    }
}

pub fn optimality_residuals(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[Complex64],
    state: &SolverState,
    lambda: f64,
    beta: f64,
) -> Result<Residuals> {
    check_dims(a, t, b)?;
    if state.f.len() != a.in_dim() || state.g.len() != t.out_dim() || state.sigma.len() != t.out_dim() {
        return Err(Error::DimensionMismatch {
            what: "solver state",
            expected: a.in_dim(),
            actual: state.f.len(),
        });
    }
    let grad = lagrangian_gradient(a, t, b, &state.f, &state.g, &state.sigma, beta);
    let tf = t.apply(&state.f);
    let mut r_g = 0.0f64;
    let mut r_c = 0.0f64;
    for ((g, s), x) in state.g.iter().zip(&state.sigma).zip(&tf) {
        let w = beta * (g - x) + s;
        let r = if g.norm() > 0.0 {
            (w + g / g.norm() * lambda).norm()
        } else {
            (w.norm() - lambda).max(0.0)
        };
        r_g = r_g.max(r);
        r_c = r_c.max((x - g).norm());
    }
    Ok(Residuals {
        r_f: norm_inf(&grad),
        r_g,
        r_c,
    })
}

/// `||x||_inf` for the least-squares solution of
/// `T_R^H x = -(mu A^H(Af-b) + T_S^H sign(T_S f))`, `mu = 2/lambda`,
/// where `S = {j : |(Tf)_j| > support_tol}` and `R` is its complement.
/// A value at most 1 certifies that `f` minimizes `||Af-b||^2 + lambda ||Tf||_1`.
pub fn subgradient_certificate(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[Complex64],
    f: &[Complex64],
    lambda: f64,
    support_tol: f64,
) -> Result<f64> {
    check_dims(a, t, b)?;
    if !(lambda > 0.0) {
        return Err(invalid("the certificate needs lambda > 0"));
    }
    let n = a.in_dim();
    if n > 2048 {
        return Err(invalid(format!("certificate is limited to n <= 2048, got {n}")));
    }
    let tf = t.apply(f);
    let rest: Vec<usize> = (0..tf.len()).filter(|&j| tf[j].norm() <= support_tol).collect();
    if rest.is_empty() {
        return Err(invalid("every entry of Tf is in the support; no certificate is defined"));
    }
    let signs: Vec<Complex64> = tf
        .iter()
        .map(|v| if v.norm() > support_tol { v / v.norm() } else { Complex64::new(0.0, 0.0) })
        .collect();
    let r: Vec<Complex64> = a.apply(f).iter().zip(b).map(|(x, y)| x - y).collect();
    let mu = 2.0 / lambda;
    let mut rhs = a.apply_adjoint(&r);
    for (o, v) in rhs.iter_mut().zip(t.apply_adjoint(&signs)) {
        *o = -(mu * *o + v);
    }

    let mut m = DMatrix::<Complex64>::zeros(n, rest.len());
    let mut e = vec![Complex64::new(0.0, 0.0); tf.len()];
    for (col, &j) in rest.iter().enumerate() {
        e[j] = Complex64::new(1.0, 0.0);
        for (row, v) in t.apply_adjoint(&e).into_iter().enumerate() {
            m[(row, col)] = v;
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    let svd = m.svd(true, true);
    let eps = svd.singular_values.max() * 1e-10;
    let x = svd
        .solve(&DVector::from_vec(rhs), eps)
        .map_err(|msg| invalid(format!("least-squares solve failed: {msg}")))?;
    Ok(x.iter().map(|v| v.norm()).fold(0.0, f64::max))
}
