use super::operators::{inner, norm2, LinearOperator};
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

/// Solves `(A^H A + lambda D^H D) f = A^H b` by conjugate gradients.
/// Stops when the residual falls below `cg_tol` relative to `||A^H b||`.
pub fn tikhonov_solve(
    a: &dyn LinearOperator,
    b: &[Complex64],
    lambda: f64,
    d: &dyn LinearOperator,
    cg_tol: f64,
    cg_maxit: usize,
) -> Result<Vec<Complex64>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    if a.out_dim() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "data vector",
            expected: a.out_dim(),
            actual: b.len(),
        });
    }
    if d.in_dim() != a.in_dim() {
        return Err(Error::DimensionMismatch {
            what: "regularizer input",
            expected: a.in_dim(),
            actual: d.in_dim(),
        });
    }
    let normal = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = a.apply_adjoint(&a.apply(x));
        if lambda > 0.0 {
            for (o, v) in y.iter_mut().zip(d.apply_adjoint(&d.apply(x))) {
                *o += lambda * v;
            }
        }
        y
    };
    let rhs = a.apply_adjoint(b);
    let scale = norm2(&rhs);
    let mut x = vec![Complex64::new(0.0, 0.0); a.in_dim()];
    if scale == 0.0 {
        return Ok(x);
    }
    let mut r = rhs;
    let mut p = r.clone();
    let mut rr = inner(&r, &r).re;
    for it in 0..cg_maxit {
        if rr.sqrt() <= cg_tol * scale {
            log::debug!("cg converged in {it} iterations");
            return Ok(x);
        }
        let ap = normal(&p);
        let pap = inner(&p, &ap).re;
        if !(pap > 0.0) {
            return Err(invalid("normal equations are singular along a search direction"));
        }
        let alpha = rr / pap;
        for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        let rr_new = inner(&r, &r).re;
        if !rr_new.is_finite() {
            return Err(Error::NonFinite { iteration: it + 1 });
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    if rr.sqrt() <= cg_tol * scale {
        return Ok(x);
    }
    Err(Error::NotConverged {
        iterations: cg_maxit,
        residual: rr.sqrt() / scale,
    })
}
