//! Linear operators used by the regularized solvers.

use crate::error::{invalid, Error, Result};
use crate::fourier::{fft_in_place, Direction};
use crate::forward::{simulate_phase_history, PhaseHistory};
use crate::geometry::{AcquisitionGeometry, SceneSpec};
use crate::imaging::matched_filter;
use crate::rng::{streams, CounterRng};
use crate::scene::ComplexImage;
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A linear map `C^in -> C^out` together with its conjugate transpose.
pub trait LinearOperator: Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64>;
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        (**self).apply_adjoint(y)
    }
}

/// `<x, y> = sum conj(x_j) y_j`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn probe(len: usize, seed: u64, offset: u64) -> Vec<Complex64> {
    let rng = CounterRng::new(seed, streams::PROBE);
    let mut u = vec![0.0; 2 * len];
    rng.fill_uniform(offset, &mut u);
    u.chunks_exact(2).map(|w| Complex64::new(w[0] - 0.5, w[1] - 0.5)).collect()
}

/// Relative mismatch `|<Ax, y> - <x, A^H y>| / (||Ax|| ||y||)` on random
/// probe vectors.
pub fn adjoint_mismatch(op: &dyn LinearOperator, seed: u64) -> f64 {
    let x = probe(op.in_dim(), seed, 0);
    let y = probe(op.out_dim(), seed, 1 << 40);
    let ax = op.apply(&x);
    let ahy = op.apply_adjoint(&y);
    let lhs = inner(&ax, &y);
    let rhs = inner(&x, &ahy);
    let scale = (norm2(&ax) * norm2(&y)).max(norm2(&x) * norm2(&ahy)).max(f64::MIN_POSITIVE);
    (lhs - rhs).norm() / scale
}

fn debug_check(op: &dyn LinearOperator) {
    debug_assert!(
        adjoint_mismatch(op, 7) < 1e-8,
        "operator adjoint is inconsistent with its forward map"
    );
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { what, expected, actual });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Wraps around: `n` outputs, the last one `x_0 - x_{n-1}`.
    Circulant,
    /// Only differences inside the vector: `n - order` outputs.
    Truncated,
}

/// Forward difference `(Dx)_j = x_{j+1} - x_j`, or its square for order 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Difference {
    n: usize,
    order: usize,
    boundary: Boundary,
}

pub fn difference_operator(n: usize, order: usize, boundary: Boundary) -> Result<Difference> {
    if !(order == 1 || order == 2) {
        return Err(invalid(format!("difference order must be 1 or 2, got {order}")));
    }
    if n < order + 1 {
        return Err(invalid(format!("difference of order {order} needs n >= {}, got {n}", order + 1)));
    }
    let d = Difference { n, order, boundary };
    debug_check(&d);
    Ok(d)
}

fn diff_once(x: &[Complex64], boundary: Boundary) -> Vec<Complex64> {
    let n = x.len();
    let mut out: Vec<Complex64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    if boundary == Boundary::Circulant {
        out.push(x[0] - x[n - 1]);
    }
    out
}

/// Adjoint of [`diff_once`] back to length `n`.
fn diff_once_adjoint(y: &[Complex64], n: usize, boundary: Boundary) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    for (j, v) in y.iter().enumerate() {
        let next = (j + 1) % n;
        out[next] += v;
        out[j] -= v;
    }
    debug_assert!(boundary == Boundary::Circulant || y.len() == n - 1);
    out
}

impl LinearOperator for Difference {
    fn in_dim(&self) -> usize {
        self.n
    }

    fn out_dim(&self) -> usize {
        match self.boundary {
            Boundary::Circulant => self.n,
            Boundary::Truncated => self.n - self.order,
        }
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let once = diff_once(x, self.boundary);
        if self.order == 1 {
            once
        } else {
            diff_once(&once, self.boundary)
        }
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        match (self.order, self.boundary) {
            (1, b) => diff_once_adjoint(y, self.n, b),
            (_, Boundary::Circulant) => {
                let mid = diff_once_adjoint(y, self.n, Boundary::Circulant);
                diff_once_adjoint(&mid, self.n, Boundary::Circulant)
            }
            (_, Boundary::Truncated) => {
                let mid = diff_once_adjoint(y, self.n - 1, Boundary::Truncated);
                diff_once_adjoint(&mid, self.n, Boundary::Truncated)
            }
        }
    }
}

/// Forward differences of an `n x n` row-major image along both axes,
/// stacked: first the differences along rows (`x`), then along columns (`y`).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient2d {
    n: usize,
    boundary: Boundary,
}

pub fn gradient_2d(n: usize, boundary: Boundary) -> Result<Gradient2d> {
    if n < 2 {
        return Err(invalid(format!("gradient needs an image side of at least 2, got {n}")));
    }
    let g = Gradient2d { n, boundary };
    debug_check(&g);
    Ok(g)
}

impl Gradient2d {
    fn m(&self) -> usize {
        match self.boundary {
            Boundary::Circulant => self.n,
            Boundary::Truncated => self.n - 1,
        }
    }
}

impl LinearOperator for Gradient2d {
    fn in_dim(&self) -> usize {
        self.n * self.n
    }

    fn out_dim(&self) -> usize {
        2 * self.m() * self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (n, m) = (self.n, self.m());
        let mut out = vec![ZERO; 2 * m * n];
        let (dx, dy) = out.split_at_mut(m * n);
        // dx[i, c] = x[i+1, c] - x[i, c]
        for i in 0..m {
            let next = (i + 1) % n;
            for c in 0..n {
                dx[i * n + c] = x[next * n + c] - x[i * n + c];
            }
        }
        // dy[r, i] = x[r, i+1] - x[r, i]
        for r in 0..n {
            for i in 0..m {
                let next = (i + 1) % n;
                dy[r * m + i] = x[r * n + next] - x[r * n + i];
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let (n, m) = (self.n, self.m());
        let (dx, dy) = y.split_at(m * n);
        let mut out = vec![ZERO; n * n];
        for i in 0..m {
            let next = (i + 1) % n;
            for c in 0..n {
                let v = dx[i * n + c];
                out[next * n + c] += v;
                out[i * n + c] -= v;
            }
        }
        for r in 0..n {
            for i in 0..m {
                let next = (i + 1) % n;
                let v = dy[r * m + i];
                out[r * n + next] += v;
                out[r * n + i] -= v;
            }
        }
        out
    }
}

/// Diagonal `Theta = diag(exp(-i arg f0_j))`; zero entries of `f0` get 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiag {
    phases: Vec<Complex64>,
}

pub fn phase_diag(f0: &[Complex64]) -> PhaseDiag {
    let phases = f0
        .iter()
        .map(|v| {
            let r = v.norm();
            if r == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                v.conj() / r
            }
        })
        .collect();
    PhaseDiag { phases }
}

impl LinearOperator for PhaseDiag {
    fn in_dim(&self) -> usize {
        self.phases.len()
    }
    fn out_dim(&self) -> usize {
        self.phases.len()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.iter().zip(&self.phases).map(|(a, p)| a * p).collect()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        y.iter().zip(&self.phases).map(|(a, p)| a * p.conj()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn in_dim(&self) -> usize {
        self.0
    }
    fn out_dim(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.to_vec()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        y.to_vec()
    }
}

/// `outer . inner`.
pub struct Composed {
    outer: Box<dyn LinearOperator>,
    inner: Box<dyn LinearOperator>,
}

pub fn compose(outer: Box<dyn LinearOperator>, inner: Box<dyn LinearOperator>) -> Result<Composed> {
    check_len("composed operator inner dimension", outer.in_dim(), inner.out_dim())?;
    let c = Composed { outer, inner };
    debug_check(&c);
    Ok(c)
}

impl LinearOperator for Composed {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.outer.apply(&self.inner.apply(x))
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.inner.apply_adjoint(&self.outer.apply_adjoint(y))
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Dense {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_len("dense matrix entries", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Materializes any operator column by column.
    pub fn from_operator(op: &dyn LinearOperator) -> Self {
        let (rows, cols) = (op.out_dim(), op.in_dim());
        let mut data = vec![ZERO; rows * cols];
        let mut e = vec![ZERO; cols];
        for c in 0..cols {
            e[c] = Complex64::new(1.0, 0.0);
            for (r, v) in op.apply(&e).into_iter().enumerate() {
                data[r * cols + c] = v;
            }
            e[c] = ZERO;
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

impl LinearOperator for Dense {
    fn in_dim(&self) -> usize {
        self.cols
    }
    fn out_dim(&self) -> usize {
        self.rows
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.cols];
        for (row, v) in self.data.chunks_exact(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * v;
            }
        }
        out
    }
}

/// Selected rows of the unitary DFT: `(Ax)_r = n^{-1/2} sum_j x_j exp(-2 pi i k_r j / n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFourier {
    n: usize,
    rows: Vec<usize>,
}

pub fn partial_fourier(n: usize, rows: Vec<usize>) -> Result<PartialFourier> {
    if n == 0 {
        return Err(invalid("transform length must be positive"));
    }
    if let Some(r) = rows.iter().find(|&&r| r >= n) {
        return Err(invalid(format!("row {r} out of range for a length-{n} transform")));
    }
    let op = PartialFourier { n, rows };
    debug_check(&op);
    Ok(op)
}

/// `count` distinct rows of `0..n` chosen by a seeded shuffle, in
/// increasing order.
pub fn random_rows(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let rng = CounterRng::new(seed, streams::PROBE);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.uniform(i as u64) * (i + 1) as f64) as usize;
        idx.swap(i, j.min(i));
    }
    let mut rows = idx[..count.min(n)].to_vec();
    rows.sort_unstable();
    rows
}

impl PartialFourier {
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }
}

impl LinearOperator for PartialFourier {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.rows.len()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        fft_in_place(&mut buf, Direction::Forward);
        let s = 1.0 / (self.n as f64).sqrt();
        self.rows.iter().map(|&r| buf[r] * s).collect()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![ZERO; self.n];
        for (&r, v) in self.rows.iter().zip(y) {
            buf[r] += v;
        }
        fft_in_place(&mut buf, Direction::Inverse);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter().map(|v| v * s).collect()
    }
}

/// Fourier coefficients of a signal sampled on `x_j = origin + period j / n`,
/// by the Riemann sum `(Af)_k = n^{-1} sum_j f_j exp(-2 pi i k x_j / period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSamples {
    n: usize,
    ks: Vec<i64>,
    origin: f64,
    period: f64,
}

pub fn fourier_samples(n: usize, ks: Vec<i64>, origin: f64, period: f64) -> Result<FourierSamples> {
    if n == 0 || !(period > 0.0) {
        return Err(invalid("Fourier sampling needs n >= 1 and a positive period"));
    }
    let op = FourierSamples { n, ks, origin, period };
    debug_check(&op);
    Ok(op)
}

impl FourierSamples {
    pub fn ks(&self) -> &[i64] {
        &self.ks
    }

    fn shift(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0 / self.n as f64, -2.0 * PI * k as f64 * self.origin / self.period)
    }
}

impl LinearOperator for FourierSamples {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.ks.len()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        fft_in_place(&mut buf, Direction::Forward);
        self.ks
            .iter()
            .map(|&k| buf[crate::fourier::wrap(k, self.n)] * self.shift(k))
            .collect()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![ZERO; self.n];
        for (&k, v) in self.ks.iter().zip(y) {
            buf[crate::fourier::wrap(k, self.n)] += v * self.shift(k).conj();
        }
        fft_in_place(&mut buf, Direction::Inverse);
        buf
    }
}

/// The SAR forward model on a scene grid: image to phase history by direct
/// summation, with the matched filter as its exact adjoint.
pub struct SarOperator {
    geom: AcquisitionGeometry,
    scene: SceneSpec,
}

pub fn sar_operator(geom: AcquisitionGeometry, scene: SceneSpec) -> SarOperator {
    SarOperator { geom, scene }
}

impl LinearOperator for SarOperator {
    fn in_dim(&self) -> usize {
        self.scene.n_pixels().pow(2)
    }
    fn out_dim(&self) -> usize {
        self.geom.num_freqs() * self.geom.num_angles()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let img = ComplexImage::from_samples(self.scene, x.to_vec()).expect("operator input length");
        simulate_phase_history(&img, &self.geom, &self.scene)
            .expect("scene matches operator")
            .into_samples()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let ph = PhaseHistory::new(
            y.to_vec(),
            self.geom.wavenumbers(),
            self.geom.azimuths_rad().to_vec(),
            self.scene,
        )
        .expect("operator output length");
        matched_filter(&ph, &self.scene).expect("finite data").into_samples()
    }
}

/// Largest eigenvalue of `A^H A`, i.e. `||A||_2^2`, by power iteration.
pub fn operator_norm_sq(op: &dyn LinearOperator, iters: usize, seed: u64) -> f64 {
    let mut x = probe(op.in_dim(), seed, 1 << 41);
    let mut est = 0.0;
    for _ in 0..iters.max(1) {
        let nx = norm2(&x);
        if nx == 0.0 {
            return 0.0;
        }
        for v in x.iter_mut() {
            *v /= nx;
        }
        let y = op.apply_adjoint(&op.apply(&x));
        est = inner(&x, &y).re;
        x = y;
    }
    est
}
