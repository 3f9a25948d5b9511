//! Expected power of Fourier coefficients and partial Fourier sums of
//! signals with random phases, analytic and by Monte Carlo.
//!
//! Signals here are `N`-point vectors indexed `j = 0 .. N-1`, with DFT
//! coefficients `c_k = sum_j f_j exp(-2 pi i k j / N)` and partial sums
//! `S f_m = N^{-1} sum_{k=K1}^{K2} c_k exp(2 pi i k m / N)`.

use crate::error::{invalid, Result};
use crate::fourier::{fft_in_place, wrap, Direction};
use crate::kernels::dirichlet;
use crate::rng::{streams, CounterRng};
use crate::scene::{correlated_with, ComplexSignal};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Trials per parallel work unit; partial sums of units are combined in
/// unit order so results do not depend on scheduling.
const TRIAL_CHUNK: usize = 64;

/// Default for [`CorrelatedConfig::warn_threshold`].
pub const KC_DELTA_WARN: f64 = 0.5;

/// `E|c_k|^2 = ||f||_2^2` for every `k`.
pub fn expected_coefficient_power(magnitudes: &[f64]) -> f64 {
    magnitudes.iter().map(|m| m * m).sum()
}

/// Squared discrete Dirichlet kernel `D_{B/2}(2 pi m / N)^2`, `m = 0 .. N-1`.
fn dirichlet_sq(n: usize, b: usize) -> Vec<f64> {
    (0..n)
        .map(|m| dirichlet(0.5 * b as f64, 2.0 * PI * m as f64 / n as f64).powi(2))
        .collect()
}

/// Circular convolution of two real sequences by FFT.
fn circular_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut fa, Direction::Forward);
    fft_in_place(&mut fb, Direction::Forward);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_in_place(&mut fa, Direction::Inverse);
    fa.iter().map(|v| v.re / n as f64).collect()
}

fn check_band(n: usize, b: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("signal needs at least two samples"));
    }
    if b >= n {
        return Err(invalid(format!("bandwidth B = {b} must be below N = {n}")));
    }
    Ok(())
}

/// `E|S f_m|^2 = N^{-2} (|f|^2 * |D^N_{B/2}|^2)_m` for a band of width `B`
/// (`B + 1` coefficients) anywhere in the spectrum.
pub fn expected_partial_sum_power(magnitudes: &[f64], b: usize) -> Result<Vec<f64>> {
    let n = magnitudes.len();
    check_band(n, b)?;
    let f2: Vec<f64> = magnitudes.iter().map(|m| m * m).collect();
    let scale = 1.0 / (n * n) as f64;
    Ok(circular_convolve(&f2, &dirichlet_sq(n, b))
        .into_iter()
        .map(|v| (v * scale).max(0.0))
        .collect())
}

/// Monte Carlo mean and its standard error at every index.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub trials: usize,
}

/// `|S_{K1,K2} g_m|^2` for all `m`.
pub fn partial_sum_power(values: &[Complex64], k1: i64, k2: i64) -> Vec<f64> {
    let n = values.len();
    let mut spec = values.to_vec();
    fft_in_place(&mut spec, Direction::Forward);
    let mut kept = vec![Complex64::new(0.0, 0.0); n];
    for k in k1..=k2 {
        kept[wrap(k, n)] += spec[wrap(k, n)];
    }
    fft_in_place(&mut kept, Direction::Inverse);
    let s = 1.0 / n as f64;
    kept.iter().map(|v| (v * s).norm_sqr()).collect()
}

/// Runs `trials` draws of `power(trial)` and returns per-index mean and
/// standard error.
fn monte_carlo(n: usize, trials: usize, power: impl Fn(u64) -> Vec<f64> + Sync) -> McEstimate {
    let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..trials.div_ceil(TRIAL_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut s1 = vec![0.0; n];
            let mut s2 = vec![0.0; n];
            for t in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(trials) {
                for ((a, b), p) in s1.iter_mut().zip(s2.iter_mut()).zip(power(t as u64)) {
                    *a += p;
                    *b += p * p;
                }
            }
            (s1, s2)
        })
        .collect();
    let mut s1 = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    for (a, b) in chunks {
        for i in 0..n {
            s1[i] += a[i];
            s2[i] += b[i];
        }
    }
    let t = trials as f64;
    let mean: Vec<f64> = s1.iter().map(|s| s / t).collect();
    let std_err = if trials > 1 {
        mean.iter()
            .zip(&s2)
            .map(|(m, q)| ((q - t * m * m).max(0.0) / (t - 1.0) / t).sqrt())
            .collect()
    } else {
        vec![0.0; n]
    };
    McEstimate { mean, std_err, trials }
}

fn trial_rng(seed: u64, trial: u64) -> CounterRng {
    CounterRng::new(seed, streams::TRIAL_BASE + trial)
}

/// Empirical mean of `|S_{K1,K2} f_m|^2` over independent uniform-phase
/// draws `f_j = |f_j| exp(i phi_j)`. Trial `t` draws its phases from stream
/// `TRIAL_BASE + t` of `seed`.
pub fn monte_carlo_partial_sum_power(
    magnitudes: &[f64],
    k1: i64,
    k2: i64,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    let n = magnitudes.len();
    if trials == 0 {
        return Err(invalid("Monte Carlo needs at least one trial"));
    }
    if k1 > k2 {
        return Err(invalid(format!("empty band: K1 = {k1} > K2 = {k2}")));
    }
    check_band(n, (k2 - k1) as usize)?;
    Ok(monte_carlo(n, trials, |t| {
        let rng = trial_rng(seed, t);
        let mut phases = vec![0.0; n];
        rng.fill_phases(0, &mut phases);
        let f: Vec<Complex64> = magnitudes.iter().zip(&phases).map(|(&m, &p)| Complex64::from_polar(m, p)).collect();
        partial_sum_power(&f, k1, k2)
    }))
}

/// Monte Carlo estimate of `E|f_k|^2` at the given frequencies.
pub fn monte_carlo_coefficient_power(magnitudes: &[f64], ks: &[i64], trials: usize, seed: u64) -> Result<McEstimate> {
    let n = magnitudes.len();
    if trials == 0 {
        return Err(invalid("Monte Carlo needs at least one trial"));
    }
    if n == 0 {
        return Err(invalid("signal is empty"));
    }
    Ok(monte_carlo(ks.len(), trials, |t| {
        let rng = trial_rng(seed, t);
        let mut phases = vec![0.0; n];
        rng.fill_phases(0, &mut phases);
        let mut f: Vec<Complex64> =
            magnitudes.iter().zip(&phases).map(|(&m, &p)| Complex64::from_polar(m, p)).collect();
        fft_in_place(&mut f, Direction::Forward);
        ks.iter().map(|&k| f[wrap(k, n)].norm_sqr()).collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedConfig {
    /// Warn when `K_c * delta` exceeds this; the block approximation assumes
    /// the kernel phase barely turns across one correlation length.
    pub warn_threshold: f64,
}

impl Default for CorrelatedConfig {
    fn default() -> Self {
        Self {
            warn_threshold: KC_DELTA_WARN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedPower {
    pub empirical: McEstimate,
    /// `(delta / dx) N^{-2} (|f|^2 * |D^N_{B/2}|^2)`.
    pub analytic: Vec<f64>,
    pub warning: Option<String>,
}

/// Partial-sum power for phases that are constant on blocks of width
/// `delta` and independent across blocks, on the mesh of `[-pi, pi)`.
///
/// The prediction scales the independent-phase result by the mean
/// same-block measure, `delta / dx` pixels. The band is
/// `K_c - B/2 ..= K_c + B/2`.
pub fn correlated_phase_power(
    magnitudes: &[f64],
    delta: f64,
    k_c: i64,
    b: usize,
    trials: usize,
    seed: u64,
    config: CorrelatedConfig,
) -> Result<CorrelatedPower> {
    let n = magnitudes.len();
    check_band(n, b)?;
    if !b.is_multiple_of(2) {
        return Err(invalid(format!("bandwidth B = {b} must be even for an integer band center")));
    }
    if trials == 0 {
        return Err(invalid("Monte Carlo needs at least one trial"));
    }
    let dx = 2.0 * PI / n as f64;
    if !(delta > 0.0) {
        return Err(invalid(format!("correlation width must be positive, got {delta}")));
    }
    let warning = (k_c.unsigned_abs() as f64 * delta > config.warn_threshold).then(|| {
        let msg = format!(
            "K_c * delta = {:.3} exceeds {}; the block approximation may be poor",
            k_c.unsigned_abs() as f64 * delta,
            config.warn_threshold
        );
        log::warn!("{msg}");
        msg
    });
    let half = (b / 2) as i64;
    let (k1, k2) = (k_c - half, k_c + half);
    let base = ComplexSignal::new(
        magnitudes.iter().map(|&m| Complex64::new(m, 0.0)).collect(),
        -PI,
        2.0 * PI,
    )?;
    let empirical = monte_carlo(n, trials, |t| {
        let rng = trial_rng(seed, t);
        let f = correlated_with(&base, delta, |blk| rng.phase(blk));
        partial_sum_power(&f.samples, k1, k2)
    });
    let width = (delta / dx).min(n as f64);
    let analytic = expected_partial_sum_power(magnitudes, b)?
        .into_iter()
        .map(|v| v * width)
        .collect();
    Ok(CorrelatedPower {
        empirical,
        analytic,
        warning,
    })
}

/// `count` evenly spaced indices in `0 .. n`.
pub fn probe_indices(n: usize, count: usize) -> Vec<usize> {
    (0..count).map(|i| (2 * i + 1) * n / (2 * count)).collect()
}
