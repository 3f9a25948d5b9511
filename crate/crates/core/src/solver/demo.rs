//! Small reference problems with known ground truth.

use super::operators::{
    difference_operator, fourier_samples, partial_fourier, random_rows, Boundary, Difference, FourierSamples,
    LinearOperator, PartialFourier,
};
use crate::error::Result;
use crate::forward::{analytic_ramp_coefficients, RAMP_MEAN};
use crate::rng::{streams, CounterRng};
use crate::scene::ramp_value;
use num_complex::Complex64;
use std::f64::consts::PI;

pub struct L1Problem<A, T> {
    pub a: A,
    pub t: T,
    pub b: Vec<Complex64>,
    pub truth: Vec<f64>,
    pub lambda: f64,
}

pub const SINE_LENGTH: usize = 500;
pub const SINE_CYCLES: f64 = 2.0;
pub const SINE_SNR: f64 = 5.0;
pub const SINE_LAMBDA: f64 = 0.5;
pub const SINE_BETA: f64 = 32.0;

/// Complex Gaussian noise scaled so that `rms(clean) / rms(noise) = snr`.
pub fn noise_at_snr(clean: &[Complex64], snr: f64, seed: u64) -> Vec<Complex64> {
    let rms = (clean.iter().map(|v| v.norm_sqr()).sum::<f64>() / clean.len() as f64).sqrt();
    let s = rms / (snr * 2f64.sqrt());
    let mut pairs = vec![(0.0, 0.0); clean.len()];
    CounterRng::new(seed, streams::NOISE).fill_normal_pairs(0, &mut pairs);
    clean
        .iter()
        .zip(pairs)
        .map(|(v, (x, y))| v + Complex64::new(s * x, s * y))
        .collect()
}

/// Sine curve of length 500 observed through half the rows of the unitary
/// DFT with noise at SNR 5; second-order truncated differences as `T`.
pub fn sine_partial_fourier(seed: u64) -> Result<L1Problem<PartialFourier, Difference>> {
    let n = SINE_LENGTH;
    let truth: Vec<f64> = (0..n)
        .map(|j| (2.0 * PI * SINE_CYCLES * j as f64 / n as f64).sin())
        .collect();
    let a = partial_fourier(n, random_rows(n, n / 2, seed))?;
    let t = difference_operator(n, 2, Boundary::Truncated)?;
    let x: Vec<Complex64> = truth.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let b = noise_at_snr(&a.apply(&x), SINE_SNR, seed);
    Ok(L1Problem {
        a,
        t,
        b,
        truth,
        lambda: SINE_LAMBDA,
    })
}

pub const RAMP_LENGTH: usize = 512;
pub const RAMP_MAX_K: i64 = 75;
pub const RAMP_LAMBDA: f64 = 1e-4;
/// `||A||^2 = 1/n` for this sampling, so the penalty must be small as well.
pub const RAMP_BETA: f64 = 0.1;
pub const RAMP_ITERS: usize = 5000;

/// The ramp `2x + 2` on `[-1/2, 0)`, `2x` on `[0, 1/2)` known only through
/// its exact Fourier coefficients `|k| <= max_k`; circulant first
/// differences as `T`.
pub fn ramp_coefficients(n: usize, max_k: i64) -> Result<L1Problem<FourierSamples, Difference>> {
    let ks: Vec<i64> = (-max_k..=max_k).collect();
    let b = ks
        .iter()
        .map(|&k| {
            if k == 0 {
                Ok(Complex64::new(RAMP_MEAN, 0.0))
            } else {
                analytic_ramp_coefficients(k)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let truth = (0..n).map(|j| ramp_value(-0.5 + j as f64 / n as f64)).collect();
    Ok(L1Problem {
        a: fourier_samples(n, ks, -0.5, 1.0)?,
        t: difference_operator(n, 1, Boundary::Circulant)?,
        b,
        truth,
        lambda: RAMP_LAMBDA,
    })
}
