//! Image formation from phase-history data, and 1-D partial Fourier sums.

use crate::error::{invalid, Error, Result};
use crate::fourier::{fft2_in_place, fft_in_place, wrap, Direction};
use crate::forward::PhaseHistory;
use crate::geometry::SceneSpec;
use crate::kernels::{window_weights, KernelField, WindowKind};
use crate::scene::{ComplexImage, ComplexSignal};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform 1-D mesh `x_j = origin + period * j / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1d {
    pub origin: f64,
    pub period: f64,
    pub n: usize,
}

impl Grid1d {
    pub fn new(origin: f64, period: f64, n: usize) -> Result<Self> {
        if n == 0 || !(period > 0.0) {
            return Err(invalid("grid needs n >= 1 points and a positive period"));
        }
        Ok(Self { origin, period, n })
    }

    /// The standard mesh of `[-pi, pi)`.
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::new(-PI, 2.0 * PI, n)
    }

    pub fn of(signal: &ComplexSignal) -> Self {
        Self {
            origin: signal.origin,
            period: signal.period,
            n: signal.len(),
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + self.period * j as f64 / self.n as f64
    }

    /// Angular frequency of the `k = 1` basis function, `2 pi / period`.
    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }
}

/// Scaling of a synthesized partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `sum_k c_k exp(i k w x)`, for continuous Fourier coefficients.
    Unit,
    /// `N^{-1} sum_k c_k exp(i k w x)`, for unnormalized DFT coefficients of
    /// an `N`-point signal, where `N` is the output grid size.
    InverseN,
}

/// Unnormalized DFT coefficients `c_k = sum_j f_j exp(-i k w x_j)` of a
/// sampled signal for `k = -n/2 .. n/2 - 1` (`w = 2 pi / period`).
pub fn fourier_coefficients(signal: &ComplexSignal) -> BTreeMap<i64, Complex64> {
    let n = signal.len();
    let grid = Grid1d::of(signal);
    // sum over j of f_j exp(-i k w (origin + period j / n)) is an FFT up to
    // the phase exp(-i k w origin)
    let mut buf = signal.samples.clone();
    fft_in_place(&mut buf, Direction::Forward);
    let lo = -((n / 2) as i64);
    (lo..lo + n as i64)
        .map(|k| {
            let shift = Complex64::from_polar(1.0, -(k as f64) * grid.omega() * grid.origin);
            (k, buf[wrap(k, n)] * shift)
        })
        .collect()
}

/// Partial Fourier sum `S_{K1,K2} f(x) = sum_{k=K1}^{K2} c_k exp(i k w x)`
/// evaluated on `grid`, with `w = 2 pi / period`.
pub fn partial_sum_1d(
    coeffs: &BTreeMap<i64, Complex64>,
    k1: i64,
    k2: i64,
    grid: Grid1d,
    norm: Normalization,
) -> Result<ComplexSignal> {
    weighted_partial_sum_1d(coeffs, k1, k2, grid, norm, WindowKind::Rectangular)
}

/// [`partial_sum_1d`] with coefficient `k` multiplied by the window weight
/// of its position in `K1 ..= K2`.
pub fn weighted_partial_sum_1d(
    coeffs: &BTreeMap<i64, Complex64>,
    k1: i64,
    k2: i64,
    grid: Grid1d,
    norm: Normalization,
    window: WindowKind,
) -> Result<ComplexSignal> {
    if k1 > k2 {
        return Err(invalid(format!("empty band: K1 = {k1} > K2 = {k2}")));
    }
    let missing: Vec<i64> = (k1..=k2).filter(|k| !coeffs.contains_key(k)).collect();
    if !missing.is_empty() {
        let shown: Vec<String> = missing.iter().take(20).map(|k| k.to_string()).collect();
        let more = if missing.len() > 20 { ", ..." } else { "" };
        return Err(invalid(format!(
            "missing Fourier coefficients for k = {}{more}",
            shown.join(", ")
        )));
    }
    let weights = window_weights(window, (k2 - k1 + 1) as usize)?;
    let terms: Vec<(f64, Complex64)> = (k1..=k2)
        .zip(&weights)
        .map(|(k, w)| (k as f64, coeffs[&k] * *w))
        .collect();
    let scale = match norm {
        Normalization::Unit => 1.0,
        Normalization::InverseN => 1.0 / grid.n as f64,
    };
    let omega = grid.omega();
    let samples = (0..grid.n)
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            terms.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, k * omega * x)).sum::<Complex64>() * scale
        })
        .collect();
    ComplexSignal::new(samples, grid.origin, grid.period)
}

fn check_data(ph: &PhaseHistory) -> Result<()> {
    if ph.samples().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(invalid("phase history contains non-finite samples"));
    }
    Ok(())
}

/// Matched-filter image `f(x) = sum_theta sum_j F(k_j, theta) exp(i k_j xi_theta . x)`
/// by direct summation at every pixel of `scene`.
pub fn matched_filter(ph: &PhaseHistory, scene: &SceneSpec) -> Result<ComplexImage> {
    check_data(ph)?;
    let n = scene.n_pixels();
    let h = scene.pixel_m();
    let m = ph.num_freqs();
    let idx: Vec<f64> = scene.indices().map(|j| j as f64 * h).collect();
    let mut out = vec![ZERO; n * n];
    let mut ex = vec![ZERO; m * n];
    let mut ey = vec![ZERO; m * n];
    for (i, &theta) in ph.azimuths_rad().iter().enumerate() {
        let (s, c) = theta.sin_cos();
        // exp(i k_j (c x + s y)) = exp(i k_j c x) exp(i k_j s y); the first
        // factor also carries the data sample
        let data = ph.azimuth(i);
        for (j, &k) in ph.k_radpm().iter().enumerate() {
            for (t, &x) in idx.iter().enumerate() {
                ex[j * n + t] = data[j] * Complex64::from_polar(1.0, k * c * x);
                ey[j * n + t] = Complex64::from_polar(1.0, k * s * x);
            }
        }
        out.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
            for j in 0..m {
                let a = ex[j * n + r];
                let b = &ey[j * n..(j + 1) * n];
                for (v, e) in row.iter_mut().zip(b) {
                    *v += a * e;
                }
            }
        });
    }
    ComplexImage::from_samples(*scene, out)
}

fn uniform_step(k: &[f64]) -> Result<f64> {
    if k.len() < 2 {
        return Ok(0.0);
    }
    let dk = (k[k.len() - 1] - k[0]) / (k.len() - 1) as f64;
    for w in k.windows(2) {
        if ((w[1] - w[0] - dk) / dk).abs() > 1e-6 {
            return Err(invalid("backprojection needs equally spaced wavenumbers"));
        }
    }
    Ok(dk)
}

/// Backprojection: each azimuth's samples are turned into an upsampled
/// range profile by a zero-padded inverse FFT, then smeared across the
/// image along the look direction with linear interpolation.
///
/// Profiles are interpolated at baseband (demodulated by the band center
/// `K_c`) and remodulated per pixel, so the interpolation sees only the
/// slowly varying envelope.
pub fn backprojection(ph: &PhaseHistory, scene: &SceneSpec, upsample: usize) -> Result<ComplexImage> {
    if upsample == 0 {
        return Err(invalid("upsample factor must be at least 1"));
    }
    check_data(ph)?;
    let k = ph.k_radpm();
    let m = k.len();
    let dk = uniform_step(k)?;
    let k_c = ph.center_k();
    let base = k[0] - k_c;

    let len = (upsample * m).next_power_of_two().max(2);
    let du = if m > 1 { 2.0 * PI / (len as f64 * dk) } else { 0.0 };
    let profiles: Vec<Vec<Complex64>> = (0..ph.num_angles())
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![ZERO; len];
            buf[..m].copy_from_slice(ph.azimuth(i));
            fft_in_place(&mut buf, Direction::Inverse);
            buf
        })
        .collect();

    let n = scene.n_pixels();
    let h = scene.pixel_m();
    let half = (n / 2) as i64;
    let dirs: Vec<(f64, f64)> = ph.azimuths_rad().iter().map(|t| t.sin_cos()).collect();
    let envelope = |p: &[Complex64], l: i64| -> Complex64 {
        // baseband sample at u_l = l du
        p[wrap(l, len)] * Complex64::from_polar(1.0, base * l as f64 * du)
    };
    let mut out = vec![ZERO; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let x = (r as i64 - half) as f64 * h;
        for (col, v) in row.iter_mut().enumerate() {
            let y = (col as i64 - half) as f64 * h;
            let mut acc = ZERO;
            for (p, &(s, c)) in profiles.iter().zip(&dirs) {
                let u = x * c + y * s;
                let env = if m > 1 {
                    let t = u / du;
                    let l0 = t.floor();
                    let frac = t - l0;
                    let l0 = l0 as i64;
                    envelope(p, l0) * (1.0 - frac) + envelope(p, l0 + 1) * frac
                } else {
                    p[0]
                };
                acc += env * Complex64::from_polar(1.0, k_c * u);
            }
            *v = acc;
        }
    });
    ComplexImage::from_samples(*scene, out)
}

/// Gridding parameters: oversampling ratio of the Cartesian frequency grid
/// and half-width (in grid cells) of the truncated Gaussian spreading kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GriddingConfig {
    pub oversample: f64,
    pub half_width: usize,
}

impl Default for GriddingConfig {
    fn default() -> Self {
        Self {
            oversample: 2.0,
            half_width: 3,
        }
    }
}

/// Image formation by gridding and FFT.
///
/// Digital frequencies are shifted by the band center
/// `kappa_0 = h K_c (cos theta_c, sin theta_c)` and wrapped into
/// `[-pi, pi)`, spread onto an oversampled periodic grid with a truncated
/// Gaussian `exp(-xi^2 / (4 tau))`, inverse transformed, divided by the
/// Gaussian's transform and remodulated by `exp(i kappa_0 . j)`.
pub fn grid_and_fft(ph: &PhaseHistory, scene: &SceneSpec, config: GriddingConfig) -> Result<ComplexImage> {
    if !(config.oversample > 1.0) {
        return Err(invalid(format!(
            "gridding oversampling must exceed 1, got {}",
            config.oversample
        )));
    }
    if config.half_width == 0 {
        return Err(invalid("gridding kernel half-width must be at least 1"));
    }
    check_data(ph)?;
    let n = scene.n_pixels();
    let h = scene.pixel_m();
    let sigma = config.oversample;
    let mut mr = (sigma * n as f64).ceil() as usize;
    mr += mr % 2;
    let sigma = mr as f64 / n as f64;
    let w = config.half_width as i64;
    let tau = PI * w as f64 / ((n * n) as f64 * sigma * (sigma - 0.5));
    let cell = 2.0 * PI / mr as f64;

    let thetas = ph.azimuths_rad();
    let theta_c = 0.5 * (thetas[0] + thetas[thetas.len() - 1]);
    let k_c = ph.center_k();
    let kappa0 = (h * k_c * theta_c.cos(), h * k_c * theta_c.sin());

    let wrap_pi = |v: f64| v - 2.0 * PI * ((v + PI) / (2.0 * PI)).floor();
    let taps = |d: f64| -> (i64, Vec<f64>) {
        let m0 = (d / cell).round() as i64;
        let wts = (m0 - w..=m0 + w)
            .map(|mm| {
                let t = mm as f64 * cell - d;
                (-t * t / (4.0 * tau)).exp()
            })
            .collect();
        (m0 - w, wts)
    };

    let mut grid = vec![ZERO; mr * mr];
    for ((k1, k2), v) in ph.digital_frequencies().into_iter().zip(ph.samples()) {
        let (s1, w1) = taps(wrap_pi(k1 - kappa0.0));
        let (s2, w2) = taps(wrap_pi(k2 - kappa0.1));
        for (a, wa) in w1.iter().enumerate() {
            let row = wrap(s1 + a as i64, mr) * mr;
            let va = v * *wa;
            for (b, wb) in w2.iter().enumerate() {
                grid[row + wrap(s2 + b as i64, mr)] += va * *wb;
            }
        }
    }
    fft2_in_place(&mut grid, mr, mr, Direction::Inverse);

    let deapod: Vec<f64> = scene
        .indices()
        .map(|j| cell / ((4.0 * PI * tau).sqrt() * (-tau * (j * j) as f64).exp()))
        .collect();
    let idx: Vec<i64> = scene.indices().collect();
    let mut out = vec![ZERO; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let j1 = idx[r];
        let g_row = wrap(j1, mr) * mr;
        for (col, v) in row.iter_mut().enumerate() {
            let j2 = idx[col];
            let mod_ = Complex64::from_polar(1.0, kappa0.0 * j1 as f64 + kappa0.1 * j2 as f64);
            *v = grid[g_row + wrap(j2, mr)] * (deapod[r] * deapod[col]) * mod_;
        }
    });
    ComplexImage::from_samples(*scene, out)
}

/// Multiplies sample `(j, i)` by `w_freq(j) * w_az(i)`.
pub fn apply_window(ph: &PhaseHistory, kind: WindowKind) -> Result<PhaseHistory> {
    let wf = window_weights(kind, ph.num_freqs())?;
    let wa = window_weights(kind, ph.num_angles())?;
    let m = ph.num_freqs();
    let samples = ph
        .samples()
        .iter()
        .enumerate()
        .map(|(s, v)| v * (wf[s % m] * wa[s / m]))
        .collect();
    ph.with_samples(samples)
}

/// Linear convolution `(f * K)(x) = sum_y f(y) K(x - y)` on the pixel grid
/// of `image`, computed by FFT on a `2N x 2N` zero-padded grid.
///
/// The kernel field may be sampled on the image's own grid or on the
/// doubled grid ([`SceneSpec::doubled`]); only the latter holds every
/// offset `x - y` that occurs, so it gives the exact discrete convolution.
pub fn convolve_with_kernel(image: &ComplexImage, kernel: &KernelField) -> Result<ComplexImage> {
    let kimg = kernel
        .image()
        .ok_or_else(|| invalid("convolution needs a 2-D kernel field, got a 1-D trace"))?;
    let n = image.n();
    let kn = kimg.n();
    let h = image.pixel_m();
    if (kimg.pixel_m() - h).abs() > 1e-12 * h || (kn != n && kn != 2 * n) {
        return Err(Error::InvalidInput(format!(
            "kernel grid ({kn} pixels of {} m) does not match image grid ({n} pixels of {h} m)",
            kimg.pixel_m()
        )));
    }
    let p = 2 * n;
    let mut fa = vec![ZERO; p * p];
    for (j1, r) in image.scene().indices().zip(image.samples().chunks_exact(n)) {
        for (j2, v) in image.scene().indices().zip(r) {
            fa[wrap(j1, p) * p + wrap(j2, p)] = *v;
        }
    }
    let mut fk = vec![ZERO; p * p];
    for (d1, r) in kimg.scene().indices().zip(kimg.samples().chunks_exact(kn)) {
        for (d2, v) in kimg.scene().indices().zip(r) {
            fk[wrap(d1, p) * p + wrap(d2, p)] = *v;
        }
    }
    fft2_in_place(&mut fa, p, p, Direction::Forward);
    fft2_in_place(&mut fk, p, p, Direction::Forward);
    for (a, b) in fa.iter_mut().zip(&fk) {
        *a *= b;
    }
    fft2_in_place(&mut fa, p, p, Direction::Inverse);
    let scale = 1.0 / (p * p) as f64;
    let scene = *image.scene();
    let mut out = ComplexImage::zeros(scene);
    for j1 in scene.indices() {
        for j2 in scene.indices() {
            out.set(j1, j2, fa[wrap(j1, p) * p + wrap(j2, p)] * scale);
        }
    }
    Ok(out)
}

/// `||a - b|| / ||b||` in the Euclidean norm.
pub fn relative_l2(a: &[Complex64], reference: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
