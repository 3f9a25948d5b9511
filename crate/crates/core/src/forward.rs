//! Forward data model: phase-history simulation, range projections and their
//! adjoint, coefficient folding and measurement noise.

use crate::error::{invalid, Error, Result};
use crate::fourier::wrap;
use crate::geometry::{digital_frequencies, AcquisitionGeometry, SceneSpec};
use crate::rng::{streams, CounterRng};
use crate::scene::ComplexImage;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Mean of the ramp phantom, i.e. its zeroth Fourier coefficient.
pub const RAMP_MEAN: f64 = 1.0;

/// Fourier samples on the polar grid `(k_j, theta_i)`, frequency-major:
/// sample `(j, i)` lives at `i * M + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistory {
    samples: Vec<Complex64>,
    k_radpm: Vec<f64>,
    azimuths_rad: Vec<f64>,
    scene: SceneSpec,
}

impl PhaseHistory {
    pub fn new(
        samples: Vec<Complex64>,
        k_radpm: Vec<f64>,
        azimuths_rad: Vec<f64>,
        scene: SceneSpec,
    ) -> Result<Self> {
        if k_radpm.is_empty() || azimuths_rad.is_empty() {
            return Err(invalid("phase history needs at least one wavenumber and one azimuth"));
        }
        if k_radpm.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("wavenumbers must be strictly increasing"));
        }
        let expected = k_radpm.len() * azimuths_rad.len();
        if samples.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "phase-history samples",
                expected,
                actual: samples.len(),
            });
        }
        Ok(Self {
            samples,
            k_radpm,
            azimuths_rad,
            scene,
        })
    }

    pub fn zeros(geom: &AcquisitionGeometry, scene: SceneSpec) -> Self {
        let n = geom.num_freqs() * geom.num_angles();
        Self {
            samples: vec![Complex64::new(0.0, 0.0); n],
            k_radpm: geom.wavenumbers(),
            azimuths_rad: geom.azimuths_rad().to_vec(),
            scene,
        }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn k_radpm(&self) -> &[f64] {
        &self.k_radpm
    }

    pub fn azimuths_rad(&self) -> &[f64] {
        &self.azimuths_rad
    }

    pub fn scene(&self) -> &SceneSpec {
        &self.scene
    }

    pub fn num_freqs(&self) -> usize {
        self.k_radpm.len()
    }

    pub fn num_angles(&self) -> usize {
        self.azimuths_rad.len()
    }

    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.samples[i * self.k_radpm.len() + j]
    }

    /// The `M` samples of azimuth `i`.
    pub fn azimuth(&self, i: usize) -> &[Complex64] {
        let m = self.k_radpm.len();
        &self.samples[i * m..(i + 1) * m]
    }

    /// Mean wavenumber step; zero for a single frequency.
    pub fn delta_k(&self) -> f64 {
        let m = self.k_radpm.len();
        if m < 2 {
            0.0
        } else {
            (self.k_radpm[m - 1] - self.k_radpm[0]) / (m - 1) as f64
        }
    }

    /// Band-center wavenumber `(k_1 + k_M) / 2`.
    pub fn center_k(&self) -> f64 {
        0.5 * (self.k_radpm[0] + self.k_radpm[self.k_radpm.len() - 1])
    }

    /// Dimensionless frequencies `h k_j (cos theta_i, sin theta_i)` in
    /// storage order.
    pub fn digital_frequencies(&self) -> Vec<(f64, f64)> {
        let h = self.scene.pixel_m();
        let mut out = Vec::with_capacity(self.samples.len());
        for &theta in &self.azimuths_rad {
            let (s, c) = theta.sin_cos();
            for &k in &self.k_radpm {
                out.push((h * k * c, h * k * s));
            }
        }
        out
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, self.k_radpm.clone(), self.azimuths_rad.clone(), self.scene)
    }
}

/// One projection `p_theta f` sampled at `w_m = m h`, `m = -N/2 .. N/2-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub values: Vec<Complex64>,
    pub theta_rad: f64,
    pub pixel_m: f64,
}

impl RangeProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Position of sample `m` (storage index) along the look direction.
    pub fn w(&self, m: usize) -> f64 {
        (m as f64 - (self.values.len() / 2) as f64) * self.pixel_m
    }

    /// Linear interpolation at position `w`; zero outside the sampled range.
    pub fn interpolate(&self, w: f64) -> Complex64 {
        let n = self.values.len();
        let t = w / self.pixel_m + (n / 2) as f64;
        let i0 = t.floor();
        if !(i0 >= 0.0) || i0 > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = i0 as usize;
        let frac = t - i0;
        if i + 1 == n {
            // only the exact last node is inside
            return if frac == 0.0 { self.values[i] } else { Complex64::new(0.0, 0.0) };
        }
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

fn check_scene(image: &ComplexImage, scene: &SceneSpec) -> Result<()> {
    if image.n() != scene.n_pixels() {
        return Err(Error::DimensionMismatch {
            what: "image side length",
            expected: scene.n_pixels(),
            actual: image.n(),
        });
    }
    Ok(())
}

/// Phase history of `image` by direct summation,
/// `F(k1, k2) = sum f_{j1,j2} exp(-i (k1 j1 + k2 j2))` at every digital
/// frequency of `geom` on `scene`.
///
/// Sparse images are summed over their nonzero pixels only; otherwise the
/// sum is taken row by row with separable exponentials. Both paths are exact
/// evaluations of the same sum.
pub fn simulate_phase_history(
    image: &ComplexImage,
    geom: &AcquisitionGeometry,
    scene: &SceneSpec,
) -> Result<PhaseHistory> {
    check_scene(image, scene)?;
    let freqs = digital_frequencies(geom, scene);
    let n = scene.n_pixels();
    let half = (n / 2) as i64;
    let nonzero: Vec<(f64, f64, Complex64)> = scene
        .indices()
        .flat_map(|j1| scene.indices().map(move |j2| (j1, j2)))
        .zip(image.samples())
        .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
        .map(|((j1, j2), v)| (j1 as f64, j2 as f64, *v))
        .collect();

    let samples: Vec<Complex64> = if nonzero.len() * 8 < n * n {
        freqs
            .par_iter()
            .map(|&(k1, k2)| {
                nonzero
                    .iter()
                    .map(|&(j1, j2, v)| v * Complex64::from_polar(1.0, -(k1 * j1 + k2 * j2)))
                    .sum()
            })
            .collect()
    } else {
        let data = image.samples();
        freqs
            .par_iter()
            .map_init(
                || (vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]),
                |(ex, ey), &(k1, k2)| {
                    for (t, j) in (-half..half).enumerate() {
                        ex[t] = Complex64::from_polar(1.0, -k1 * j as f64);
                        ey[t] = Complex64::from_polar(1.0, -k2 * j as f64);
                    }
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (r, row) in data.chunks_exact(n).enumerate() {
                        let s: Complex64 = row.iter().zip(ey.iter()).map(|(a, b)| a * b).sum();
                        acc += ex[r] * s;
                    }
                    acc
                },
            )
            .collect()
    };
    PhaseHistory::new(samples, geom.wavenumbers(), geom.azimuths_rad().to_vec(), *scene)
}

/// Bilinear sample at fractional pixel index `(u, v)`; zero outside.
fn bilinear(image: &ComplexImage, u: f64, v: f64) -> Complex64 {
    let n = image.n() as i64;
    let half = n / 2;
    let (u0, v0) = (u.floor(), v.floor());
    let (fu, fv) = (u - u0, v - v0);
    let (i0, k0) = (u0 as i64, v0 as i64);
    let mut acc = Complex64::new(0.0, 0.0);
    for (di, wu) in [(0, 1.0 - fu), (1, fu)] {
        let j1 = i0 + di;
        if wu == 0.0 || j1 < -half || j1 >= half {
            continue;
        }
        for (dk, wv) in [(0, 1.0 - fv), (1, fv)] {
            let j2 = k0 + dk;
            if wv == 0.0 || j2 < -half || j2 >= half {
                continue;
            }
            acc += image.get(j1, j2) * (wu * wv);
        }
    }
    acc
}

/// Discrete projection `p_theta f(w) = int f(w xi + z xi_perp) dz` with
/// `xi = (cos theta, sin theta)` and `xi_perp = (-sin theta, cos theta)`.
///
/// Each ray is sampled every `h` with bilinear interpolation and summed
/// times `h`. At `theta = 0` this is the sum over `y` of every row.
pub fn project(image: &ComplexImage, theta_rad: f64) -> RangeProfile {
    let n = image.n();
    let h = image.pixel_m();
    let half = (n / 2) as i64;
    // rays must cross the whole square, whose half-diagonal is sqrt(2) R
    let reach = ((n as f64) * std::f64::consts::FRAC_1_SQRT_2).ceil() as i64 + 1;
    let (s, c) = theta_rad.sin_cos();
    let values = (-half..half)
        .into_par_iter()
        .map(|m| {
            let w = m as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for l in -reach..=reach {
                let z = l as f64;
                acc += bilinear(image, w * c - z * s, w * s + z * c);
            }
            acc * h
        })
        .collect();
    RangeProfile {
        values,
        theta_rad,
        pixel_m: h,
    }
}

/// Adjoint of projection: the image `g(xi_theta . (x, y))`, with `g`
/// linearly interpolated between profile samples.
pub fn backproject_adjoint(profile: &RangeProfile, scene: &SceneSpec) -> Result<ComplexImage> {
    if profile.len() != scene.n_pixels() {
        return Err(Error::DimensionMismatch {
            what: "range profile length",
            expected: scene.n_pixels(),
            actual: profile.len(),
        });
    }
    let (s, c) = profile.theta_rad.sin_cos();
    Ok(ComplexImage::from_fn(*scene, |x, y| profile.interpolate(x * c + y * s)))
}

/// Folds coefficients `f_k` onto residues mod `n`:
/// `F_r = sum_m f_{r + m n}`, indexed `r = 0 .. n-1`.
pub fn aliased_coefficients(coeffs: &BTreeMap<i64, Complex64>, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(invalid("fold length must be positive"));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (&k, &v) in coeffs {
        out[wrap(k, n)] += v;
    }
    Ok(out)
}

/// Adds i.i.d. complex Gaussian noise `X + iY`, `X, Y ~ N(0, sigma^2)`.
/// Sample `s` uses normal pair `s` of the seeded noise stream.
pub fn add_noise(ph: &PhaseHistory, sigma: f64, seed: u64) -> Result<PhaseHistory> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("noise level must be finite and >= 0, got {sigma}")));
    }
    let mut out = ph.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let rng = CounterRng::new(seed, streams::NOISE);
    let mut pairs = vec![(0.0, 0.0); out.samples.len()];
    rng.fill_normal_pairs(0, &mut pairs);
    for (v, (x, y)) in out.samples.iter_mut().zip(pairs) {
        *v += Complex64::new(sigma * x, sigma * y);
    }
    Ok(out)
}

/// Fourier coefficient `int f(x) exp(-2 pi i k x) dx` of the ramp phantom
/// over `[-1/2, 1/2)`, equal to `i / (pi k)` for `k != 0`.
/// The `k = 0` value is [`RAMP_MEAN`].
pub fn analytic_ramp_coefficients(k: i64) -> Result<Complex64> {
    if k == 0 {
        return Err(invalid("ramp coefficient formula holds only for k != 0; use RAMP_MEAN"));
    }
    Ok(Complex64::new(0.0, 1.0 / (PI * k as f64)))
}
