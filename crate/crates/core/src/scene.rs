//! Synthetic complex scenes and 1-D test signals.

use crate::error::{invalid, Result};
use crate::geometry::SceneSpec;
use crate::rng::{streams, CounterRng};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `N x N` complex image on the symmetric pixel grid of a [`SceneSpec`].
///
/// Pixel `(j1, j2)` with `j1, j2` in `-N/2 .. N/2-1` sits at physical position
/// `(x, y) = (j1 h, j2 h)` and is stored row-major at row `j1 + N/2`,
/// column `j2 + N/2`. Rows therefore run along `x` and columns along `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    scene: SceneSpec,
    samples: Vec<Complex64>,
}

impl ComplexImage {
    pub fn zeros(scene: SceneSpec) -> Self {
        let n = scene.n_pixels();
        Self {
            scene,
            samples: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_samples(scene: SceneSpec, samples: Vec<Complex64>) -> Result<Self> {
        let n = scene.n_pixels();
        if samples.len() != n * n {
            return Err(crate::Error::DimensionMismatch {
                what: "image samples",
                expected: n * n,
                actual: samples.len(),
            });
        }
        Ok(Self { scene, samples })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel position.
    pub fn from_fn(scene: SceneSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let h = scene.pixel_m();
        let samples = scene
            .indices()
            .flat_map(|j1| scene.indices().map(move |j2| (j1, j2)))
            .map(|(j1, j2)| f(j1 as f64 * h, j2 as f64 * h))
            .collect();
        Self { scene, samples }
    }

    pub fn scene(&self) -> &SceneSpec {
        &self.scene
    }

    pub fn n(&self) -> usize {
        self.scene.n_pixels()
    }

    pub fn pixel_m(&self) -> f64 {
        self.scene.pixel_m()
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

    /// Storage offset of signed pixel index `(j1, j2)`.
    #[inline]
    pub fn offset(&self, j1: i64, j2: i64) -> usize {
        let n = self.n() as i64;
        let half = n / 2;
        ((j1 + half) * n + (j2 + half)) as usize
    }

    pub fn get(&self, j1: i64, j2: i64) -> Complex64 {
        self.samples[self.offset(j1, j2)]
    }

    pub fn set(&mut self, j1: i64, j2: i64, v: Complex64) {
        let o = self.offset(j1, j2);
        self.samples[o] = v;
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.norm()).collect()
    }
}

/// Uniformly sampled 1-D complex signal, `x_j = origin + period * j / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub samples: Vec<Complex64>,
    pub origin: f64,
    pub period: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>, origin: f64, period: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("signal needs at least two samples"));
        }
        if !(period > 0.0) {
            return Err(invalid(format!("signal period must be positive, got {period}")));
        }
        Ok(Self {
            samples,
            origin,
            period,
        })
    }

    /// Real signal on the standard mesh of `[-pi, pi)`.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), -PI, 2.0 * PI)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + self.period * j as f64 / self.samples.len() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.norm()).collect()
    }
}

/// Containers of complex samples that random phases can be applied to.
pub trait Samples: Clone {
    fn values(&self) -> &[Complex64];
    fn values_mut(&mut self) -> &mut [Complex64];
}

impl Samples for ComplexImage {
    fn values(&self) -> &[Complex64] {
        &self.samples
    }
    fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }
}

impl Samples for ComplexSignal {
    fn values(&self) -> &[Complex64] {
        &self.samples
    }
    fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }
}

/// Places point scatterers on the nearest pixel; coincident points add.
pub fn point_scatterers(scene: SceneSpec, points: &[(f64, f64, Complex64)]) -> Result<ComplexImage> {
    let mut img = ComplexImage::zeros(scene);
    let r = scene.radius_m();
    let h = scene.pixel_m();
    let half = (scene.n_pixels() / 2) as i64;
    for (i, &(x, y, amp)) in points.iter().enumerate() {
        if !(x.abs() < r && y.abs() < r) {
            return Err(invalid(format!(
                "point {i} at ({x}, {y}) m lies outside the scene of radius {r} m"
            )));
        }
        // |x| < R can still round up to N/2; the nearest valid pixel is N/2 - 1.
        let j1 = ((x / h).round() as i64).clamp(-half, half - 1);
        let j2 = ((y / h).round() as i64).clamp(-half, half - 1);
        let o = img.offset(j1, j2);
        img.samples[o] += amp;
    }
    Ok(img)
}

/// Unit step on `[-pi, pi)`: 0 on `[-pi, 0)`, 1 on `[0, pi)`.
pub fn step_signal(n: usize) -> Result<ComplexSignal> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(invalid(format!("step signal needs an even length >= 2, got {n}")));
    }
    let values: Vec<f64> = (0..n).map(|j| if j >= n / 2 { 1.0 } else { 0.0 }).collect();
    ComplexSignal::from_real(&values)
}

/// Periodic sawtooth on `[-1/2, 1/2)`: `2x + 2` for `x < 0`, `2x` for `x >= 0`.
pub fn ramp_signal(n: usize) -> Result<ComplexSignal> {
    if n < 2 {
        return Err(invalid(format!("ramp signal needs length >= 2, got {n}")));
    }
    let samples = (0..n)
        .map(|j| {
            let x = -0.5 + j as f64 / n as f64;
            Complex64::new(ramp_value(x), 0.0)
        })
        .collect();
    ComplexSignal::new(samples, -0.5, 1.0)
}

pub fn ramp_value(x: f64) -> f64 {
    if x < 0.0 {
        2.0 * x + 2.0
    } else {
        2.0 * x
    }
}

/// Replaces every phase with an independent uniform draw on `[-pi, pi)`,
/// keeping magnitudes: `out_j = |in_j| exp(i phi_j)`.
///
/// Element `j` always receives the phase at counter index `j` of the seeded
/// phase stream.
pub fn apply_random_phases<T: Samples>(input: &T, seed: u64) -> T {
    apply_random_phases_stream(input, seed, streams::PHASE)
}

pub(crate) fn apply_random_phases_stream<T: Samples>(input: &T, seed: u64, stream: u64) -> T {
    let mut out = input.clone();
    let rng = CounterRng::new(seed, stream);
    let vals = out.values_mut();
    let mut phases = vec![0.0; vals.len()];
    rng.fill_phases(0, &mut phases);
    for (v, phi) in vals.iter_mut().zip(phases) {
        *v = Complex64::from_polar(v.norm(), phi);
    }
    out
}

/// Number of pixels per correlation block of physical width `delta`.
fn block_index(j: usize, spacing: f64, delta: f64) -> u64 {
    // small guard so that delta equal to a multiple of the spacing is not
    // split by rounding in j * spacing / delta
    ((j as f64 * spacing / delta) + 1e-9).floor() as u64
}

/// Phases constant on consecutive blocks of physical width `delta`, with
/// independent uniform phases from block to block.
pub fn apply_correlated_phases(input: &ComplexSignal, delta: f64, seed: u64) -> Result<ComplexSignal> {
    if !(delta > 0.0) {
        return Err(invalid(format!("correlation width must be positive, got {delta}")));
    }
    let rng = CounterRng::new(seed, streams::BLOCK_PHASE);
    Ok(correlated_with(input, delta, |b| rng.phase(b)))
}

pub(crate) fn correlated_with(input: &ComplexSignal, delta: f64, phase_of_block: impl Fn(u64) -> f64) -> ComplexSignal {
    let dx = input.spacing();
    let mut out = input.clone();
    let mut current: Option<(u64, f64)> = None;
    for (j, v) in out.samples.iter_mut().enumerate() {
        let b = block_index(j, dx, delta);
        let phi = match current {
            Some((cb, p)) if cb == b => p,
            _ => {
                let p = phase_of_block(b);
                current = Some((b, p));
                p
            }
        };
        *v = Complex64::from_polar(v.norm(), phi);
    }
    out
}

/// Block labels used by [`apply_correlated_phases`], exposed for tests and
/// analysis code.
pub fn correlation_blocks(n: usize, spacing: f64, delta: f64) -> Vec<u64> {
    (0..n).map(|j| block_index(j, spacing, delta)).collect()
}

/// Modified Shepp-Logan head phantom (Toft's 10-ellipse table with the
/// contrast-enhanced intensities), real valued in `[0, 1]`.
///
/// The phantom occupies `[-1, 1]^2` mapped onto the full pixel grid.
pub fn shepp_logan_magnitude(n: usize) -> Result<ComplexImage> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(invalid(format!("phantom needs an even size >= 64, got {n}")));
    }
    // intensity, semi-axis a, semi-axis b, x0, y0, rotation (deg)
    const ELLIPSES: [[f64; 6]; 10] = [
        [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
        [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
        [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
        [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
        [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
        [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
        [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
        [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
        [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
        [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
    ];
    // unit-radius scene so that pixel positions are phantom coordinates
    let unit = SceneSpec::new(1.0, n)?;
    let img = ComplexImage::from_fn(unit, |x, y| {
        let mut v = 0.0;
        for [amp, a, b, x0, y0, rot] in ELLIPSES {
            let (s, c) = rot.to_radians().sin_cos();
            let (dx, dy) = (x - x0, y - y0);
            let u = dx * c + dy * s;
            let w = -dx * s + dy * c;
            if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                v += amp;
            }
        }
        Complex64::new(v.clamp(0.0, 1.0), 0.0)
    });
    Ok(img)
}

impl ComplexImage {
    /// Same samples on a different scene of equal pixel count.
    pub fn with_scene(mut self, scene: SceneSpec) -> Result<Self> {
        if scene.n_pixels() != self.n() {
            return Err(crate::Error::DimensionMismatch {
                what: "scene pixel count",
                expected: self.n(),
                actual: scene.n_pixels(),
            });
        }
        self.scene = scene;
        Ok(self)
    }
}
