//! Closed-form convolution kernels of band-limited Fourier sums and spectral
//! window weights.

use crate::error::{invalid, Result};
use crate::geometry::{AcquisitionGeometry, SceneSpec};
use crate::scene::ComplexImage;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Below this `|sin(x/2)|` the Dirichlet kernel is replaced by its limit.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Default shape parameter of the Gaussian window.
pub const GAUSSIAN_ALPHA: f64 = 2.5;

/// Dirichlet kernel `D_n(x) = sin((n + 1/2) x) / sin(x / 2)` for real
/// `n >= 0`. For integer or half-integer `n` this equals the sum of
/// `exp(i k x)` over the `2n + 1` frequencies `k = -n, -n+1, .., n`.
pub fn dirichlet(n: f64, x: f64) -> f64 {
    let a = n + 0.5;
    let s = (0.5 * x).sin();
    if s.abs() < SINGULAR_TOL {
        let m = (x / (2.0 * PI)).round();
        let parity = if m.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
        return 2.0 * a * (2.0 * a * PI * m).cos() * parity;
    }
    (a * x).sin() / s
}

/// Offset Dirichlet kernel `G(x; K_c, B) = exp(i K_c x) D_{B/2}(x)`, the
/// kernel of a partial sum over `K_c - B/2 ..= K_c + B/2`.
pub fn offset_kernel(k_c: f64, b: usize, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, k_c * x) * dirichlet(0.5 * b as f64, x)
}

/// `H(x; K_c, M, dk) = exp(i K_c x) D_{(M-1)/2}(dk x)`, the sum of
/// `exp(i k_j x)` over `M` equispaced wavenumbers centered at `K_c`.
pub fn h_kernel(k_c: f64, m: usize, delta_k: f64, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, k_c * x) * dirichlet(0.5 * (m as f64 - 1.0), delta_k * x)
}

/// Parameters that generated a [`KernelField`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub k_c: f64,
    pub m: usize,
    pub delta_k: f64,
    pub thetas: Vec<f64>,
}

impl KernelParams {
    pub fn from_geometry(geom: &AcquisitionGeometry) -> Self {
        Self {
            k_c: geom.center_k(),
            m: geom.num_freqs(),
            delta_k: geom.delta_k(),
            thetas: geom.azimuths_rad().to_vec(),
        }
    }
}

/// A sampled point-spread function: a 1-D trace or a 2-D field.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelField {
    Trace {
        values: Vec<Complex64>,
        origin: f64,
        spacing: f64,
        params: KernelParams,
    },
    Field {
        image: ComplexImage,
        params: KernelParams,
    },
}

impl KernelField {
    pub fn params(&self) -> &KernelParams {
        match self {
            KernelField::Trace { params, .. } | KernelField::Field { params, .. } => params,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        match self {
            KernelField::Trace { values, .. } => values,
            KernelField::Field { image, .. } => image.samples(),
        }
    }

    pub fn image(&self) -> Option<&ComplexImage> {
        match self {
            KernelField::Field { image, .. } => Some(image),
            KernelField::Trace { .. } => None,
        }
    }

    pub fn into_image(self) -> Option<ComplexImage> {
        match self {
            KernelField::Field { image, .. } => Some(image),
            KernelField::Trace { .. } => None,
        }
    }
}

fn check_params(m: usize, delta_k: f64) -> Result<()> {
    if m == 0 {
        return Err(invalid("kernel needs at least one wavenumber"));
    }
    if !(delta_k > 0.0) {
        return Err(invalid(format!("wavenumber step must be positive, got {delta_k}")));
    }
    Ok(())
}

/// `H` sampled at `origin + i * spacing`, `i = 0 .. len-1`.
pub fn h_trace(k_c: f64, m: usize, delta_k: f64, origin: f64, spacing: f64, len: usize) -> Result<KernelField> {
    check_params(m, delta_k)?;
    let values = (0..len)
        .map(|i| h_kernel(k_c, m, delta_k, origin + i as f64 * spacing))
        .collect();
    Ok(KernelField::Trace {
        values,
        origin,
        spacing,
        params: KernelParams {
            k_c,
            m,
            delta_k,
            thetas: Vec::new(),
        },
    })
}

/// Two-dimensional kernel `K(x, y) = sum_theta H(xi_theta . (x, y))`
/// sampled on the pixel grid of `scene`.
pub fn kernel2d(k_c: f64, m: usize, delta_k: f64, thetas: &[f64], scene: &SceneSpec) -> Result<KernelField> {
    check_params(m, delta_k)?;
    if thetas.is_empty() {
        return Err(invalid("kernel needs at least one azimuth"));
    }
    let n = scene.n_pixels();
    let h = scene.pixel_m();
    let dirs: Vec<(f64, f64)> = thetas.iter().map(|t| t.sin_cos()).collect();
    let half = (n / 2) as i64;
    let mut samples = vec![Complex64::new(0.0, 0.0); n * n];
    samples.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let x = (r as i64 - half) as f64 * h;
        for (col, v) in row.iter_mut().enumerate() {
            let y = (col as i64 - half) as f64 * h;
            *v = dirs.iter().map(|&(s, c)| h_kernel(k_c, m, delta_k, x * c + y * s)).sum();
        }
    });
    Ok(KernelField::Field {
        image: ComplexImage::from_samples(*scene, samples)?,
        params: KernelParams {
            k_c,
            m,
            delta_k,
            thetas: thetas.to_vec(),
        },
    })
}

/// [`kernel2d`] with the parameters of an acquisition.
pub fn kernel2d_for(geom: &AcquisitionGeometry, scene: &SceneSpec) -> Result<KernelField> {
    let p = KernelParams::from_geometry(geom);
    kernel2d(p.k_c, p.m, p.delta_k, &p.thetas, scene)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    Rectangular,
    Fejer,
    Hann,
    Hamming,
    Gaussian(f64),
}

impl FromStr for WindowKind {
    type Err = crate::Error;

    /// Accepts `rectangular`, `fejer`, `hann`, `hamming`, `gaussian` and
    /// `gaussian:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "rectangular" | "rect" | "none" => Ok(WindowKind::Rectangular),
            "fejer" => Ok(WindowKind::Fejer),
            "hann" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            "gaussian" => Ok(WindowKind::Gaussian(GAUSSIAN_ALPHA)),
            other => {
                if let Some(a) = other.strip_prefix("gaussian:") {
                    let alpha: f64 = a
                        .parse()
                        .map_err(|_| invalid(format!("bad gaussian window parameter '{a}'")))?;
                    if !(alpha > 0.0) {
                        return Err(invalid("gaussian window parameter must be positive"));
                    }
                    Ok(WindowKind::Gaussian(alpha))
                } else {
                    Err(invalid(format!("unknown window kind '{s}'")))
                }
            }
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowKind::Rectangular => write!(f, "rectangular"),
            WindowKind::Fejer => write!(f, "fejer"),
            WindowKind::Hann => write!(f, "hann"),
            WindowKind::Hamming => write!(f, "hamming"),
            WindowKind::Gaussian(a) => write!(f, "gaussian:{a}"),
        }
    }
}

/// Symmetric weights for `m` consecutive frequencies.
///
/// With `n = (m - 1) / 2` and offset `k = j - n`: Fejer is `1 - |k| / n`,
/// Hann `0.5 (1 - cos(2 pi j / (m - 1)))`, Hamming
/// `0.54 - 0.46 cos(2 pi j / (m - 1))`, Gaussian `exp(-(alpha k / n)^2 / 2)`.
/// A single weight is always 1.
pub fn window_weights(kind: WindowKind, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(invalid("window length must be at least 1"));
    }
    if m == 1 {
        return Ok(vec![1.0]);
    }
    let n = 0.5 * (m - 1) as f64;
    let denom = (m - 1) as f64;
    let w = (0..m)
        .map(|j| {
            let k = j as f64 - n;
            match kind {
                WindowKind::Rectangular => 1.0,
                WindowKind::Fejer => 1.0 - k.abs() / n,
                WindowKind::Hann => 0.5 * (1.0 - (2.0 * PI * j as f64 / denom).cos()),
                WindowKind::Hamming => 0.54 - 0.46 * (2.0 * PI * j as f64 / denom).cos(),
                WindowKind::Gaussian(alpha) => (-0.5 * (alpha * k / n).powi(2)).exp(),
            }
        })
        .map(|v: f64| v.clamp(0.0, 1.0))
        .collect();
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use proptest::prelude::*;

    fn brute(ks: impl Iterator<Item = f64>, x: f64) -> Complex64 {
        ks.map(|k| Complex64::from_polar(1.0, k * x)).sum()
    }

    #[test]
    fn dirichlet_values() {
        assert_eq!(dirichlet(25.0, 0.0), 51.0);
        assert!((dirichlet(1.0, PI) + 1.0).abs() < 1e-15);
        let rng = CounterRng::new(3, 0);
        for i in 0..100 {
            let x = 20.0 * rng.uniform(i) - 10.0;
            let s = brute((-25..=25).map(f64::from), x);
            assert!(s.im.abs() < 1e-12);
            assert!((dirichlet(25.0, x) - s.re).abs() < 1e-11);
        }
    }

    #[test]
    fn dirichlet_limits_at_every_period() {
        // half-integer order: 2n+1 = 4 frequencies -3/2 .. 3/2
        for m in -3..=3 {
            let x = 2.0 * PI * m as f64;
            let s = brute([-1.5, -0.5, 0.5, 1.5].into_iter(), x);
            assert!((dirichlet(1.5, x) - s.re).abs() < 1e-12, "m={m}");
            assert!((dirichlet(2.0, x) - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn offset_kernel_matches_sum() {
        let rng = CounterRng::new(5, 0);
        for i in 0..100 {
            let x = 2.0 * PI * rng.uniform(i) - PI;
            let g = offset_kernel(125.0, 50, x);
            let s = brute((100..=150).map(f64::from), x);
            assert!((g - s).norm() <= 1e-10 * s.norm());
            assert!((g.norm() - dirichlet(25.0, x).abs()).abs() < 1e-12);
        }
        assert_eq!(offset_kernel(0.0, 10, 0.3).im, 0.0);
    }

    #[test]
    fn h_kernel_peak_and_scaling() {
        assert!((h_kernel(300.0, 512, 0.17, 0.0) - Complex64::new(512.0, 0.0)).norm() < 1e-12);
        for x in [0.013, 0.4, -1.7] {
            let a = h_kernel(0.0, 64, 0.2, x);
            let b = h_kernel(0.0, 64, 0.1, 2.0 * x);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel2d_single_angle_is_trace() {
        let scene = SceneSpec::new(1.0, 16).unwrap();
        let k = kernel2d(40.0, 32, 0.5, &[0.0], &scene).unwrap();
        let img = k.image().unwrap();
        let h = scene.pixel_m();
        for j1 in scene.indices() {
            let want = h_kernel(40.0, 32, 0.5, j1 as f64 * h);
            for j2 in scene.indices() {
                assert!((img.get(j1, j2) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn window_examples() {
        assert_eq!(window_weights(WindowKind::Fejer, 5).unwrap(), vec![0.0, 0.5, 1.0, 0.5, 0.0]);
        assert_eq!(window_weights(WindowKind::Rectangular, 8).unwrap(), vec![1.0; 8]);
        let m = 33;
        let hann: f64 = window_weights(WindowKind::Hann, m).unwrap().iter().sum();
        let closed: f64 = (0..m).map(|j| 0.5 * (1.0 - (2.0 * PI * j as f64 / (m - 1) as f64).cos())).sum();
        assert!((hann - closed).abs() < 1e-12);
        assert!((hann - (m - 1) as f64 / 2.0).abs() < 1e-12);
        assert!("triangle".parse::<WindowKind>().is_err());
        assert_eq!("gaussian".parse::<WindowKind>().unwrap(), WindowKind::Gaussian(2.5));
        assert_eq!("gaussian:1.5".parse::<WindowKind>().unwrap(), WindowKind::Gaussian(1.5));
        for kind in [WindowKind::Fejer, WindowKind::Hamming, WindowKind::Gaussian(2.5)] {
            assert_eq!(kind.to_string().parse::<WindowKind>().unwrap(), kind);
        }
    }

    #[test]
    fn rectangular_window_minimizes_l2_error() {
        // Parseval: the error of the weighted sum is sum |1 - s_k|^2 |c_k|^2
        // over the kept band plus the discarded tail.
        let rng = CounterRng::new(17, 0);
        let n = 20usize;
        let total = 64usize;
        let coeffs: Vec<Complex64> = (0..total)
            .map(|k| Complex64::new(rng.uniform(2 * k as u64) - 0.5, rng.uniform(2 * k as u64 + 1) - 0.5))
            .collect();
        let kept = 2 * n + 1;
        let err = |kind| {
            let w = window_weights(kind, kept).unwrap();
            let band: f64 = coeffs[..kept].iter().zip(&w).map(|(c, s)| (1.0 - s).powi(2) * c.norm_sqr()).sum();
            band + coeffs[kept..].iter().map(|c| c.norm_sqr()).sum::<f64>()
        };
        let rect = err(WindowKind::Rectangular);
        assert!(rect < err(WindowKind::Fejer));
        assert!(rect < err(WindowKind::Hann));
    }

    proptest! {
        #[test]
        fn windows_are_symmetric_in_unit_interval(m in 1usize..200, which in 0usize..5) {
            let kind = [WindowKind::Rectangular, WindowKind::Fejer, WindowKind::Hann,
                        WindowKind::Hamming, WindowKind::Gaussian(2.5)][which];
            let w = window_weights(kind, m).unwrap();
            prop_assert_eq!(w.len(), m);
            for j in 0..m {
                prop_assert!((0.0..=1.0).contains(&w[j]));
                prop_assert!((w[j] - w[m - 1 - j]).abs() < 1e-12);
            }
        }

        #[test]
        fn kernel2d_conjugate_symmetry(half_ap in 0.01..0.2f64, k_c in 10.0..80.0f64) {
            let scene = SceneSpec::new(1.0, 8).unwrap();
            let thetas = [-half_ap, 0.0, half_ap];
            let k = kernel2d(k_c, 16, 0.3, &thetas, &scene).unwrap();
            let img = k.image().unwrap();
            for j1 in -3..4i64 {
                for j2 in -3..4i64 {
                    let a = img.get(j1, j2);
                    let b = img.get(-j1, -j2).conj();
                    prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
                }
            }
        }
    }
}
