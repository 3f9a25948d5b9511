//! Acquisition geometry: microwave frequencies, elevation and azimuths, and
//! their conversion to spatial and digital Fourier frequencies.

use crate::error::{domain, invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Relative tolerance for the equal-spacing check on frequency lists.
pub const SPACING_RTOL: f64 = 1e-9;

/// Cross-range radius formula relies on `sin(dtheta) ~ dtheta`.
pub const SMALL_ANGLE_LIMIT: f64 = 0.1;

/// Spatial wavenumber `2 pi cos(phi) 2 alpha / c` in rad/m.
pub fn wavenumber(alpha_hz: f64, phi_rad: f64, c_mps: f64) -> Result<f64> {
    check_elevation(phi_rad)?;
    if !(alpha_hz > 0.0) || !(c_mps > 0.0) {
        return Err(domain(format!(
            "wavenumber needs positive frequency and speed (alpha={alpha_hz}, c={c_mps})"
        )));
    }
    Ok(2.0 * PI * phi_rad.cos() * 2.0 * alpha_hz / c_mps)
}

/// Largest alias-free scene radius `c / (4 dalpha cos phi)` in the range direction.
pub fn max_scene_radius(delta_alpha_hz: f64, phi_rad: f64, c_mps: f64) -> Result<f64> {
    check_elevation(phi_rad)?;
    if !(delta_alpha_hz > 0.0) || !(c_mps > 0.0) {
        return Err(domain(format!(
            "frequency step and speed must be positive (dalpha={delta_alpha_hz}, c={c_mps})"
        )));
    }
    Ok(c_mps / (4.0 * delta_alpha_hz * phi_rad.cos()))
}

/// Largest alias-free cross-range radius `c / (4 alpha_max cos phi dtheta)`.
///
/// Uses the small-angle approximation of the angular frequency increment; a
/// warning is logged when `dtheta` exceeds [`SMALL_ANGLE_LIMIT`].
pub fn max_crossrange_radius(
    alpha_max_hz: f64,
    phi_rad: f64,
    delta_theta_rad: f64,
    c_mps: f64,
) -> Result<f64> {
    check_elevation(phi_rad)?;
    if !(alpha_max_hz > 0.0) || !(delta_theta_rad > 0.0) || !(c_mps > 0.0) {
        return Err(domain(format!(
            "cross-range radius needs positive inputs (alpha={alpha_max_hz}, dtheta={delta_theta_rad}, c={c_mps})"
        )));
    }
    if delta_theta_rad > SMALL_ANGLE_LIMIT {
        log::warn!(
            "azimuth step {delta_theta_rad:.4} rad exceeds the small-angle regime; cross-range radius is approximate"
        );
    }
    Ok(c_mps / (4.0 * alpha_max_hz * phi_rad.cos() * delta_theta_rad))
}

fn check_elevation(phi: f64) -> Result<()> {
    if !(phi.abs() < FRAC_PI_2) {
        return Err(domain(format!(
            "elevation {phi} rad is outside (-pi/2, pi/2); cos(phi) must be positive"
        )));
    }
    Ok(())
}

/// Collection geometry for one spotlight pass at a fixed elevation.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionGeometry {
    freqs_hz: Vec<f64>,
    elevation_rad: f64,
    azimuths_rad: Vec<f64>,
    c_mps: f64,
}

impl AcquisitionGeometry {
    pub fn new(
        freqs_hz: Vec<f64>,
        elevation_rad: f64,
        azimuths_rad: Vec<f64>,
        c_mps: f64,
    ) -> Result<Self> {
        if freqs_hz.len() < 2 {
            return Err(invalid("geometry needs at least two frequencies"));
        }
        if !(0.0..FRAC_PI_2).contains(&elevation_rad) {
            return Err(domain(format!(
                "elevation {elevation_rad} rad must satisfy 0 <= phi < pi/2"
            )));
        }
        if !(c_mps > 0.0) {
            return Err(invalid(format!("speed of light must be positive, got {c_mps}")));
        }
        if freqs_hz.iter().any(|f| !(*f > 0.0)) {
            return Err(invalid("frequencies must be positive"));
        }
        let step = (freqs_hz[freqs_hz.len() - 1] - freqs_hz[0]) / (freqs_hz.len() - 1) as f64;
        if !(step > 0.0) {
            return Err(invalid("frequencies must be strictly increasing"));
        }
        for (j, w) in freqs_hz.windows(2).enumerate() {
            let d = w[1] - w[0];
            if !(d > 0.0) {
                return Err(invalid(format!("frequencies not strictly increasing at index {}", j + 1)));
            }
            if ((d - step) / step).abs() > SPACING_RTOL {
                return Err(invalid(format!(
                    "frequencies not equally spaced at index {} (step {d}, mean step {step})",
                    j + 1
                )));
            }
        }
        if azimuths_rad.is_empty() {
            return Err(invalid("geometry needs at least one azimuth"));
        }
        if azimuths_rad.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("azimuths must be strictly increasing"));
        }
        if azimuths_rad[azimuths_rad.len() - 1] - azimuths_rad[0] >= 2.0 * PI {
            return Err(invalid("azimuths must lie within one revolution"));
        }
        Ok(Self {
            freqs_hz,
            elevation_rad,
            azimuths_rad,
            c_mps,
        })
    }

    /// Equally spaced frequencies and azimuths around a center, the usual
    /// spotlight collection. `aperture_rad` is the total azimuth extent.
    #[allow(clippy::too_many_arguments)]
    pub fn spotlight(
        center_hz: f64,
        bandwidth_hz: f64,
        num_freqs: usize,
        elevation_rad: f64,
        center_azimuth_rad: f64,
        aperture_rad: f64,
        num_angles: usize,
        c_mps: f64,
    ) -> Result<Self> {
        if num_freqs < 2 || num_angles == 0 {
            return Err(invalid("spotlight geometry needs >= 2 frequencies and >= 1 angle"));
        }
        let f0 = center_hz - bandwidth_hz / 2.0;
        let df = bandwidth_hz / (num_freqs - 1) as f64;
        let freqs = (0..num_freqs).map(|j| f0 + j as f64 * df).collect();
        let azimuths = if num_angles == 1 {
            vec![center_azimuth_rad]
        } else {
            let a0 = center_azimuth_rad - aperture_rad / 2.0;
            let da = aperture_rad / (num_angles - 1) as f64;
            (0..num_angles).map(|i| a0 + i as f64 * da).collect()
        };
        Self::new(freqs, elevation_rad, azimuths, c_mps)
    }

    pub fn freqs_hz(&self) -> &[f64] {
        &self.freqs_hz
    }

    pub fn elevation_rad(&self) -> f64 {
        self.elevation_rad
    }

    pub fn azimuths_rad(&self) -> &[f64] {
        &self.azimuths_rad
    }

    pub fn c_mps(&self) -> f64 {
        self.c_mps
    }

    pub fn num_freqs(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn num_angles(&self) -> usize {
        self.azimuths_rad.len()
    }

    pub fn delta_alpha(&self) -> f64 {
        (self.freqs_hz[self.freqs_hz.len() - 1] - self.freqs_hz[0]) / (self.freqs_hz.len() - 1) as f64
    }

    /// Mean azimuth increment, `None` for a single look.
    pub fn delta_theta(&self) -> Option<f64> {
        let p = self.azimuths_rad.len();
        (p > 1).then(|| (self.azimuths_rad[p - 1] - self.azimuths_rad[0]) / (p - 1) as f64)
    }

    fn k_scale(&self) -> f64 {
        4.0 * PI * self.elevation_rad.cos() / self.c_mps
    }

    /// Spatial wavenumbers `k_j` in rad/m, one per frequency.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let s = self.k_scale();
        self.freqs_hz.iter().map(|a| s * a).collect()
    }

    pub fn delta_k(&self) -> f64 {
        self.k_scale() * self.delta_alpha()
    }

    /// Band-center wavenumber `(k_1 + k_M) / 2`.
    pub fn center_k(&self) -> f64 {
        let s = self.k_scale();
        0.5 * s * (self.freqs_hz[0] + self.freqs_hz[self.freqs_hz.len() - 1])
    }

    pub fn alias_limits(&self) -> AliasLimits {
        // Constructor invariants make both formulas well defined.
        let range = max_scene_radius(self.delta_alpha(), self.elevation_rad, self.c_mps)
            .expect("validated geometry");
        let crossrange = self.delta_theta().map(|dt| {
            max_crossrange_radius(
                self.freqs_hz[self.freqs_hz.len() - 1],
                self.elevation_rad,
                dt,
                self.c_mps,
            )
            .expect("validated geometry")
        });
        AliasLimits { range, crossrange }
    }
}

/// Alias-free scene radii implied by the sampling steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasLimits {
    pub range: f64,
    pub crossrange: Option<f64>,
}

impl AliasLimits {
    /// Human-readable warnings for every limit the scene exceeds.
    pub fn warnings_for(&self, scene: &SceneSpec) -> Vec<String> {
        let mut out = Vec::new();
        if scene.radius_m() > self.range {
            out.push(format!(
                "scene radius {:.3} m exceeds the alias-free range radius {:.3} m",
                scene.radius_m(),
                self.range
            ));
        }
        if let Some(cr) = self.crossrange {
            if scene.radius_m() > cr {
                out.push(format!(
                    "scene radius {:.3} m exceeds the alias-free cross-range radius {:.3} m",
                    scene.radius_m(),
                    cr
                ));
            }
        }
        out
    }
}

/// Square reconstruction region `[-R, R)^2` sampled by `N x N` pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct SceneSpec {
    radius_m: f64,
    n_pixels: usize,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    radius_m: f64,
    n_pixels: usize,
}

impl TryFrom<SceneFile> for SceneSpec {
    type Error = crate::Error;
    fn try_from(f: SceneFile) -> Result<Self> {
        SceneSpec::new(f.radius_m, f.n_pixels)
    }
}

impl From<SceneSpec> for SceneFile {
    fn from(s: SceneSpec) -> Self {
        SceneFile {
            radius_m: s.radius_m,
            n_pixels: s.n_pixels,
        }
    }
}

impl SceneSpec {
    pub fn new(radius_m: f64, n_pixels: usize) -> Result<Self> {
        if !(radius_m > 0.0) || !radius_m.is_finite() {
            return Err(invalid(format!("scene radius must be positive, got {radius_m}")));
        }
        if n_pixels == 0 || !n_pixels.is_multiple_of(2) {
            return Err(invalid(format!("pixel count must be even and positive, got {n_pixels}")));
        }
        Ok(Self { radius_m, n_pixels })
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn n_pixels(&self) -> usize {
        self.n_pixels
    }

    /// Pixel length `h = 2R / N`.
    pub fn pixel_m(&self) -> f64 {
        2.0 * self.radius_m / self.n_pixels as f64
    }

    /// Scene with twice the side length at the same pixel size; covers every
    /// pixel offset that occurs inside `self`.
    pub fn doubled(&self) -> SceneSpec {
        SceneSpec {
            radius_m: 2.0 * self.radius_m,
            n_pixels: 2 * self.n_pixels,
        }
    }

    /// Signed pixel indices `-N/2 .. N/2 - 1`.
    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let half = (self.n_pixels / 2) as i64;
        -half..half
    }
}

/// Dimensionless frequencies `h k_j (cos theta_i, sin theta_i)`, all
/// frequencies of the first azimuth, then all of the second, and so on.
pub fn digital_frequencies(geom: &AcquisitionGeometry, scene: &SceneSpec) -> Vec<(f64, f64)> {
    let h = scene.pixel_m();
    let ks = geom.wavenumbers();
    let mut out = Vec::with_capacity(ks.len() * geom.num_angles());
    for &theta in geom.azimuths_rad() {
        let (s, c) = theta.sin_cos();
        for &k in &ks {
            out.push((h * k * c, h * k * s));
        }
    }
    out
}

/// JSON form of a geometry; angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub freqs_hz: Vec<f64>,
    pub elevation_deg: f64,
    pub azimuths_deg: Vec<f64>,
    #[serde(default = "default_c")]
    pub c_mps: f64,
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

impl TryFrom<GeometryFile> for AcquisitionGeometry {
    type Error = crate::Error;
    fn try_from(f: GeometryFile) -> Result<Self> {
        AcquisitionGeometry::new(
            f.freqs_hz,
            f.elevation_deg.to_radians(),
            f.azimuths_deg.iter().map(|d| d.to_radians()).collect(),
            f.c_mps,
        )
    }
}

impl From<&AcquisitionGeometry> for GeometryFile {
    fn from(g: &AcquisitionGeometry) -> Self {
        GeometryFile {
            freqs_hz: g.freqs_hz.clone(),
            elevation_deg: g.elevation_rad.to_degrees(),
            azimuths_deg: g.azimuths_rad.iter().map(|r| r.to_degrees()).collect(),
            c_mps: g.c_mps,
        }
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn wavenumber_examples() {
        assert!(rel(wavenumber(1e10, 0.0, 3e8).unwrap(), 418.879_020_478_639) < 1e-12);
        assert!(rel(wavenumber(1e10, PI / 3.0, 3e8).unwrap(), 209.439_510_239_319_5) < 1e-12);
        assert!((wavenumber(1e10, 0.5236, 3e8).unwrap() - 362.760).abs() < 1e-3);
    }

    #[test]
    fn wavenumber_rejects_grazing_elevation() {
        assert!(matches!(wavenumber(1e10, FRAC_PI_2, 3e8), Err(crate::Error::Domain(_))));
        assert!(wavenumber(1e10, 2.0, 3e8).is_err());
    }

    #[test]
    fn scene_radius_examples() {
        let phi = 30f64.to_radians();
        let r = max_scene_radius(600e6 / 511.0, phi, 3e8).unwrap();
        assert!((r - 73.7565).abs() < 1e-3);
        let r2 = max_scene_radius(2.0 * 600e6 / 511.0, phi, 3e8).unwrap();
        assert!(rel(r2, r / 2.0) < 1e-14);
        assert!(rel(max_scene_radius(1e6, 0.0, 3e8).unwrap(), 3e8 / 4e6) < 1e-15);
        assert!(max_scene_radius(1e6, FRAC_PI_2, 3e8).is_err());
    }

    #[test]
    fn crossrange_radius_examples() {
        let phi = 30f64.to_radians();
        let dt = 3f64.to_radians() / 127.0;
        let r = max_crossrange_radius(10.3e9, phi, dt, 3e8).unwrap();
        assert!((r - 20.3938).abs() < 1e-3);
        let r_half = max_crossrange_radius(10.3e9, phi, dt / 2.0, 3e8).unwrap();
        assert!(rel(r_half, 2.0 * r) < 1e-14);
        assert!(rel(max_crossrange_radius(10.3e9, 0.0, dt, 3e8).unwrap(), 3e8 / (4.0 * 10.3e9 * dt)) < 1e-14);
        assert!(max_crossrange_radius(10.3e9, phi, 0.0, 3e8).is_err());
        assert!(max_crossrange_radius(-1.0, phi, dt, 3e8).is_err());
    }

    fn x_band() -> AcquisitionGeometry {
        AcquisitionGeometry::spotlight(
            10e9,
            600e6,
            512,
            30f64.to_radians(),
            50f64.to_radians(),
            3f64.to_radians(),
            128,
            3e8,
        )
        .unwrap()
    }

    #[test]
    fn digital_frequency_magnitude_at_center() {
        let geom = AcquisitionGeometry::new(vec![9.9e9, 10e9, 10.1e9], 30f64.to_radians(), vec![0.3], 3e8).unwrap();
        let scene = SceneSpec::new(5.0, 500).unwrap();
        let d = digital_frequencies(&geom, &scene);
        let (k1, k2) = d[1];
        assert!(((k1 * k1 + k2 * k2).sqrt() - 7.2552).abs() < 1e-4);
    }

    #[test]
    fn zero_azimuth_has_no_cross_component() {
        let geom = AcquisitionGeometry::new(vec![1e10, 1.1e10], 0.0, vec![0.0], 3e8).unwrap();
        let scene = SceneSpec::new(1.0, 16).unwrap();
        assert!(digital_frequencies(&geom, &scene).iter().all(|&(_, k2)| k2 == 0.0));
    }

    #[test]
    fn ordering_is_frequency_major() {
        let geom = x_band();
        let scene = SceneSpec::new(5.0, 500).unwrap();
        let d = digital_frequencies(&geom, &scene);
        assert_eq!(d.len(), 512 * 128);
        // consecutive entries within one azimuth share the direction
        let (a, b) = (d[0], d[1]);
        assert!((a.1 / a.0 - b.1 / b.0).abs() < 1e-12);
        // entry M starts the second azimuth at the lowest frequency
        let r0 = (d[0].0.hypot(d[0].1), d[512].0.hypot(d[512].1));
        assert!(rel(r0.0, r0.1) < 1e-12);
    }

    #[test]
    fn rotating_by_pi_negates_frequencies() {
        let scene = SceneSpec::new(2.0, 64).unwrap();
        let thetas = vec![0.1, 0.4, 0.9];
        let g1 = AcquisitionGeometry::new(vec![1e10, 1.01e10], 0.2, thetas.clone(), 3e8).unwrap();
        let g2 = AcquisitionGeometry::new(vec![1e10, 1.01e10], 0.2, thetas.iter().map(|t| t + PI).collect(), 3e8).unwrap();
        for (a, b) in digital_frequencies(&g1, &scene).iter().zip(digital_frequencies(&g2, &scene)) {
            assert!((a.0 + b.0).abs() < 1e-12 && (a.1 + b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(AcquisitionGeometry::new(vec![1e10], 0.0, vec![0.0], 3e8).is_err());
        assert!(AcquisitionGeometry::new(vec![1e10, 1.1e10, 1.3e10], 0.0, vec![0.0], 3e8).is_err());
        assert!(AcquisitionGeometry::new(vec![1e10, 1.1e10], 0.0, vec![], 3e8).is_err());
        assert!(AcquisitionGeometry::new(vec![1e10, 1.1e10], 0.0, vec![0.2, 0.1], 3e8).is_err());
        assert!(AcquisitionGeometry::new(vec![1e10, 1.1e10], FRAC_PI_2, vec![0.0], 3e8).is_err());
        // float noise well inside the spacing tolerance is accepted
        let noisy = vec![1e10, 1.1e10 * (1.0 + 1e-13), 1.2e10];
        assert!(AcquisitionGeometry::new(noisy, 0.0, vec![0.0], 3e8).is_ok());
    }

    #[test]
    fn alias_warnings_for_oversized_scene() {
        let geom = x_band();
        let limits = geom.alias_limits();
        assert!((limits.range - 73.7565).abs() < 1e-3);
        assert!(limits.warnings_for(&SceneSpec::new(100.0, 500).unwrap()).iter().any(|w| w.contains("range radius")));
        assert!(limits.warnings_for(&SceneSpec::new(5.0, 500).unwrap()).is_empty());
    }

    #[test]
    fn scene_pixel_is_derived() {
        let s = SceneSpec::new(5.0, 500).unwrap();
        assert_eq!(s.pixel_m() * 500.0, 10.0);
        assert!(SceneSpec::new(5.0, 7).is_err());
        assert!(SceneSpec::new(0.0, 8).is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SceneSpec>(&json).unwrap(), s);
        assert!(serde_json::from_str::<SceneSpec>(r#"{"radius_m":1.0,"n_pixels":3}"#).is_err());
    }

    #[test]
    fn geometry_json_roundtrip() {
        let g = x_band();
        let json = serde_json::to_string(&GeometryFile::from(&g)).unwrap();
        let back: GeometryFile = serde_json::from_str(&json).unwrap();
        let g2 = AcquisitionGeometry::try_from(back).unwrap();
        assert_eq!(g.freqs_hz(), g2.freqs_hz());
        for (a, b) in g.azimuths_rad().iter().zip(g2.azimuths_rad()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn radial_consistency(alpha in 1e9f64..2e10, phi in 0.0f64..1.5, theta in -3.0f64..3.0, n in 1usize..200) {
            let geom = AcquisitionGeometry::new(vec![alpha, alpha * 1.01], phi, vec![theta], SPEED_OF_LIGHT).unwrap();
            let scene = SceneSpec::new(3.0, 2 * n).unwrap();
            let h = scene.pixel_m();
            let (k1, k2) = digital_frequencies(&geom, &scene)[0];
            let expect = 2.0 * PI * h * phi.cos() * 2.0 * alpha / SPEED_OF_LIGHT;
            prop_assert!(((k1 * k1 + k2 * k2).sqrt() - expect).abs() <= 1e-12 * expect);
        }

        #[test]
        fn radius_times_delta_k_is_pi(alpha in 1e9f64..2e10, da in 1e5f64..1e8, phi in 0.0f64..1.5) {
            let dk = wavenumber(alpha + da, phi, SPEED_OF_LIGHT).unwrap() - wavenumber(alpha, phi, SPEED_OF_LIGHT).unwrap();
            let r = max_scene_radius(da, phi, SPEED_OF_LIGHT).unwrap();
            // dk is a difference of nearby wavenumbers; allow for its cancellation error
            let cancel = 4.0 * f64::EPSILON * (alpha / da);
            prop_assert!((r * dk / PI - 1.0).abs() <= 1e-12 + cancel);
        }

        #[test]
        fn wavenumber_linear_even_monotone(alpha in 1e9f64..2e10, phi in 0.0f64..1.5, t in 0.5f64..3.0) {
            let c = SPEED_OF_LIGHT;
            let k = wavenumber(alpha, phi, c).unwrap();
            prop_assert!((wavenumber(t * alpha, phi, c).unwrap() - t * k).abs() <= 1e-12 * t * k);
            prop_assert_eq!(wavenumber(alpha, -phi, c).unwrap(), k);
            prop_assert!(wavenumber(alpha, (phi + 0.05).min(1.55), c).unwrap() <= k);
        }
    }
}
