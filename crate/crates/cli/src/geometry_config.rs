use anyhow::{Context, Result};
use sarkit::geometry::{AcquisitionGeometry, GeometryFile, SPEED_OF_LIGHT};
use serde::Deserialize;
use std::path::Path;

/// A spotlight collection described by its band and aperture; angles in degrees.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpotlightFile {
    center_hz: f64,
    bandwidth_hz: f64,
    num_freqs: usize,
    elevation_deg: f64,
    center_azimuth_deg: f64,
    aperture_deg: f64,
    num_angles: usize,
    #[serde(default = "default_c")]
    c_mps: f64,
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GeometryConfig {
    Spotlight(SpotlightFile),
    Explicit(GeometryFile),
}

/// Reads either an explicit geometry (`freqs_hz`, `elevation_deg`,
/// `azimuths_deg`) or a spotlight summary.
pub fn load(path: &Path) -> Result<AcquisitionGeometry> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading geometry {}", path.display()))?;
    let cfg: GeometryConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing geometry {}", path.display()))?;
    let geom = match cfg {
        GeometryConfig::Explicit(f) => AcquisitionGeometry::try_from(f)?,
        GeometryConfig::Spotlight(s) => AcquisitionGeometry::spotlight(
            s.center_hz,
            s.bandwidth_hz,
            s.num_freqs,
            s.elevation_deg.to_radians(),
            s.center_azimuth_deg.to_radians(),
            s.aperture_deg.to_radians(),
            s.num_angles,
            s.c_mps,
        )?,
    };
    Ok(geom)
}
