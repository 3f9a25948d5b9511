//! File formats: raw little-endian complex128 data with a JSON sidecar,
//! 16-bit PGM for display, and CSV tables.
//!
//! A data file `name` is accompanied by `name.json` describing its shape and
//! role. Values are interleaved `(re, im)` IEEE-754 doubles, row-major.

use crate::error::{invalid, Error, Result};
use crate::forward::PhaseHistory;
use crate::geometry::{AcquisitionGeometry, GeometryFile, SceneSpec};
use crate::scene::{ComplexImage, ComplexSignal};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;
pub const DTYPE: &str = "c128le";
pub const DEFAULT_DB_FLOOR: f64 = -60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    PhaseHistory,
    Image,
    /// Fourier coefficients of a 1-D signal at integer frequencies.
    Fourier1d,
    Signal,
    /// A bare vector, such as solver state.
    Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format_version: u32,
    pub dtype: String,
    pub role: Role,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<SceneSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_radpm: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub azimuths_rad: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<i64>>,
    /// Length of the sample grid the coefficients refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

impl Sidecar {
    pub fn new(role: Role, dims: Vec<usize>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dtype: DTYPE.to_string(),
            role,
            dims,
            pixel_m: None,
            scene: None,
            geometry: None,
            k_radpm: None,
            azimuths_rad: None,
            ks: None,
            grid_len: None,
            origin: None,
            period: None,
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn expect_role(&self, role: Role) -> Result<()> {
        if self.role != role {
            return Err(invalid(format!("expected a {role:?} file, found {:?}", self.role)));
        }
        Ok(())
    }
}

pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_complex(path: &Path, values: &[Complex64], sidecar: &Sidecar) -> Result<()> {
    if sidecar.len() != values.len() {
        return Err(Error::DimensionMismatch {
            what: "sidecar dims",
            expected: values.len(),
            actual: sidecar.len(),
        });
    }
    let mut bytes = Vec::with_capacity(16 * values.len());
    for v in values {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    fs::write(path, bytes)?;
    let mut json = serde_json::to_string_pretty(sidecar)?;
    json.push('\n');
    fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(sidecar_path(path))?;
    let sc: Sidecar = serde_json::from_str(&text)?;
    if sc.format_version != FORMAT_VERSION {
        return Err(invalid(format!("unsupported format version {}", sc.format_version)));
    }
    if sc.dtype != DTYPE {
        return Err(invalid(format!("unsupported dtype {:?}", sc.dtype)));
    }
    Ok(sc)
}

pub fn read_complex(path: &Path) -> Result<(Sidecar, Vec<Complex64>)> {
    let sc = read_sidecar(path)?;
    let bytes = fs::read(path)?;
    if bytes.len() != 16 * sc.len() {
        return Err(invalid(format!(
            "{} holds {} bytes, sidecar dims {:?} need {}",
            path.display(),
            bytes.len(),
            sc.dims,
            16 * sc.len()
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((sc, values))
}

pub fn write_phase_history(path: &Path, ph: &PhaseHistory, geometry: Option<&AcquisitionGeometry>) -> Result<()> {
    let mut sc = Sidecar::new(Role::PhaseHistory, vec![ph.num_angles(), ph.num_freqs()]);
    sc.scene = Some(*ph.scene());
    sc.k_radpm = Some(ph.k_radpm().to_vec());
    sc.azimuths_rad = Some(ph.azimuths_rad().to_vec());
    sc.geometry = geometry.map(GeometryFile::from);
    write_complex(path, ph.samples(), &sc)
}

/// The phase history and, when recorded, the acquisition geometry.
pub fn read_phase_history(path: &Path) -> Result<(PhaseHistory, Option<AcquisitionGeometry>)> {
    let (sc, values) = read_complex(path)?;
    sc.expect_role(Role::PhaseHistory)?;
    let missing = |what: &str| invalid(format!("phase-history sidecar lacks {what}"));
    let ph = PhaseHistory::new(
        values,
        sc.k_radpm.clone().ok_or_else(|| missing("k_radpm"))?,
        sc.azimuths_rad.clone().ok_or_else(|| missing("azimuths_rad"))?,
        sc.scene.ok_or_else(|| missing("scene"))?,
    )?;
    let geom = sc.geometry.map(AcquisitionGeometry::try_from).transpose()?;
    Ok((ph, geom))
}

pub fn write_image(path: &Path, image: &ComplexImage) -> Result<()> {
    let mut sc = Sidecar::new(Role::Image, vec![image.n(), image.n()]);
    sc.pixel_m = Some(image.pixel_m());
    sc.scene = Some(*image.scene());
    write_complex(path, image.samples(), &sc)
}

pub fn read_image(path: &Path) -> Result<ComplexImage> {
    let (sc, values) = read_complex(path)?;
    sc.expect_role(Role::Image)?;
    let scene = sc.scene.ok_or_else(|| invalid("image sidecar lacks scene"))?;
    ComplexImage::from_samples(scene, values)
}

/// Fourier coefficients `values[i]` at frequency `ks[i]` of a signal on
/// `grid_len` samples of `[origin, origin + period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    pub ks: Vec<i64>,
    pub values: Vec<Complex64>,
    pub grid_len: usize,
    pub origin: f64,
    pub period: f64,
}

pub fn write_fourier(path: &Path, data: &FourierData) -> Result<()> {
    if data.ks.len() != data.values.len() {
        return Err(Error::DimensionMismatch {
            what: "coefficient frequencies",
            expected: data.values.len(),
            actual: data.ks.len(),
        });
    }
    let mut sc = Sidecar::new(Role::Fourier1d, vec![data.values.len()]);
    sc.ks = Some(data.ks.clone());
    sc.grid_len = Some(data.grid_len);
    sc.origin = Some(data.origin);
    sc.period = Some(data.period);
    write_complex(path, &data.values, &sc)
}

pub fn read_fourier(path: &Path) -> Result<FourierData> {
    let (sc, values) = read_complex(path)?;
    sc.expect_role(Role::Fourier1d)?;
    let missing = |what: &str| invalid(format!("fourier_1d sidecar lacks {what}"));
    let ks = sc.ks.ok_or_else(|| missing("ks"))?;
    if ks.len() != values.len() {
        return Err(invalid("fourier_1d sidecar ks do not match the data length"));
    }
    Ok(FourierData {
        ks,
        values,
        grid_len: sc.grid_len.ok_or_else(|| missing("grid_len"))?,
        origin: sc.origin.ok_or_else(|| missing("origin"))?,
        period: sc.period.ok_or_else(|| missing("period"))?,
    })
}

pub fn write_signal(path: &Path, signal: &ComplexSignal) -> Result<()> {
    let mut sc = Sidecar::new(Role::Signal, vec![signal.len()]);
    sc.origin = Some(signal.origin);
    sc.period = Some(signal.period);
    write_complex(path, &signal.samples, &sc)
}

pub fn read_signal(path: &Path) -> Result<ComplexSignal> {
    let (sc, values) = read_complex(path)?;
    sc.expect_role(Role::Signal)?;
    ComplexSignal::new(
        values,
        sc.origin.ok_or_else(|| invalid("signal sidecar lacks origin"))?,
        sc.period.ok_or_else(|| invalid("signal sidecar lacks period"))?,
    )
}

pub fn write_vector(path: &Path, values: &[Complex64]) -> Result<()> {
    write_complex(path, values, &Sidecar::new(Role::Vector, vec![values.len()]))
}

pub fn read_vector(path: &Path) -> Result<Vec<Complex64>> {
    let (sc, values) = read_complex(path)?;
    sc.expect_role(Role::Vector)?;
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisplayScale {
    /// `|v| / max|v|`.
    Linear,
    /// `20 log10(|v| / max|v|)` clamped below at `floor_db`.
    Decibel { floor_db: f64 },
}

/// Maps magnitudes to 16-bit gray levels.
pub fn gray_levels(mags: &[f64], scale: DisplayScale) -> Result<Vec<u16>> {
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if let DisplayScale::Decibel { floor_db } = scale {
        if !(floor_db < 0.0 && floor_db.is_finite()) {
            return Err(invalid(format!("dB floor must be negative, got {floor_db}")));
        }
    }
    if peak == 0.0 {
        return Ok(vec![0; mags.len()]);
    }
    Ok(mags
        .iter()
        .map(|&m| {
            let u = match scale {
                DisplayScale::Linear => m / peak,
                DisplayScale::Decibel { floor_db } => {
                    let db = if m > 0.0 { 20.0 * (m / peak).log10() } else { floor_db };
                    (db.max(floor_db) - floor_db) / -floor_db
                }
            };
            (u.clamp(0.0, 1.0) * 65535.0).round() as u16
        })
        .collect())
}

/// Binary PGM (P5), maxval 65535, big-endian samples.
pub fn write_pgm(path: &Path, mags: &[f64], rows: usize, cols: usize, scale: DisplayScale) -> Result<()> {
    if rows * cols != mags.len() {
        return Err(Error::DimensionMismatch {
            what: "pgm pixels",
            expected: rows * cols,
            actual: mags.len(),
        });
    }
    let levels = gray_levels(mags, scale)?;
    let mut out = BufWriter::new(fs::File::create(path)?);
    write!(out, "P5\n{cols} {rows}\n65535\n")?;
    for v in levels {
        out.write_all(&v.to_be_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads back a file written by [`write_pgm`].
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let bytes = fs::read(path)?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(invalid("truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "65535" {
        return Err(invalid("only 16-bit binary PGM is supported"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| invalid(format!("bad PGM size {s:?}")));
    let (cols, rows) = (parse(&fields[1])?, parse(&fields[2])?);
    let body = &bytes[pos.min(bytes.len())..];
    if body.len() != 2 * rows * cols {
        return Err(invalid("PGM body does not match its header"));
    }
    let levels = body.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    Ok((rows, cols, levels))
}

/// CSV with a header row; numbers use the shortest representation that
/// parses back to the same double.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::DimensionMismatch {
                what: "csv row",
                expected: header.len(),
                actual: row.len(),
            });
        }
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| invalid(format!("non-numeric CSV field {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
