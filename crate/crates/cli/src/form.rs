use crate::Globals;
use anyhow::{bail, Result};
use clap::ValueEnum;
use sarkit::geometry::SceneSpec;
use sarkit::imaging::{apply_window, backprojection, grid_and_fft, matched_filter, relative_l2, GriddingConfig};
use sarkit::io::{read_phase_history, write_image, write_pgm, DisplayScale, DEFAULT_DB_FLOOR};
use sarkit::kernels::WindowKind;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Direct matched filter.
    Mf,
    /// Filtered backprojection with upsampled range profiles.
    Bp,
    /// Gridding onto a Cartesian frequency grid followed by an FFT.
    Grid,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Range-profile upsampling factor (bp only, default 8).
    #[arg(long)]
    upsample: Option<usize>,
    /// Frequency-grid oversampling (grid only, default 2).
    #[arg(long)]
    oversample: Option<f64>,
    /// Spreading half-width in grid cells (grid only, default 3).
    #[arg(long)]
    half_width: Option<usize>,
    /// Taper across frequencies: rect, fejer, hann, hamming, gaussian[:alpha].
    #[arg(long)]
    window: Option<WindowKind>,
    /// Override the scene radius stored with the data.
    #[arg(long)]
    radius: Option<f64>,
    /// Override the pixel count stored with the data.
    #[arg(long)]
    pixels: Option<usize>,
    /// Also write a 16-bit PGM of the magnitude.
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Linear instead of dB display scaling.
    #[arg(long)]
    linear: bool,
    #[arg(long, default_value_t = DEFAULT_DB_FLOOR, allow_hyphen_values = true)]
    db_floor: f64,
    /// Report the relative error against the matched filter.
    #[arg(long)]
    compare: bool,
}

pub fn run(g: &Globals, a: Args) -> Result<()> {
    if a.upsample.is_some() && a.method != Method::Bp {
        bail!("--upsample only applies to --method bp");
    }
    if (a.oversample.is_some() || a.half_width.is_some()) && a.method != Method::Grid {
        bail!("--oversample and --half-width only apply to --method grid");
    }
    let out = g.out()?;
    let (mut ph, _) = read_phase_history(&a.input)?;
    let stored = *ph.scene();
    let scene = SceneSpec::new(
        a.radius.unwrap_or(stored.radius_m()),
        a.pixels.unwrap_or(stored.n_pixels()),
    )?;
    if let Some(kind) = a.window {
        ph = apply_window(&ph, kind)?;
    }
    let start = Instant::now();
    let image = match a.method {
        Method::Mf => matched_filter(&ph, &scene)?,
        Method::Bp => backprojection(&ph, &scene, a.upsample.unwrap_or(8))?,
        Method::Grid => {
            let defaults = GriddingConfig::default();
            let cfg = GriddingConfig {
                oversample: a.oversample.unwrap_or(defaults.oversample),
                half_width: a.half_width.unwrap_or(defaults.half_width),
            };
            grid_and_fft(&ph, &scene, cfg)?
        }
    };
    println!("formed {}x{} image in {:.3} s", scene.n_pixels(), scene.n_pixels(), start.elapsed().as_secs_f64());
    if a.compare && a.method != Method::Mf {
        let reference = matched_filter(&ph, &scene)?;
        println!(
            "relative l2 error vs matched filter: {:.6e}",
            relative_l2(image.samples(), reference.samples())
        );
    }
    write_image(out, &image)?;
    if let Some(pgm) = &a.pgm {
        let scale = if a.linear {
            DisplayScale::Linear
        } else {
            DisplayScale::Decibel { floor_db: a.db_floor }
        };
        write_pgm(pgm, &image.magnitudes(), scene.n_pixels(), scene.n_pixels(), scale)?;
    }
    Ok(())
}
