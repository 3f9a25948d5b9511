use crate::{geometry_config, Globals};
use anyhow::{Context, Result};
use sarkit::geometry::SceneSpec;
use sarkit::io::{write_csv, write_image, write_pgm, DisplayScale, DEFAULT_DB_FLOOR};
use sarkit::kernels::kernel2d_for;
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    geometry: PathBuf,
    /// Scene half-width R in meters.
    #[arg(long)]
    radius: f64,
    #[arg(long)]
    pixels: usize,
    /// Also write a 16-bit PGM of the magnitude.
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Linear instead of dB display scaling.
    #[arg(long)]
    linear: bool,
    #[arg(long, default_value_t = DEFAULT_DB_FLOOR, allow_hyphen_values = true)]
    db_floor: f64,
    /// CSV of the cut through the origin along x (columns x, re, im, abs).
    #[arg(long)]
    trace: Option<PathBuf>,
}

pub fn run(g: &Globals, a: Args) -> Result<()> {
    let out = g.out()?;
    let geom = geometry_config::load(&a.geometry)?;
    let scene = SceneSpec::new(a.radius, a.pixels)?;
    let image = kernel2d_for(&geom, &scene)?.into_image().context("kernel field has no image")?;

    let (peak_idx, peak) = image
        .samples()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .context("empty kernel")?;
    let n = scene.n_pixels();
    let half = (n / 2) as i64;
    let (r, c) = (peak_idx / n, peak_idx % n);
    println!(
        "peak {:.6} at ({:.4}, {:.4}) m",
        peak.norm(),
        (r as i64 - half) as f64 * scene.pixel_m(),
        (c as i64 - half) as f64 * scene.pixel_m()
    );

    if let Some(path) = &a.trace {
        let rows = (-half..n as i64 - half).map(|j1| {
            let v = image.get(j1, 0);
            vec![j1 as f64 * scene.pixel_m(), v.re, v.im, v.norm()]
        });
        write_csv(path, &["x", "re", "im", "abs"], rows)?;
    }
    if let Some(pgm) = &a.pgm {
        let scale = if a.linear {
            DisplayScale::Linear
        } else {
            DisplayScale::Decibel { floor_db: a.db_floor }
        };
        write_pgm(pgm, &image.magnitudes(), n, n, scale)?;
    }
    write_image(out, &image)?;
    Ok(())
}
