use crate::{geometry_config, Globals};
use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use num_complex::Complex64;
use sarkit::forward::{add_noise, analytic_ramp_coefficients, simulate_phase_history, RAMP_MEAN};
use sarkit::geometry::SceneSpec;
use sarkit::io::{write_fourier, write_phase_history, FourierData};
use sarkit::scene::{apply_random_phases, point_scatterers, shepp_logan_magnitude, ComplexImage};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// Unit scatterer at the origin.
    Delta,
    /// Scatterers given by --point.
    Points,
    SheppLogan,
    /// Exact Fourier coefficients of the 1-D ramp (no geometry needed).
    Ramp,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long, value_enum)]
    target: Target,
    /// Geometry JSON: explicit frequencies and azimuths, or a spotlight summary.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// Scene half-width R in meters.
    #[arg(long)]
    radius: Option<f64>,
    /// Pixels per side.
    #[arg(long)]
    pixels: Option<usize>,
    /// Scatterer `x,y,re,im` in meters; repeatable.
    #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
    points: Vec<(f64, f64, Complex64)>,
    /// Multiply every pixel by an independent uniform random phase.
    #[arg(long)]
    random_phases: bool,
    /// Standard deviation of each real component of the additive noise.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Largest |k| kept for the ramp.
    #[arg(long, default_value_t = 75)]
    max_k: i64,
    /// Sample grid length the ramp coefficients are paired with.
    #[arg(long, default_value_t = 512)]
    grid_len: usize,
}

fn parse_point(s: &str) -> std::result::Result<(f64, f64, Complex64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in point {s:?}")))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [x, y, re, im] => Ok((*x, *y, Complex64::new(*re, *im))),
        _ => Err(format!("point {s:?} must be x,y,re,im")),
    }
}

pub fn run(g: &Globals, a: Args) -> Result<()> {
    let out = g.out()?;
    if a.target == Target::Ramp {
        return ramp(out, &a);
    }
    let geom_path = a.geometry.as_ref().context("--geometry is required")?;
    let geom = geometry_config::load(geom_path)?;
    let radius = a.radius.context("--radius is required")?;
    let pixels = a.pixels.context("--pixels is required")?;
    let scene = SceneSpec::new(radius, pixels)?;

    let limits = geom.alias_limits();
    match limits.crossrange {
        Some(cr) => println!("alias-free radius: range {:.4} m, cross-range {:.4} m", limits.range, cr),
        None => println!("alias-free radius: range {:.4} m", limits.range),
    }
    for w in limits.warnings_for(&scene) {
        eprintln!("warning: {w}");
    }

    if !a.points.is_empty() && a.target != Target::Points {
        bail!("--point is only used with --target points");
    }
    let mut image: ComplexImage = match a.target {
        Target::Delta => point_scatterers(scene, &[(0.0, 0.0, Complex64::new(1.0, 0.0))])?,
        Target::Points => {
            if a.points.is_empty() {
                bail!("--target points needs at least one --point");
            }
            point_scatterers(scene, &a.points)?
        }
        Target::SheppLogan => shepp_logan_magnitude(pixels)?.with_scene(scene)?,
        Target::Ramp => unreachable!(),
    };
    if a.random_phases {
        image = apply_random_phases(&image, g.seed("for --random-phases")?);
    }
    let mut ph = simulate_phase_history(&image, &geom, &scene)?;
    if a.noise_sigma != 0.0 {
        ph = add_noise(&ph, a.noise_sigma, g.seed("for --noise-sigma")?)?;
    }
    write_phase_history(out, &ph, Some(&geom))?;
    println!(
        "wrote {} samples ({} frequencies x {} angles) to {}",
        ph.samples().len(),
        ph.num_freqs(),
        ph.num_angles(),
        out.display()
    );
    Ok(())
}

fn ramp(out: &std::path::Path, a: &Args) -> Result<()> {
    if a.max_k < 0 || a.grid_len < 2 {
        bail!("--max-k must be >= 0 and --grid-len >= 2");
    }
    if 2 * a.max_k as usize + 1 > a.grid_len {
        bail!("--grid-len {} cannot resolve |k| <= {}", a.grid_len, a.max_k);
    }
    let ks: Vec<i64> = (-a.max_k..=a.max_k).collect();
    let values = ks
        .iter()
        .map(|&k| {
            if k == 0 {
                Ok(Complex64::new(RAMP_MEAN, 0.0))
            } else {
                analytic_ramp_coefficients(k)
            }
        })
        .collect::<sarkit::Result<Vec<_>>>()?;
    let data = FourierData {
        ks,
        values,
        grid_len: a.grid_len,
        origin: -0.5,
        period: 1.0,
    };
    write_fourier(out, &data)?;
    println!("wrote {} ramp coefficients to {}", data.values.len(), out.display());
    Ok(())
}
