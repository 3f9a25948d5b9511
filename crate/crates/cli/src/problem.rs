use anyhow::{Context, Result};
use clap::ValueEnum;
use num_complex::Complex64;
use sarkit::geometry::SceneSpec;
use sarkit::imaging::{grid_and_fft, GriddingConfig};
use sarkit::io::{
    read_fourier, read_phase_history, read_sidecar, write_image, write_signal, Role,
};
use sarkit::scene::{ComplexImage, ComplexSignal};
use sarkit::solver::{
    compose, difference_operator, fourier_samples, gradient_2d, phase_diag, sar_operator, Boundary, Identity,
    LinearOperator,
};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reg {
    /// Quadratic penalty on differences, solved by conjugate gradients.
    Tikhonov,
    /// Total variation.
    Tv,
    /// Sparsity of the values themselves.
    L1,
    /// Total variation of the phase-corrected image.
    Ptv,
}

/// What the unknown is, so the solution can be written back.
pub enum Unknown {
    Image(SceneSpec),
    Signal { origin: f64, period: f64 },
}

pub struct Problem {
    pub a: Box<dyn LinearOperator>,
    pub b: Vec<Complex64>,
    pub unknown: Unknown,
    /// Preliminary reconstruction whose phases define the ptv correction.
    pub f0: Vec<Complex64>,
}

pub fn load(path: &Path) -> Result<Problem> {
    let sidecar = read_sidecar(path).with_context(|| format!("reading {}", path.display()))?;
    match sidecar.role {
        Role::PhaseHistory => {
            let (ph, geom) = read_phase_history(path)?;
            let geom = geom.context("phase-history file carries no geometry; re-simulate with this tool")?;
            let scene = *ph.scene();
            let f0 = grid_and_fft(&ph, &scene, GriddingConfig::default())?.into_samples();
            Ok(Problem {
                a: Box::new(sar_operator(geom, scene)),
                b: ph.into_samples(),
                unknown: Unknown::Image(scene),
                f0,
            })
        }
        Role::Fourier1d => {
            let data = read_fourier(path)?;
            let a = fourier_samples(data.grid_len, data.ks, data.origin, data.period)?;
            let f0 = a.apply_adjoint(&data.values);
            Ok(Problem {
                a: Box::new(a),
                b: data.values,
                unknown: Unknown::Signal {
                    origin: data.origin,
                    period: data.period,
                },
                f0,
            })
        }
        other => anyhow::bail!("{} holds {other:?} data; expected a phase history or Fourier coefficients", path.display()),
    }
}

impl Problem {
    pub fn n(&self) -> usize {
        self.a.in_dim()
    }

    /// The difference operator used by tikhonov and tv.
    pub fn differences(&self) -> Result<Box<dyn LinearOperator>> {
        Ok(match self.unknown {
            Unknown::Image(scene) => Box::new(gradient_2d(scene.n_pixels(), Boundary::Truncated)?),
            Unknown::Signal { .. } => Box::new(difference_operator(self.n(), 1, Boundary::Circulant)?),
        })
    }

    pub fn regularizer(&self, reg: Reg) -> Result<Box<dyn LinearOperator>> {
        Ok(match reg {
            Reg::Tikhonov | Reg::Tv => self.differences()?,
            Reg::L1 => Box::new(Identity(self.n())),
            Reg::Ptv => Box::new(compose(self.differences()?, Box::new(phase_diag(&self.f0)))?),
        })
    }

    pub fn write_solution(&self, path: &Path, f: Vec<Complex64>) -> Result<()> {
        match self.unknown {
            Unknown::Image(scene) => write_image(path, &ComplexImage::from_samples(scene, f)?)?,
            Unknown::Signal { origin, period } => write_signal(path, &ComplexSignal::new(f, origin, period)?)?,
        }
        Ok(())
    }
}

/// Companion file `<path>.<suffix>`.
pub fn companion(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    s.into()
}
