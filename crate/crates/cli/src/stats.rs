use crate::Globals;
use anyhow::{bail, Result};
use clap::ValueEnum;
use sarkit::io::write_csv;
use sarkit::phasestats::{
    correlated_phase_power, expected_partial_sum_power, monte_carlo_partial_sum_power, probe_indices, CorrelatedConfig,
};
use sarkit::scene::{ramp_signal, step_signal, ComplexSignal};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalKind {
    /// Unit step on [-pi, pi).
    Step,
    /// Periodic sawtooth.
    Ramp,
    /// Raised cosine 1 + cos(x)/2, nowhere zero.
    Smooth,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Signal length N.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Bandwidth B; the band is K_c - B/2 ..= K_c + B/2.
    #[arg(long, default_value_t = 50)]
    band: usize,
    /// Band centers; repeatable.
    #[arg(long = "kc", default_values_t = [0i64, 125], allow_hyphen_values = true)]
    kc: Vec<i64>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Number of evenly spaced sample indices reported.
    #[arg(long, default_value_t = 10)]
    probes: usize,
    #[arg(long, value_enum, default_value_t = SignalKind::Step)]
    signal: SignalKind,
    /// Phases constant on blocks of this many samples instead of independent.
    /// The prediction is a local approximation and degrades where the
    /// magnitude vanishes (the step's zero half, for instance).
    #[arg(long)]
    correlated_delta: Option<f64>,
}

pub fn run(g: &Globals, a: Args) -> Result<()> {
    let out = g.out()?;
    let seed = g.seed("for the Monte Carlo trials")?;
    if !a.band.is_multiple_of(2) {
        bail!("--band must be even");
    }
    if a.probes == 0 || a.probes > a.n {
        bail!("--probes must be between 1 and --n");
    }
    let signal = match a.signal {
        SignalKind::Step => step_signal(a.n)?,
        SignalKind::Ramp => ramp_signal(a.n)?,
        SignalKind::Smooth => ComplexSignal::from_real(
            &(0..a.n).map(|j| 1.0 + 0.5 * (-PI + 2.0 * PI * j as f64 / a.n as f64).cos()).collect::<Vec<_>>(),
        )?,
    };
    let mags = signal.magnitudes();
    let probes = probe_indices(a.n, a.probes);
    let half = (a.band / 2) as i64;

    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &kc in &a.kc {
        let (analytic, mc) = match a.correlated_delta {
            Some(pixels) => {
                let delta = pixels * 2.0 * PI / a.n as f64;
                let r = correlated_phase_power(&mags, delta, kc, a.band, a.trials, seed, CorrelatedConfig::default())?;
                (r.analytic, r.empirical)
            }
            None => (
                expected_partial_sum_power(&mags, a.band)?,
                monte_carlo_partial_sum_power(&mags, kc - half, kc + half, a.trials, seed)?,
            ),
        };
        for &m in &probes {
            let se = mc.std_err[m];
            let z = if se > 0.0 { (mc.mean[m] - analytic[m]) / se } else { 0.0 };
            worst = worst.max(z.abs());
            let x = -PI + m as f64 * 2.0 * PI / a.n as f64;
            rows.push(vec![kc as f64, m as f64, x, analytic[m], mc.mean[m], se, z]);
        }
    }
    write_csv(out, &["k_c", "m", "x", "analytic", "empirical", "std_err", "z"], rows)?;
    println!("{} probes per band, largest |z| = {worst:.3}", probes.len());
    Ok(())
}
