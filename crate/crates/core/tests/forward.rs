use num_complex::Complex64;
use sarkit::forward::{backproject_adjoint, project, simulate_phase_history, RangeProfile};
use sarkit::geometry::{AcquisitionGeometry, SceneSpec, SPEED_OF_LIGHT};
use sarkit::rng::CounterRng;
use sarkit::scene::ComplexImage;

/// Sum of a few random complex Gaussian bumps kept well inside the disk.
fn smooth_field(scene: SceneSpec, seed: u64) -> ComplexImage {
    let r = scene.radius_m();
    let rng = CounterRng::new(seed, 11);
    let bumps: Vec<(f64, f64, f64, Complex64)> = (0..6)
        .map(|b| {
            let u = |i: u64| rng.uniform(8 * b + i);
            let rad = 0.45 * r * u(0).sqrt();
            let ang = 2.0 * std::f64::consts::PI * u(1);
            let width = r * (0.08 + 0.06 * u(2));
            let amp = Complex64::new(u(3) - 0.5, u(4) - 0.5);
            (rad * ang.cos(), rad * ang.sin(), width, amp)
        })
        .collect();
    ComplexImage::from_fn(scene, |x, y| {
        bumps
            .iter()
            .map(|&(cx, cy, w, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp())
            .sum()
    })
}

fn smooth_profile(scene: SceneSpec, theta: f64, seed: u64) -> RangeProfile {
    let r = scene.radius_m();
    let h = scene.pixel_m();
    let rng = CounterRng::new(seed, 12);
    let n = scene.n_pixels();
    let values = (0..n)
        .map(|m| {
            let w = (m as f64 - (n / 2) as f64) * h;
            (0..4u64)
                .map(|b| {
                    let c = 0.5 * r * (2.0 * rng.uniform(4 * b) - 1.0);
                    let s = r * (0.05 + 0.1 * rng.uniform(4 * b + 1));
                    let a = Complex64::new(rng.uniform(4 * b + 2) - 0.5, rng.uniform(4 * b + 3) - 0.5);
                    a * (-(w - c).powi(2) / (2.0 * s * s)).exp()
                })
                .sum()
        })
        .collect();
    RangeProfile {
        values,
        theta_rad: theta,
        pixel_m: h,
    }
}

#[test]
fn projection_adjoint_identity() {
    let scene = SceneSpec::new(1.0, 256).unwrap();
    let h = scene.pixel_m();
    for trial in 0..20u64 {
        let theta = CounterRng::new(trial, 13).phase(0);
        let f = smooth_field(scene, trial);
        let g = smooth_profile(scene, theta, 100 + trial);
        let pf = project(&f, theta);
        let bg = backproject_adjoint(&g, &scene).unwrap();
        let lhs: Complex64 = pf.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * h;
        let rhs: Complex64 =
            f.samples().iter().zip(bg.samples()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * (h * h);
        let rel = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
        assert!(rel < 1e-3, "trial {trial}: relative mismatch {rel:.3e}");
    }
}

// Bilinear sampling attenuates a frequency by roughly 1 - 0.09 (hk)^2, so the
// band is kept below hk = 0.1 where that stays under the tolerance.
#[test]
fn projection_slice_theorem() {
    let scene = SceneSpec::new(1.0, 256).unwrap();
    let h = scene.pixel_m();
    let geom = AcquisitionGeometry::new(
        (0..16).map(|j| 0.1e9 + j as f64 * 1.0e7).collect(),
        0.0,
        vec![-1.1, 0.2, 0.9, 2.4],
        SPEED_OF_LIGHT,
    )
    .unwrap();
    let f = smooth_field(scene, 7);
    let ph = simulate_phase_history(&f, &geom, &scene).unwrap();
    let ks = geom.wavenumbers();
    for (i, &theta) in geom.azimuths_rad().iter().enumerate() {
        let p = project(&f, theta);
        for (j, &k) in ks.iter().enumerate() {
            let dft: Complex64 = p
                .values
                .iter()
                .enumerate()
                .map(|(m, v)| v / h * Complex64::from_polar(1.0, -k * p.w(m)))
                .sum();
            let want = ph.get(j, i);
            let rel = (dft - want).norm() / want.norm();
            assert!(rel < 1e-3, "theta {theta}, k {k}: relative error {rel:.3e}");
        }
    }
}
