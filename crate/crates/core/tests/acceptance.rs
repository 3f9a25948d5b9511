//! End-to-end acceptance checks. Each check prints one PASS/FAIL line.

use num_complex::Complex64;
use sarkit::forward::{aliased_coefficients, backproject_adjoint, project, simulate_phase_history, RangeProfile};
use sarkit::geometry::{AcquisitionGeometry, SceneSpec, SPEED_OF_LIGHT};
use sarkit::imaging::{
    backprojection, convolve_with_kernel, fourier_coefficients, grid_and_fft, matched_filter, partial_sum_1d,
    relative_l2, weighted_partial_sum_1d, Grid1d, GriddingConfig, Normalization,
};
use sarkit::kernels::{h_kernel, kernel2d_for, offset_kernel, WindowKind};
use sarkit::phasestats::{
    expected_coefficient_power, expected_partial_sum_power, monte_carlo_coefficient_power,
    monte_carlo_partial_sum_power, probe_indices,
};
use sarkit::rng::CounterRng;
use sarkit::scene::{point_scatterers, step_signal, ComplexImage, ComplexSignal};
use sarkit::solver::demo::{
    ramp_coefficients, sine_partial_fourier, RAMP_BETA, RAMP_ITERS, RAMP_LENGTH, RAMP_MAX_K, SINE_BETA,
};
use sarkit::solver::{
    admm_l1, difference_operator, lagrangian, lagrangian_gradient, optimality_residuals, shrink,
    subgradient_certificate, tikhonov_solve, Boundary, Dense, LinearOperator, SolverConfig, SolverState,
};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vec(seed: u64, stream: u64, n: usize) -> Vec<Complex64> {
    let rng = CounterRng::new(seed, stream);
    (0..n as u64)
        .map(|i| c(rng.uniform(2 * i) - 0.5, rng.uniform(2 * i + 1) - 0.5))
        .collect()
}

fn scaled_geometry() -> AcquisitionGeometry {
    AcquisitionGeometry::spotlight(
        1e10,
        6e8,
        128,
        30f64.to_radians(),
        50f64.to_radians(),
        3f64.to_radians(),
        32,
        SPEED_OF_LIGHT,
    )
    .unwrap()
}

fn three_points(scene: SceneSpec) -> ComplexImage {
    point_scatterers(
        scene,
        &[
            (0.0, 0.0, c(1.0, 0.0)),
            (0.3, -0.2, c(0.0, 1.0)),
            (-0.25, 0.35, c(-0.6, 0.8)),
        ],
    )
    .unwrap()
}

fn kernel_sums() -> Outcome {
    let start = Instant::now();
    let rng = CounterRng::new(SEED, 101);
    let mut worst: f64 = 0.0;
    // offset kernel: frequencies K_c - B/2 ..= K_c + B/2
    let (k_c, b) = (125i64, 50usize);
    for i in 0..100 {
        let x = 2.0 * PI * rng.uniform(i) - PI;
        let s: Complex64 = (k_c - 25..=k_c + 25).map(|k| Complex64::from_polar(1.0, k as f64 * x)).sum();
        worst = worst.max((offset_kernel(k_c as f64, b, x) - s).norm() / s.norm());
    }
    // H kernel: M equispaced wavenumbers centered at K_c
    let geom = scaled_geometry();
    let (kc, m, dk) = (geom.center_k(), geom.num_freqs(), geom.delta_k());
    let ks = geom.wavenumbers();
    for i in 0..100 {
        let x = 2.0 * rng.uniform(1000 + i) - 1.0;
        let s: Complex64 = ks.iter().map(|&k| Complex64::from_polar(1.0, k * x)).sum();
        worst = worst.max((h_kernel(kc, m, dk, x) - s).norm() / s.norm());
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-9 && t < Duration::from_secs(1),
        format!("max relative error {worst:.2e}, {:.3} s", t.as_secs_f64()),
    )
}

fn delta_kernel() -> Outcome {
    let start = Instant::now();
    let scene = SceneSpec::new(1.28, 128).unwrap();
    let g = scaled_geometry();
    let delta = point_scatterers(scene, &[(0.0, 0.0, c(1.0, 0.0))]).unwrap();
    let mf = matched_filter(&simulate_phase_history(&delta, &g, &scene).unwrap(), &scene).unwrap();
    let k = kernel2d_for(&g, &scene).unwrap();
    let e = relative_l2(mf.samples(), k.values());
    let t = start.elapsed();
    outcome(
        e < 1e-9 && t < Duration::from_secs(120),
        format!("relative error {e:.2e}, {:.2} s", t.as_secs_f64()),
    )
}

fn general_convolution() -> Outcome {
    let start = Instant::now();
    let scene = SceneSpec::new(0.64, 64).unwrap();
    let g = scaled_geometry();
    let k = kernel2d_for(&g, &scene.doubled()).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..3u64 {
        let f = ComplexImage::from_samples(scene, random_vec(seed, 102, 64 * 64)).unwrap();
        let mf = matched_filter(&simulate_phase_history(&f, &g, &scene).unwrap(), &scene).unwrap();
        let conv = convolve_with_kernel(&f, &k).unwrap();
        worst = worst.max(relative_l2(conv.samples(), mf.samples()));
    }
    let t = start.elapsed();
    outcome(
        worst < 5e-2 && t < Duration::from_secs(120),
        format!("max relative error {worst:.2e} over 3 scenes, {:.2} s", t.as_secs_f64()),
    )
}

fn smooth_field(scene: SceneSpec, seed: u64) -> ComplexImage {
    let r = scene.radius_m();
    let rng = CounterRng::new(seed, 103);
    let bumps: Vec<(f64, f64, f64, Complex64)> = (0..6)
        .map(|b| {
            let u = |i: u64| rng.uniform(8 * b + i);
            let rad = 0.45 * r * u(0).sqrt();
            let ang = 2.0 * PI * u(1);
            let width = r * (0.08 + 0.06 * u(2));
            (rad * ang.cos(), rad * ang.sin(), width, c(u(3) - 0.5, u(4) - 0.5))
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
    let (r, h, n) = (scene.radius_m(), scene.pixel_m(), scene.n_pixels());
    let rng = CounterRng::new(seed, 104);
    let values = (0..n)
        .map(|m| {
            let w = (m as f64 - (n / 2) as f64) * h;
            (0..4u64)
                .map(|b| {
                    let center = 0.5 * r * (2.0 * rng.uniform(4 * b) - 1.0);
                    let s = r * (0.05 + 0.1 * rng.uniform(4 * b + 1));
                    let a = c(rng.uniform(4 * b + 2) - 0.5, rng.uniform(4 * b + 3) - 0.5);
                    a * (-(w - center).powi(2) / (2.0 * s * s)).exp()
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

fn projection_adjoint() -> Outcome {
    let scene = SceneSpec::new(1.0, 256).unwrap();
    let h = scene.pixel_m();
    let mut worst: f64 = 0.0;
    for trial in 0..20u64 {
        let theta = CounterRng::new(SEED + trial, 105).phase(0);
        let f = smooth_field(scene, trial);
        let g = smooth_profile(scene, theta, 100 + trial);
        let lhs: Complex64 =
            project(&f, theta).values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * h;
        let bg = backproject_adjoint(&g, &scene).unwrap();
        let rhs: Complex64 =
            f.samples().iter().zip(bg.samples()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * (h * h);
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()));
    }
    outcome(worst < 1e-3, format!("max relative mismatch {worst:.2e} over 20 triples"))
}

fn aliasing() -> Outcome {
    let mut worst: f64 = 0.0;
    for (trial, n) in [16usize, 32, 64].into_iter().enumerate() {
        let rng = CounterRng::new(SEED + trial as u64, 106);
        let coeffs: BTreeMap<i64, Complex64> = (-80i64..=80)
            .map(|k| {
                let i = (k + 80) as u64;
                (k, c(rng.uniform(2 * i) - 0.5, rng.uniform(2 * i + 1) - 0.5))
            })
            .collect();
        // samples of sum_k f_k exp(i k x) on the n-point mesh of [-pi, pi); n even
        // so that exp(-i pi m n) = 1 for every alias m
        let samples: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = -PI + 2.0 * PI * j as f64 / n as f64;
                coeffs.iter().map(|(&k, &v)| v * Complex64::from_polar(1.0, k as f64 * x)).sum()
            })
            .collect();
        let dft = fourier_coefficients(&ComplexSignal::new(samples, -PI, 2.0 * PI).unwrap());
        let folded = aliased_coefficients(&coeffs, n).unwrap();
        let scale = folded.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (&k, &v) in &dft {
            let r = sarkit::fourier::wrap(k, n);
            worst = worst.max((v / n as f64 - folded[r]).norm() / scale);
        }
    }
    outcome(worst < 1e-12, format!("max relative error {worst:.2e}"))
}

fn coefficient_power() -> Outcome {
    let n = 128;
    let mags: Vec<f64> = (0..n).map(|j| 1.0 + 0.5 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
    let ks = [-60, -31, -7, 0, 3, 17, 40, 63];
    let est = monte_carlo_coefficient_power(&mags, &ks, 10_000, SEED).unwrap();
    let want = expected_coefficient_power(&mags);
    let z = (0..ks.len())
        .map(|i| (est.mean[i] - want).abs() / est.std_err[i])
        .fold(0.0, f64::max);
    outcome(z <= 3.0, format!("max deviation {z:.2} standard errors at 8 frequencies"))
}

fn partial_sum_theorem() -> Outcome {
    let start = Instant::now();
    let mags = step_signal(256).unwrap().magnitudes();
    let want = expected_partial_sum_power(&mags, 50).unwrap();
    let probes = probe_indices(256, 10);
    let mut z: f64 = 0.0;
    for k_c in [0i64, 125] {
        let est = monte_carlo_partial_sum_power(&mags, k_c - 25, k_c + 25, 10_000, SEED).unwrap();
        for &m in &probes {
            z = z.max((est.mean[m] - want[m]).abs() / est.std_err[m]);
        }
    }
    let t = start.elapsed();
    outcome(
        z <= 3.0 && t < Duration::from_secs(60),
        format!("max deviation {z:.2} standard errors, {:.2} s", t.as_secs_f64()),
    )
}

fn gibbs() -> Outcome {
    let step = step_signal(4096).unwrap();
    let coeffs = fourier_coefficients(&step);
    let grid = Grid1d::of(&step);
    let peak = |s: &ComplexSignal| s.samples.iter().map(|v| v.re).fold(f64::MIN, f64::max);
    let plain = peak(&partial_sum_1d(&coeffs, -25, 25, grid, Normalization::InverseN).unwrap());
    let fejer =
        peak(&weighted_partial_sum_1d(&coeffs, -25, 25, grid, Normalization::InverseN, WindowKind::Fejer).unwrap());
    outcome(
        (plain - 1.089).abs() <= 0.01 && fejer < 1.02,
        format!("unwindowed overshoot {plain:.4}, Fejer {fejer:.4}"),
    )
}

fn functional(z: Complex64, z0: Complex64, sigma: Complex64, beta: f64) -> f64 {
    0.5 * beta * (z - z0).norm_sqr() + z.norm() + (sigma.conj() * z).re
}

fn grid_minimizer(z0: Complex64, sigma: Complex64, beta: f64) -> Complex64 {
    let search = |center: Complex64, half: f64, step: f64| {
        let m = (half / step).round() as i64;
        let mut best = (f64::INFINITY, center);
        for i in -m..=m {
            for j in -m..=m {
                let z = center + c(i as f64 * step, j as f64 * step);
                let v = functional(z, z0, sigma, beta);
                if v < best.0 {
                    best = (v, z);
                }
            }
        }
        best.1
    };
    let radius = (z0 - sigma / beta).norm() + 0.1;
    let coarse = search(c(0.0, 0.0), radius, 0.02);
    search(coarse, 0.04, 1e-3)
}

fn shrinkage() -> Outcome {
    let rng = CounterRng::new(SEED, 107);
    let u = |i: u64| rng.uniform(i);
    let mut beaten = 0usize;
    let mut grid_err: f64 = 0.0;
    for inst in 0..100u64 {
        let base = 8 * inst;
        let z0 = c(6.0 * u(base) - 3.0, 6.0 * u(base + 1) - 3.0);
        let sigma = c(4.0 * u(base + 2) - 2.0, 4.0 * u(base + 3) - 2.0);
        let beta = 0.2 + 5.0 * u(base + 4);
        let z = shrink(z0 - sigma / beta, 1.0 / beta);
        let best = functional(z, z0, sigma, beta);
        let p = CounterRng::new(SEED + inst, 108);
        for k in 0..10_000u64 {
            let w = z + Complex64::from_polar(0.1 * p.uniform(2 * k).sqrt(), 2.0 * PI * p.uniform(2 * k + 1));
            if functional(w, z0, sigma, beta) < best - 1e-12 {
                beaten += 1;
            }
        }
        if inst < 10 {
            grid_err = grid_err.max((grid_minimizer(z0, sigma, beta) - z).norm());
        }
    }
    let tol = 1e-3 * 2f64.sqrt();
    outcome(
        beaten == 0 && grid_err <= tol,
        format!("{beaten} of 1e6 perturbations improved F; grid minimizer distance {grid_err:.2e} (resolution 1e-3)"),
    )
}

fn admm_sine() -> Outcome {
    let start = Instant::now();
    let p = sine_partial_fourier(7).unwrap();
    let mut cfg = SolverConfig::new(p.lambda);
    cfg.beta = SINE_BETA;
    cfg.max_iters = 2000;
    let init = SolverState::initial(p.a.apply_adjoint(&p.b), p.t.out_dim());
    let r0 = optimality_residuals(&p.a, &p.t, &p.b, &init, p.lambda, cfg.beta).unwrap();
    let s = admm_l1(&p.a, &p.t, &p.b, &cfg, None).unwrap();
    let r = optimality_residuals(&p.a, &p.t, &p.b, &s, p.lambda, cfg.beta).unwrap();
    let cert = subgradient_certificate(&p.a, &p.t, &p.b, &s.f, p.lambda, 1e-3).unwrap();
    let t = start.elapsed();
    let h = &s.objective_history;
    let down = h.windows(2).filter(|w| w[1] <= w[0]).count();
    let ratios = [r.r_f / r0.r_f, r.r_g / r0.r_g, r.r_c / r0.r_c];
    let pass = down as f64 >= 0.95 * (h.len() - 1) as f64
        && ratios.iter().all(|&q| q < 1e-3)
        && cert <= 1.05
        && t < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "decreasing {down}/{}, residual ratios r_f {:.1e} r_g {:.1e} r_c {:.1e}, certificate {cert:.4}, {:.2} s",
            h.len() - 1,
            ratios[0],
            ratios[1],
            ratios[2],
            t.as_secs_f64()
        ),
    )
}

fn tikhonov_dense() -> Outcome {
    use nalgebra::{DMatrix, DVector};
    let n = 32;
    let a = Dense::new(40, n, random_vec(SEED, 109, 40 * n)).unwrap();
    let d = difference_operator(n, 1, Boundary::Truncated).unwrap();
    let dd = Dense::from_operator(&d);
    let b = random_vec(SEED, 110, 40);
    let lambda = 0.5;
    let x = tikhonov_solve(&a, &b, lambda, &d, 1e-13, 500).unwrap();
    let am = DMatrix::from_row_slice(a.rows(), a.cols(), a.data());
    let dm = DMatrix::from_row_slice(dd.rows(), dd.cols(), dd.data());
    let lhs = am.adjoint() * &am + dm.adjoint() * &dm * c(lambda, 0.0);
    let want = lhs.lu().solve(&(am.adjoint() * DVector::from_column_slice(&b))).unwrap();
    let err = x.iter().zip(want.iter()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    outcome(err < 1e-6, format!("max deviation from dense solve {err:.2e}"))
}

fn gradient_check() -> Outcome {
    let (m, n) = (24, 16);
    let a = Dense::new(m, n, random_vec(SEED, 111, m * n)).unwrap();
    let t = difference_operator(n, 2, Boundary::Truncated).unwrap();
    let b = random_vec(SEED, 112, m);
    let f = random_vec(SEED, 113, n);
    let g = random_vec(SEED, 114, t.out_dim());
    let sigma = random_vec(SEED, 115, t.out_dim());
    let (lambda, beta) = (0.4, 3.0);
    let grad = lagrangian_gradient(&a, &t, &b, &f, &g, &sigma, beta);
    let mut worst: f64 = 0.0;
    for d in 0..8u64 {
        let v = random_vec(SEED + d, 116, n);
        let at = |s: f64| {
            let x: Vec<Complex64> = f.iter().zip(&v).map(|(p, q)| p + s * q).collect();
            lagrangian(&a, &t, &b, &x, &g, &sigma, lambda, beta)
        };
        let eps = 1e-5;
        let fd = (at(eps) - at(-eps)) / (2.0 * eps);
        let exact: f64 = grad.iter().zip(&v).map(|(p, q)| (p.conj() * q).re).sum();
        worst = worst.max((fd - exact).abs() / exact.abs());
    }
    outcome(worst < 1e-5, format!("max relative error {worst:.2e} over 8 directions"))
}

fn ramp_tv() -> Outcome {
    let n = RAMP_LENGTH;
    let p = ramp_coefficients(n, RAMP_MAX_K).unwrap();
    let mut cfg = SolverConfig::new(p.lambda);
    cfg.beta = RAMP_BETA;
    cfg.max_iters = RAMP_ITERS;
    let s = admm_l1(&p.a, &p.t, &p.b, &cfg, None).unwrap();
    let away = |j: &usize| (*j as i64 - n as i64 / 2).abs() > 5;
    let tv = (0..n).filter(away).map(|j| (s.f[j] - c(p.truth[j], 0.0)).norm()).fold(0.0, f64::max);
    // the partial sum is n A^H b for this Riemann-sum sampling
    let ps = p.a.apply_adjoint(&p.b);
    let plain = (0..n)
        .filter(away)
        .map(|j| (ps[j] * n as f64 - c(p.truth[j], 0.0)).norm())
        .fold(0.0, f64::max);
    outcome(
        tv < 0.02,
        format!("TV max deviation {tv:.4} outside 5 cells of the jump (partial sum {plain:.4})"),
    )
}

fn fast_paths() -> Outcome {
    let g = scaled_geometry();
    let scene = SceneSpec::new(1.28, 128).unwrap();
    let ph = simulate_phase_history(&three_points(scene), &g, &scene).unwrap();
    let mf = matched_filter(&ph, &scene).unwrap();
    let ebp = relative_l2(backprojection(&ph, &scene, 8).unwrap().samples(), mf.samples());
    let egr = relative_l2(grid_and_fft(&ph, &scene, GriddingConfig::default()).unwrap().samples(), mf.samples());

    let big = SceneSpec::new(2.56, 256).unwrap();
    let ph = simulate_phase_history(&three_points(big), &g, &big).unwrap();
    let t0 = Instant::now();
    let _ = matched_filter(&ph, &big).unwrap();
    let t_mf = t0.elapsed();
    let t1 = Instant::now();
    let _ = grid_and_fft(&ph, &big, GriddingConfig::default()).unwrap();
    let t_gr = t1.elapsed();
    let speedup = t_mf.as_secs_f64() / t_gr.as_secs_f64();
    outcome(
        ebp < 5e-2 && egr < 5e-2 && speedup >= 10.0,
        format!("backprojection {ebp:.2e}, gridding {egr:.2e}; gridding {speedup:.1}x faster at N=256"),
    )
}

type Check = fn() -> Outcome;

#[test]
fn acceptance() {
    let checks: [(&str, Check); 14] = [
        ("1 kernel sums", kernel_sums),
        ("2 delta scene matched filter", delta_kernel),
        ("3 general scene convolution", general_convolution),
        ("4 projection adjoint", projection_adjoint),
        ("5 aliasing identity", aliasing),
        ("6 coefficient power", coefficient_power),
        ("7 partial-sum power theorem", partial_sum_theorem),
        ("8 Gibbs constants", gibbs),
        ("9 shrinkage", shrinkage),
        ("10 ADMM on sine instance", admm_sine),
        ("11 Tikhonov", tikhonov_dense),
        ("12 gradient check", gradient_check),
        ("13 TV ramp", ramp_tv),
        ("14 fast paths", fast_paths),
    ];
    let mut failed = Vec::new();
    let stdout = std::io::stdout();
    for (name, check) in checks {
        let o = check();
        let line = format!("{} criterion {name}: {}\n", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        // written to the raw handle so the lines show up without --nocapture
        let mut lock = stdout.lock();
        lock.write_all(line.as_bytes()).unwrap();
        lock.flush().unwrap();
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
