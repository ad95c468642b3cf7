//! One line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use chaodecay::ensemble::{
    estimate_lyapunov, fit_escape_rate, hybrid_grid, pair_decoherence_curve, position_variance, sample_ensemble,
    survival_curve, EnsembleSpec,
};
use chaodecay::formulas::{
    bare_quantum_correction, correction_peak, loop_correction, loop_correction_ehrenfest,
    loop_correction_short_time, Regime, SemiclassicalParams,
};
use chaodecay::geometry::{next_collision, CavityGeometry, Shape};
use chaodecay::io::{parse_config, run, RunConfig};
use chaodecay::quadrature::{convergence_study, QuadratureSpec};

/// Tolerances, pinned.
const C1_RATE_TOL: f64 = 0.05;
const C1_HALVING_TOL: f64 = 0.07;
const C1_N: usize = 100_000;
const C2_STRICT: f64 = 1e-12;
const C3_TOL: f64 = 1e-5;
const C4_SLOPE: f64 = 4.0;
const C4_SLOPE_TOL: f64 = 0.1;
const C5_TOL: f64 = 1e-14;
const C6_TOL: f64 = 1e-5;
const C7_DECREASING_MIN: f64 = 0.8;
const C7_FINAL_MAX: f64 = 0.10;
const C8_N_PAIRS: usize = 200;
const C8_TOL: f64 = 0.10;
const C10_SIGMAS: f64 = 3.0;
const C10_CHORD_TOL: f64 = 1e-12;

/// Figure setting: `tau_D / T_H = 0.3`, times in units of `T_H` on `[0, 1]`,
/// the default grid of the `fig3` command.
const FIG3_TAU_D: f64 = 0.3;
const FIG3_RATIOS: [f64; 5] = [0.05, 0.1, 0.3, 1.0, f64::INFINITY];

fn fig3_grid() -> Vec<f64> {
    (0..=1000).map(|k| k as f64 / 1000.0).collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1_classical_decay() -> Outcome {
    let speed = 1.0;
    let probe = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
    let lambda = estimate_lyapunov(&probe, &EnsembleSpec::new(200, 17, speed), 500.0 * probe.mean_free_path())
        .unwrap()
        .lambda;
    let mut rates = Vec::new();
    let mut notes = Vec::new();
    let mut pass = true;
    for l in [0.125, 0.0625] {
        let g = CavityGeometry::with_default_opening(Shape::Cardioid, 1.0, l).unwrap();
        let tau_d = PI * g.area() / (l * speed);
        let t_fit = (2.0 / lambda, 4.0 * tau_d);
        let times = hybrid_grid(t_fit.0, 5.0 * tau_d, 40, 400).unwrap();
        let curve = survival_curve(&g, &EnsembleSpec::new(C1_N, 2024, speed), &times).unwrap();
        let fit = fit_escape_rate(&curve, t_fit).unwrap();
        let dev = fit.rate * tau_d - 1.0;
        pass &= dev.abs() <= C1_RATE_TOL && lambda * tau_d >= 10.0;
        notes.push(format!("l={l}: lambda tau_D={:.1}, rate dev {:+.2}%", lambda * tau_d, 100.0 * dev));
        rates.push(fit.rate);
    }
    let halving = rates[1] / rates[0] / 0.5 - 1.0;
    pass &= halving.abs() <= C1_HALVING_TOL;
    notes.push(format!("halving dev {:+.2}% (tol {:.0}%)", 100.0 * halving, 100.0 * C1_HALVING_TOL));
    outcome(pass, notes.join("; "))
}

fn c2_fig3() -> Outcome {
    let times = fig3_grid();
    let curves: Vec<Vec<f64>> = FIG3_RATIOS
        .iter()
        .map(|&r| {
            let p = SemiclassicalParams::from_times(FIG3_TAU_D, 1.0, r);
            times.iter().map(|&t| loop_correction(&p, t)).collect()
        })
        .collect();
    let reference = curves.last().unwrap();
    let mut below = true;
    let mut one_max = true;
    for c in &curves[..curves.len() - 1] {
        for i in 1..times.len() {
            below &= c[i] < reference[i] - C2_STRICT * reference[i];
        }
    }
    for c in &curves {
        let maxima = (1..c.len() - 1).filter(|&i| c[i] > c[i - 1] && c[i] >= c[i + 1]).count();
        let (imax, _) = c.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        one_max &= maxima == 1 && imax > 0 && imax < c.len() - 1;
    }
    let peaks: Vec<f64> = FIG3_RATIOS
        .iter()
        .map(|&r| correction_peak(&SemiclassicalParams::from_times(FIG3_TAU_D, 1.0, r), Regime::Plain).unwrap().value)
        .collect();
    let increasing = peaks.windows(2).all(|w| w[1] > w[0] * (1.0 + C2_STRICT));
    outcome(
        below && one_max && increasing,
        format!(
            "below reference: {below}; single interior maximum: {one_max}; peaks {:.5?} increasing: {increasing}",
            peaks
        ),
    )
}

fn c3_vanishing_coupling() -> Outcome {
    let p = SemiclassicalParams::from_times(FIG3_TAU_D, 1.0, 1e6);
    let worst = (1..=1000)
        .map(|k| {
            let t = 5.0 * k as f64 / 1000.0;
            let bare = bare_quantum_correction(p.tau_dwell, p.tau_heisenberg, t);
            ((loop_correction(&p, t) - bare) / bare).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= C3_TOL, format!("max relative gap {worst:.3e} (tol {C3_TOL:e})"))
}

fn c4_short_time() -> Outcome {
    let p = SemiclassicalParams::from_times(FIG3_TAU_D, 1.0, 0.1);
    let tmin = p.tau_dwell.min(p.tau_d());
    let pts: Vec<(f64, f64)> = (0..=40)
        .map(|k| {
            let t = tmin * 10f64.powf(-4.0 + 2.0 * k as f64 / 40.0);
            let d = (loop_correction(&p, t) - loop_correction_short_time(&p, t, 3).unwrap()).abs();
            (t.ln(), d.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    outcome((slope - C4_SLOPE).abs() <= C4_SLOPE_TOL, format!("log-log slope {slope:.4} (want {C4_SLOPE} +- {C4_SLOPE_TOL})"))
}

fn c5_ehrenfest_reduction() -> Outcome {
    let p = SemiclassicalParams::from_times(FIG3_TAU_D, 1.0, 0.1);
    let worst = (1..=1000)
        .map(|k| {
            let t = 5.0 * p.tau_dwell * k as f64 / 1000.0;
            let plain = loop_correction(&p, t);
            ((loop_correction_ehrenfest(&p, t).unwrap() - plain) / plain).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= C5_TOL, format!("max relative difference {worst:.3e} (tol {C5_TOL:e})"))
}

fn c6_closed_cavity() -> Outcome {
    let open = SemiclassicalParams::from_times(FIG3_TAU_D, 1.0, f64::INFINITY);
    let closed = SemiclassicalParams::from_times(1e6, 1.0, f64::INFINITY);
    let peak = correction_peak(&open, Regime::Plain).unwrap().value;
    let worst = fig3_grid().iter().map(|&t| loop_correction(&closed, t)).fold(0.0, f64::max);
    outcome(worst <= C6_TOL * peak, format!("max closed bracket / open peak = {:.3e} (tol {C6_TOL:e})", worst / peak))
}

fn c7_quadrature() -> Outcome {
    let sequence: Vec<SemiclassicalParams> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&x: &f64| {
            let mut p = SemiclassicalParams::from_times(1.0, 1.0, f64::INFINITY);
            p.lambda = x;
            p.c2 = (0.05 * x).exp();
            p.alpha = 0.1;
            p
        })
        .collect();
    let te_ok = sequence.iter().all(|p| p.t_ehrenfest().unwrap() / p.tau_dwell <= 0.05 + 1e-15);
    let t_grid = [2.5, 3.0, 3.5, 4.0, 4.5, 5.0];
    let table = convergence_study(&sequence, &t_grid, &QuadratureSpec::default()).unwrap();
    let frac = table.fraction_decreasing();
    let fin = table.final_max_deviation();
    let imag = table.imaginary_parts_within_error();
    outcome(
        te_ok && frac >= C7_DECREASING_MIN && fin < C7_FINAL_MAX && imag,
        format!("decreasing at {:.0}% of points, final max deviation {:.2}%, imaginary parts within error: {imag}", 100.0 * frac, 100.0 * fin),
    )
}

fn c8_decoherence_slope() -> Outcome {
    let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
    let sigma2 = position_variance(&g, &EnsembleSpec::new(100_000, 31, 1.0)).unwrap().sigma2_area;
    let alpha = 1.0;
    let t = 50.0 * g.mean_free_path();
    let dt = g.mean_free_path() / 16.0;
    let curve = pair_decoherence_curve(&g, &EnsembleSpec::new(C8_N_PAIRS, 77, 1.0), alpha, dt, &[t]).unwrap();
    let ratio = curve[0].exponent / (alpha * t) / (2.0 * sigma2);
    outcome((ratio - 1.0).abs() <= C8_TOL, format!("exponent / (alpha t 2 sigma^2) = {ratio:.4} (tol {C8_TOL})"))
}

fn stochastic_configs() -> Vec<RunConfig> {
    [
        r#"{"command":"simulate","geometry":{"shape":"cardioid","opening_length":0.5},"ensemble":{"seed":9,"n_samples":3000,"dump_trajectory":true}}"#,
        r#"{"command":"lyapunov","geometry":{"shape":"stadium","half_length":1.0},"ensemble":{"seed":9,"n_samples":64,"t_obs_collisions":100}}"#,
        r#"{"command":"variance","geometry":{"shape":"cardioid"},"ensemble":{"seed":9,"n_samples":5000}}"#,
        r#"{"command":"pair-decoherence","geometry":{"shape":"cardioid"},"ensemble":{"seed":9,"n_samples":64},"params":{"alpha":0.5}}"#,
    ]
    .iter()
    .map(|s| parse_config(s).unwrap())
    .collect()
}

fn c9_determinism() -> Outcome {
    let mut pass = true;
    let mut checked = 0;
    for config in stochastic_configs() {
        let mut outputs = Vec::new();
        for threads in [1, 8, 1, 8] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            outputs.push(pool.install(|| run(&config, None)).unwrap().files);
        }
        pass &= outputs.windows(2).all(|w| w[0] == w[1]);
        checked += outputs[0].len();
    }
    outcome(pass, format!("{checked} CSV files from 4 commands byte-identical across two runs at 1 and 8 threads: {pass}"))
}

fn c10_circle_controls() -> Outcome {
    let g = CavityGeometry::closed(Shape::Circle, 1.0).unwrap();
    let est = estimate_lyapunov(&g, &EnsembleSpec::new(200, 5, 1.0), 1000.0 * g.mean_free_path()).unwrap();
    let lyap_ok = est.lambda.abs() <= C10_SIGMAS * est.std_error;
    let states = sample_ensemble(&g, &EnsembleSpec::new(1000, 6, 1.0)).unwrap();
    let worst = states
        .iter()
        .map(|s| {
            let b = s.position.dot(s.momentum);
            let c = s.position.norm_sq() - 1.0;
            let chord = -b + (b * b - c).sqrt();
            (next_collision(&g, s).unwrap().0 - chord).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        lyap_ok && worst <= C10_CHORD_TOL,
        format!("lambda = {:.2e} +- {:.2e}; max chord error {worst:.2e} (tol {C10_CHORD_TOL:e})", est.lambda, est.std_error),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 10] = [
        ("C1 classical decay law", c1_classical_decay),
        ("C2 decoherence curves", c2_fig3),
        ("C3 vanishing coupling", c3_vanishing_coupling),
        ("C4 short-time expansion", c4_short_time),
        ("C5 Ehrenfest reduction", c5_ehrenfest_reduction),
        ("C6 closed-cavity cancellation", c6_closed_cavity),
        ("C7 quadrature convergence", c7_quadrature),
        ("C8 decoherence ergodic slope", c8_decoherence_slope),
        ("C9 determinism", c9_determinism),
        ("C10 circle controls", c10_circle_controls),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
