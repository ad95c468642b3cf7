use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::json;

use super::config::{parse_config, Command, EnsembleConfig, GridConfig, RunConfig};
use super::csv::{format_number, write_atomic, Table};
use super::manifest::{defaults_value, derive, Manifest, WallClock};
use super::resolve::{resolve_params, DEFAULTS};
use crate::ensemble::{
    estimate_lyapunov, fit_escape_rate, hybrid_grid, pair_decoherence_curve, position_variance,
    sample_one, survival_curve, EnsembleSpec, SurvivalCurve,
};
use crate::error::{Error, Result};
use crate::formulas::{
    alpha_from_bath, bare_quantum_correction, classical_survival, correction_curve, correction_peak,
    dwell_time, figure3_curves, SemiclassicalParams,
};
use crate::geometry::{propagate, CavityGeometry, EventKind};
use crate::quadrature::convergence_study;

/// Data files of one command, rendered but not yet written.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub manifest: Manifest,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every data file and then `manifest.json`, each atomically.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for (name, bytes) in &self.files {
            write_atomic(&dir.join(name), bytes)?;
        }
        let manifest = serde_json::to_vec_pretty(&self.manifest).expect("manifest serializes");
        write_atomic(&dir.join("manifest.json"), &manifest)
    }
}

struct Collected {
    files: Vec<(String, Vec<u8>)>,
    results: serde_json::Value,
    warnings: Vec<String>,
}

fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect()
}

fn grid_times(grid: &GridConfig, start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if let Some(t) = &grid.times {
        if t.is_empty() || t.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::validation("grid.times", "must be non-empty, finite and non-negative"));
        }
        return Ok(t.clone());
    }
    let (start, stop, n) = (grid.start.unwrap_or(start), grid.stop.unwrap_or(stop), grid.n.unwrap_or(n));
    if !(start >= 0.0 && stop > start && n >= 2) {
        return Err(Error::validation("grid", "need 0 <= start < stop and n >= 2"));
    }
    Ok(linspace(start, stop, n))
}

fn ensemble_spec(config: &RunConfig) -> Result<EnsembleSpec> {
    let e = config.ensemble.as_ref().ok_or_else(|| Error::validation("ensemble.seed", "missing"))?;
    let seed = e.seed.ok_or_else(|| Error::validation("ensemble.seed", "missing"))?;
    let spec = EnsembleSpec::new(e.n_samples.unwrap_or(DEFAULTS.n_samples), seed, e.speed.unwrap_or(DEFAULTS.speed));
    spec.validate().map_err(|err| Error::validation("ensemble", err.to_string()))?;
    Ok(spec)
}

fn geometry(config: &RunConfig) -> Result<CavityGeometry> {
    config.geometry.as_ref().ok_or_else(|| Error::validation("geometry", "missing"))?.build()
}

/// Fills the defaults a command relies on, so the stored configuration is
/// self-contained. Idempotent.
pub fn resolve_config(config: &RunConfig) -> Result<RunConfig> {
    let mut c = config.clone();
    c.output = None;
    let command = c.command.ok_or_else(|| Error::validation("command", "missing"))?;
    if command.is_stochastic() {
        let g = geometry(&c)?;
        let e = c.ensemble.get_or_insert_with(EnsembleConfig::default);
        let speed = *e.speed.get_or_insert(DEFAULTS.speed);
        e.n_samples.get_or_insert(DEFAULTS.n_samples);
        if matches!(command, Command::Simulate | Command::PairDecoherence) {
            e.dt.get_or_insert(g.mean_free_path() / speed / DEFAULTS.samples_per_flight);
        }
        if command == Command::Lyapunov {
            e.t_obs_collisions.get_or_insert(DEFAULTS.t_obs_collisions);
        }
    }
    Ok(c)
}

fn header(config: &RunConfig) -> serde_json::Value {
    json!({ "tool": "chaodecay", "version": env!("CARGO_PKG_VERSION"), "config": config })
}

/// Runs one command on a parsed configuration. `command` overrides the
/// configuration's own command when given; a mismatch is a validation error.
pub fn run(config: &RunConfig, command: Option<Command>) -> Result<RunOutput> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let mut config = config.clone();
    match (config.command, command) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::validation("command", format!("config says {}, command line says {}", a.name(), b.name())))
        }
        (None, Some(b)) => config.command = Some(b),
        _ => {}
    }
    super::config::validate(&config)?;
    let config = resolve_config(&config)?;
    let command = config.command.expect("validated");
    let mut collected = match command {
        Command::Simulate => simulate(&config)?,
        Command::Lyapunov => lyapunov(&config)?,
        Command::Variance => variance(&config)?,
        Command::PairDecoherence => pair_decoherence(&config)?,
        Command::Correction => correction(&config)?,
        Command::Fig3 => fig3(&config)?,
        Command::Quadrature => quadrature(&config)?,
        Command::Peak => peak(&config)?,
        Command::Compare => compare(&config)?,
    };
    if let Ok(r) = resolve_params(&config) {
        for w in r.warnings {
            if !collected.warnings.contains(&w) {
                collected.warnings.push(w);
            }
        }
    }
    let manifest = Manifest {
        tool: "chaodecay".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        derived: derive(&config)?,
        seed: config.ensemble.as_ref().and_then(|e| e.seed),
        config,
        defaults: defaults_value(),
        results: collected.results,
        warnings: collected.warnings,
        outputs: collected.files.iter().map(|(n, _)| n.clone()).collect(),
        wall_clock: WallClock {
            started_unix_s: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_s: clock.elapsed().as_secs_f64(),
        },
    };
    Ok(RunOutput { files: collected.files, manifest })
}

/// Reads a configuration file, runs it on a pool of `threads` workers (or
/// the global pool) and writes the outputs into `out`, falling back to the
/// configuration's `output` and then the working directory.
pub fn execute(config_path: &Path, command: Option<Command>, out: Option<&Path>, threads: Option<usize>) -> Result<RunOutput> {
    let text = std::fs::read_to_string(config_path)?;
    let config = parse_config_for(&text, command)?;
    let dir: PathBuf = out.map(Path::to_path_buf).or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let output = match threads {
        Some(n) => {
            if n == 0 {
                return Err(Error::validation("threads", "must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::numeric(format!("thread pool: {e}")))?;
            pool.install(|| run(&config, command))?
        }
        None => run(&config, command)?,
    };
    output.write(&dir)?;
    Ok(output)
}

/// Like [`parse_config`], with the command taken from the command line when
/// the file has none.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<RunConfig> {
    match (command, parse_config(text)) {
        (Some(c), Err(Error::Validation { path, .. })) if path == "command" => {
            let mut value: serde_json::Value = serde_json::from_str(text).expect("already parsed");
            if let Some(obj) = value.as_object_mut() {
                obj.insert("command".into(), serde_json::to_value(c).expect("serializes"));
            }
            parse_config(&value.to_string())
        }
        (_, r) => r,
    }
}

fn survival_table(config: &RunConfig, curve: &SurvivalCurve) -> Table {
    let mut t = Table::new(&["t", "survival", "stderr"]).with_header(&header(config));
    for i in 0..curve.times.len() {
        t.push(vec![curve.times[i], curve.survival[i], curve.std_error[i]]);
    }
    t
}

fn simulate(config: &RunConfig) -> Result<Collected> {
    let g = geometry(config)?;
    let spec = ensemble_spec(config)?;
    let e = config.ensemble.as_ref().expect("resolved");
    let mean_free_time = g.mean_free_path() / spec.speed;
    let mass = config.params.as_ref().and_then(|p| p.mass).unwrap_or(DEFAULTS.mass);
    let tau_dwell = dwell_time(g.area(), g.opening_length, spec.speed, mass)?;
    let grid = config.grid.clone().unwrap_or_default();
    let stop = grid.stop.unwrap_or(5.0 * tau_dwell);
    let transient = grid.transient.unwrap_or(10.0 * mean_free_time).min(0.5 * stop);
    let times = match &grid.times {
        Some(_) => grid_times(&grid, 0.0, stop, 2)?,
        None => hybrid_grid(transient, stop, grid.n_geometric.unwrap_or(40), grid.n.unwrap_or(200))
            .map_err(|err| Error::validation("grid", err.to_string()))?,
    };
    let curve = survival_curve(&g, &spec, &times)?;
    let window = match grid.fit_window {
        Some([a, b]) => (a, b),
        None => {
            let start = config.params.as_ref().and_then(|p| p.lambda).map_or(transient, |l| 2.0 / l);
            (start, (4.0 * tau_dwell).min(stop))
        }
    };
    let fit = fit_escape_rate(&curve, window)?;
    let analytic = 1.0 / tau_dwell;
    let mut files = vec![("survival.csv".to_string(), survival_table(config, &curve).render().into_bytes())];
    if e.dump_trajectory == Some(true) {
        let (start, _) = sample_one(&g, &spec, 0)?;
        let traj = propagate(&g, &start, stop, e.dt.expect("resolved"), true)?;
        let mut text = Table::new(&["t", "x", "y", "px", "py", "event"]).with_header(&header(config)).render();
        for (time, r, p, kind) in traj.events() {
            let event = match kind {
                EventKind::Sample => "sample",
                EventKind::Collision => "collision",
                EventKind::Escape => "escape",
            };
            let cells: Vec<String> = [time, r.x, r.y, p.x, p.y].iter().map(|v| format_number(*v)).collect();
            text.push_str(&format!("{},{event}\n", cells.join(",")));
        }
        files.push(("trajectory.csv".to_string(), text.into_bytes()));
    }
    Ok(Collected {
        files,
        results: json!({
            "fitted_rate": fit.rate,
            "rate_std_error": fit.std_error,
            "fit_points": fit.n_points,
            "fit_window": [fit.window.0, fit.window.1],
            "analytic_rate": analytic,
            "analytic_tau_dwell": tau_dwell,
            "rel_dev": (fit.rate - analytic) / analytic,
            "geometry_hash": curve.geometry_hash,
        }),
        warnings: Vec::new(),
    })
}

fn lyapunov(config: &RunConfig) -> Result<Collected> {
    let g = geometry(config)?;
    let spec = ensemble_spec(config)?;
    let collisions = config.ensemble.as_ref().and_then(|e| e.t_obs_collisions).expect("resolved");
    let t_obs = collisions * g.mean_free_path() / spec.speed;
    let est = estimate_lyapunov(&g, &spec, t_obs)?;
    let mut t = Table::new(&["lambda", "stderr", "n", "t_obs"]).with_header(&header(config));
    t.push(vec![est.lambda, est.std_error, est.n as f64, est.t_obs]);
    Ok(Collected {
        files: vec![("lyapunov.csv".to_string(), t.render().into_bytes())],
        results: serde_json::to_value(est).expect("serializes"),
        warnings: Vec::new(),
    })
}

fn variance(config: &RunConfig) -> Result<Collected> {
    let g = geometry(config)?;
    let spec = ensemble_spec(config)?;
    let v = position_variance(&g, &spec)?;
    let mut t = Table::new(&["sigma2_area", "sigma2_time", "rel_diff"]).with_header(&header(config));
    t.push(vec![v.sigma2_area, v.sigma2_time, v.rel_diff]);
    let warnings = if v.ergodic_warning {
        vec![format!("time and area variances differ by {:.1}%; ergodicity doubtful", 100.0 * v.rel_diff)]
    } else {
        Vec::new()
    };
    Ok(Collected {
        files: vec![("variance.csv".to_string(), t.render().into_bytes())],
        results: serde_json::to_value(v).expect("serializes"),
        warnings,
    })
}

fn pair_decoherence(config: &RunConfig) -> Result<Collected> {
    let g = geometry(config)?;
    let spec = ensemble_spec(config)?;
    let p = config.params.clone().unwrap_or_default();
    let alpha = match (p.alpha, &p.bath) {
        (Some(a), _) => a,
        (None, Some(b)) => alpha_from_bath(b).map_err(|e| Error::validation("params.bath", e.to_string()))?,
        (None, None) => return Err(Error::validation("params.alpha", "pair-decoherence needs alpha or a bath")),
    };
    let dt = config.ensemble.as_ref().and_then(|e| e.dt).expect("resolved");
    let grid = config.grid.clone().unwrap_or_default();
    let mean_free_time = g.mean_free_path() / spec.speed;
    let times = grid_times(&grid, 0.0, 50.0 * mean_free_time, 51)?;
    let curve = pair_decoherence_curve(&g, &spec, alpha, dt, &times)?;
    let mut t = Table::new(&["t", "exponent", "stderr"]).with_header(&header(config));
    for q in &curve {
        t.push(vec![q.t, q.exponent, q.std_error]);
    }
    let last = curve.last().expect("non-empty grid");
    Ok(Collected {
        files: vec![("pair_decoherence.csv".to_string(), t.render().into_bytes())],
        results: json!({ "alpha": alpha, "n_pairs": spec.n_samples, "final_t": last.t, "final_exponent": last.exponent }),
        warnings: Vec::new(),
    })
}

fn correction(config: &RunConfig) -> Result<Collected> {
    let r = resolve_params(config)?;
    let p = &r.params;
    let grid = config.grid.clone().unwrap_or_default();
    let times = grid_times(&grid, 0.0, 5.0 * p.tau_dwell, 501)?;
    let curve = correction_curve(p, r.regime, &times)?;
    let mut t = Table::new(&["t", "bracket", "bare", "survival_classical", "survival_total"]).with_header(&header(config));
    for (i, &time) in times.iter().enumerate() {
        let classical = classical_survival(p.tau_dwell, time);
        let b = curve.bracket[i];
        t.push(vec![
            time,
            b,
            bare_quantum_correction(p.tau_dwell, p.tau_heisenberg, time),
            classical,
            classical + b,
        ]);
    }
    let peak = correction_peak(p, r.regime).ok();
    Ok(Collected {
        files: vec![("correction.csv".to_string(), t.render().into_bytes())],
        results: json!({ "regime": r.regime, "peak": peak.map(|k| json!({"t_star": k.t_star, "value": k.value})) }),
        warnings: Vec::new(),
    })
}

fn fig3(config: &RunConfig) -> Result<Collected> {
    let p = config.params.as_ref().expect("validated");
    let ratio = p.tau_dwell_over_th.expect("validated");
    let ratios = p.taud_over_th.clone().expect("validated");
    let grid = config.grid.clone().unwrap_or_default();
    let times = grid_times(&grid, 0.0, 1.0, 1001)?;
    let table = figure3_curves(ratio, &ratios, &times).map_err(|e| Error::validation("params", e.to_string()))?;
    let mut names = vec!["t_over_TH".to_string()];
    names.extend(table.columns.iter().map(|c| format!("bracket_taud_{}", c.taud_over_th)));
    names.push("bracket_ref".to_string());
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = Table::new(&names).with_header(&header(config));
    for (i, &time) in times.iter().enumerate() {
        let mut row = vec![time];
        row.extend(table.columns.iter().map(|c| c.values[i]));
        row.push(table.reference[i]);
        t.push(row);
    }
    let peaks: Vec<_> = table
        .columns
        .iter()
        .map(|c| {
            let q = SemiclassicalParams::from_times(ratio, 1.0, c.taud_over_th);
            correction_peak(&q, Default::default()).map(|k| json!({"taud_over_TH": c.taud_over_th, "t_star": k.t_star, "value": k.value}))
        })
        .collect::<Result<_>>()?;
    Ok(Collected {
        files: vec![("fig3.csv".to_string(), t.render().into_bytes())],
        results: json!({ "tauD_over_TH": ratio, "peaks": peaks }),
        warnings: Vec::new(),
    })
}

/// Parameter sequence of the convergence study: the resolved parameters with
/// `lambda`, `c2` and optionally `alpha` replaced per entry.
pub fn quadrature_sequence(config: &RunConfig) -> Result<Vec<SemiclassicalParams>> {
    let q = config.quadrature.as_ref().ok_or_else(|| Error::validation("quadrature", "missing"))?;
    let base = resolve_params(config)?.params;
    if q.lambda_tau_d.is_empty() {
        return Err(Error::validation("quadrature.lambda_tau_d", "must not be empty"));
    }
    if let Some(c) = &q.c2_over_hbar {
        if c.len() != q.lambda_tau_d.len() {
            return Err(Error::validation("quadrature.c2_over_hbar", "needs one entry per lambda_tau_d"));
        }
    }
    q.lambda_tau_d
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut p = base.clone();
            p.lambda = x / p.tau_dwell;
            let k = match &q.c2_over_hbar {
                Some(c) => c[i],
                None => (x * q.te_over_tau_d.unwrap_or(0.05)).exp(),
            };
            p.c2 = k * p.hbar;
            if let Some(a) = q.alpha_tau_d_sigma2 {
                p.alpha = a / (p.tau_dwell * p.sigma2);
            }
            p.validate().map_err(|e| Error::validation("quadrature", e.to_string()))?;
            Ok(p)
        })
        .collect()
}

fn quadrature(config: &RunConfig) -> Result<Collected> {
    let q = config.quadrature.as_ref().expect("validated");
    q.spec.validate().map_err(|e| Error::validation("quadrature.spec", e.to_string()))?;
    let sequence = quadrature_sequence(config)?;
    let table = convergence_study(&sequence, &q.t_over_tau_d, &q.spec)?;
    let mut t = Table::new(&[
        "lambda_tauD",
        "c2_over_hbar",
        "alpha_over_lambda",
        "t_over_tauD",
        "quad_value",
        "closed_form",
        "rel_dev",
        "est_err",
        "im_part",
    ])
    .with_header(&header(config));
    for r in &table.rows {
        t.push(vec![
            r.lambda_tau_d,
            r.c2_over_hbar,
            r.alpha_over_lambda,
            r.t_over_tau_d,
            r.quad_value,
            r.closed_form,
            r.rel_dev,
            r.est_err,
            r.im_part,
        ]);
    }
    Ok(Collected {
        files: vec![("convergence.csv".to_string(), t.render().into_bytes())],
        results: json!({
            "fraction_decreasing": table.fraction_decreasing(),
            "final_max_deviation": table.final_max_deviation(),
            "final_max_two_leg_deviation": table.final_max_two_leg_deviation(),
            "imaginary_parts_within_error": table.imaginary_parts_within_error(),
        }),
        warnings: Vec::new(),
    })
}

#[derive(Serialize)]
struct PeakReport<'a> {
    t_star: f64,
    value: f64,
    regime: crate::formulas::Regime,
    params: &'a SemiclassicalParams,
}

fn peak(config: &RunConfig) -> Result<Collected> {
    let r = resolve_params(config)?;
    let k = correction_peak(&r.params, r.regime)?;
    let report = PeakReport { t_star: k.t_star, value: k.value, regime: r.regime, params: &r.params };
    let bytes = serde_json::to_vec_pretty(&report).expect("serializes");
    Ok(Collected {
        files: vec![("peak.json".to_string(), bytes)],
        results: json!({ "t_star": k.t_star, "value": k.value }),
        warnings: Vec::new(),
    })
}

fn find_key(v: &serde_json::Value, key: &str) -> Option<f64> {
    match v {
        serde_json::Value::Object(m) => m.get(key).and_then(|x| x.as_f64()).or_else(|| m.values().find_map(|x| find_key(x, key))),
        serde_json::Value::Array(a) => a.iter().find_map(|x| find_key(x, key)),
        _ => None,
    }
}

/// Survival curve from a CSV with columns `t`, `survival` and `stderr`. The
/// ensemble size comes from an `n_samples` entry of the `#` header, else
/// from the binomial errors, else the data are taken as exact.
pub fn read_survival_csv(text: &str) -> Result<SurvivalCurve> {
    let path = "compare.survival_csv";
    let table = Table::parse(text).map_err(|e| Error::validation(path, e.to_string()))?;
    let col = |name: &str| table.column(name).ok_or_else(|| Error::validation(path, format!("missing column `{name}`")));
    let (times, survival, std_error) = (col("t")?, col("survival")?, col("stderr")?);
    if times.windows(2).any(|w| w[1] <= w[0]) || survival.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::validation(path, "times must increase and survival lie in [0, 1]"));
    }
    let from_header = table.header.as_ref().and_then(|h| find_key(h, "n_samples"));
    let mut implied: Vec<f64> = survival
        .iter()
        .zip(&std_error)
        .filter(|(s, e)| **e > 0.0 && **s > 0.0 && **s < 1.0)
        .map(|(s, e)| s * (1.0 - s) / (e * e))
        .collect();
    implied.sort_by(f64::total_cmp);
    let n = from_header.or_else(|| implied.get(implied.len() / 2).copied()).unwrap_or(1e12);
    Ok(SurvivalCurve {
        times,
        survival,
        std_error,
        n_samples: n.round().max(1.0) as usize,
        geometry_hash: String::new(),
    })
}

/// Fits the classical rate of a survival CSV and sets it against `1/tau_D`
/// and the correction-curve peak of the resolved parameters.
pub fn compare_report(survival_csv: &str, config: &RunConfig) -> Result<serde_json::Value> {
    let curve = read_survival_csv(survival_csv)?;
    let r = resolve_params(config)?;
    let tau_dwell = r.params.tau_dwell;
    let window = match config.grid.as_ref().and_then(|g| g.fit_window) {
        Some([a, b]) => (a, b),
        None => {
            let last = *curve.times.last().expect("parsed");
            let start = match &config.geometry {
                Some(g) => {
                    let speed = config.ensemble.as_ref().and_then(|e| e.speed).unwrap_or(DEFAULTS.speed);
                    10.0 * g.build()?.mean_free_path() / speed
                }
                None => 0.1 * tau_dwell,
            };
            (start, (4.0 * tau_dwell).min(last))
        }
    };
    let fit = fit_escape_rate(&curve, window)?;
    let analytic = 1.0 / tau_dwell;
    let peak = correction_peak(&r.params, r.regime)?;
    Ok(json!({
        "fitted_rate": fit.rate,
        "rate_std_error": fit.std_error,
        "fit_points": fit.n_points,
        "fit_window": [fit.window.0, fit.window.1],
        "analytic_rate": analytic,
        "rel_dev": (fit.rate - analytic) / analytic,
        "peak": { "t_star": peak.t_star, "value": peak.value, "regime": r.regime },
    }))
}

fn compare(config: &RunConfig) -> Result<Collected> {
    let c = config.compare.as_ref().expect("validated");
    let text = std::fs::read_to_string(&c.survival_csv)?;
    let report = compare_report(&text, config)?;
    Ok(Collected {
        files: vec![("compare.json".to_string(), serde_json::to_vec_pretty(&report).expect("serializes"))],
        results: report,
        warnings: Vec::new(),
    })
}
