use std::fs;
use std::path::Path;
use std::process::Command as Process;

use chaodecay::io::{compare_report, parse_config, run, verify_manifest, Command, RunConfig, Table};

const BIN: &str = env!("CARGO_BIN_EXE_chaodecay");

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn exit_code(dir: &Path, command: &str, config: &str) -> i32 {
    let cfg = write(dir, "config.json", config);
    let out = Process::new(BIN)
        .args([command, "--config", cfg.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap()])
        .env_remove("CHAODECAY_THREADS")
        .output()
        .unwrap();
    out.status.code().unwrap()
}

const FIG3: &str = r#"{"command":"fig3","params":{"tauD_over_TH":0.3,"taud_over_TH":[0.1,0.3,1.0]}}"#;

#[test]
fn exit_codes_follow_the_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(exit_code(d, "fig3", FIG3), 0);
    assert_eq!(exit_code(d, "fig3", "{\"command\": \"fig3\",,}"), 2);
    assert_eq!(exit_code(d, "simulate", r#"{"command":"simulate","geometry":{"shape":"cardioid","opening_length":0.2}}"#), 3);
    assert_eq!(exit_code(d, "peak", FIG3), 3);
    let missing = r#"{"command":"compare","compare":{"survival_csv":"/nonexistent/s.csv"},"params":{"tau_dwell":1,"tau_heisenberg":1}}"#;
    assert_eq!(exit_code(d, "compare", missing), 1);
    let bad = write(d, "bad.csv", "t,s\n0,1\n1,0.5\n");
    let schema = format!(
        r#"{{"command":"compare","compare":{{"survival_csv":{:?}}},"params":{{"tau_dwell":1,"tau_heisenberg":1}}}}"#,
        bad.to_str().unwrap()
    );
    assert_eq!(exit_code(d, "compare", &schema), 3);
    let few = r#"{"command":"simulate","geometry":{"shape":"circle","opening_length":6.0},"ensemble":{"seed":1,"n_samples":5}}"#;
    assert_eq!(exit_code(d, "simulate", few), 5);
}

#[test]
fn fig3_writes_one_column_per_ratio_plus_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.json", FIG3);
    let status = Process::new(BIN)
        .args(["fig3", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let table = Table::parse(&fs::read_to_string(dir.path().join("fig3.csv")).unwrap()).unwrap();
    assert_eq!(
        table.columns,
        ["t_over_TH", "bracket_taud_0.1", "bracket_taud_0.3", "bracket_taud_1", "bracket_ref"]
    );
    assert_eq!(table.rows.len(), 1001);
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let m = verify_manifest(&manifest, 1e-12).unwrap();
    assert_eq!(m.command, "fig3");
    assert_eq!(m.defaults["mass"], 1.0);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().starts_with('.')).collect();
    assert!(leftovers.is_empty());
}

#[test]
fn direct_alpha_beats_bath_with_a_warning() {
    let c = parse_config(
        r#"{"command":"peak","params":{"tau_dwell":0.3,"tau_heisenberg":1,"sigma2":1,"alpha":2,
            "bath":{"gamma":1,"beta":1,"hbar":1}}}"#,
    )
    .unwrap();
    let out = run(&c, None).unwrap();
    assert!(out.manifest.warnings.iter().any(|w| w.contains("bath ignored")));
    let peak: serde_json::Value = serde_json::from_slice(out.file("peak.json").unwrap()).unwrap();
    assert_eq!(peak["params"]["alpha"], 2.0);
}

#[test]
fn uncoupled_peak_sits_at_twice_the_dwell_time() {
    let c = parse_config(r#"{"command":"peak","params":{"tau_dwell":0.7,"tau_heisenberg":1}}"#).unwrap();
    let peak: serde_json::Value = serde_json::from_slice(run(&c, None).unwrap().file("peak.json").unwrap()).unwrap();
    assert!((peak["t_star"].as_f64().unwrap() - 1.4).abs() < 1e-12);
    assert_eq!(peak["regime"], "plain");
}

#[test]
fn compare_on_an_exact_exponential_has_no_deviation() {
    let tau = 3.0;
    let text: String = std::iter::once("t,survival,stderr\n".to_string())
        .chain((0..200).map(|k| {
            let t = 0.1 * k as f64;
            format!("{t},{},0\n", (-t / tau).exp())
        }))
        .collect();
    let config = parse_config(&format!(
        r#"{{"command":"compare","compare":{{"survival_csv":"unused"}},"params":{{"tau_dwell":{tau},"tau_heisenberg":2}}}}"#
    ))
    .unwrap();
    let report = compare_report(&text, &config).unwrap();
    assert!(report["rel_dev"].as_f64().unwrap().abs() < 1e-9, "{report}");
    assert!((report["peak"]["t_star"].as_f64().unwrap() - 2.0 * tau).abs() < 1e-12);
}

fn simulate_config(seed: u64) -> RunConfig {
    parse_config(&format!(
        r#"{{"command":"simulate","geometry":{{"shape":"cardioid","opening_length":0.5}},
            "ensemble":{{"n_samples":2000,"seed":{seed},"dump_trajectory":true}},"params":{{"lambda":0.35}}}}"#
    ))
    .unwrap()
}

#[test]
fn simulate_reports_fitted_and_analytic_rates() {
    let out = run(&simulate_config(5), None).unwrap();
    let r = &out.manifest.results;
    let fitted = r["fitted_rate"].as_f64().unwrap();
    let analytic = r["analytic_rate"].as_f64().unwrap();
    let pi = std::f64::consts::PI;
    assert!((analytic - 0.5 / (pi * 1.5 * pi)).abs() < 1e-15);
    assert!(((fitted - analytic) / analytic).abs() < 0.2);
    assert_eq!(out.manifest.seed, Some(5));
    let traj = String::from_utf8(out.file("trajectory.csv").unwrap().to_vec()).unwrap();
    assert!(traj.lines().nth(1).unwrap() == "t,x,y,px,py,event");
    assert!(traj.contains(",collision\n") && traj.trim_end().ends_with(",escape"));
}

#[test]
fn resolved_config_reproduces_the_outputs() {
    let first = run(&simulate_config(11), None).unwrap();
    let again = run(&first.manifest.config, None).unwrap();
    assert_eq!(first.files, again.files);
    assert_eq!(first.manifest.config, again.manifest.config);
    let text = serde_json::to_string(&first.manifest).unwrap();
    verify_manifest(&text, 1e-12).unwrap();
}

#[test]
fn command_line_and_config_commands_must_agree() {
    let c = parse_config(FIG3).unwrap();
    let e = run(&c, Some(Command::Peak)).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.json",
        r#"{"command":"variance","geometry":{"shape":"circle"},"ensemble":{"seed":3,"n_samples":500}}"#,
    );
    let mut bytes = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let status = Process::new(BIN)
            .args(["variance", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("CHAODECAY_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        bytes.push(fs::read(out.join("variance.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let status = Process::new(BIN)
        .args(["variance", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .env("CHAODECAY_THREADS", "0")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}
