//! Runs a configuration through the same path as the command-line tool and
//! shows the manifest.

use chaodecay::io::{parse_config, run};

fn main() -> chaodecay::Result<()> {
    let config = parse_config(
        r#"{
            "command": "simulate",
            "geometry": {"shape": "cardioid", "opening_length": 0.5},
            "ensemble": {"seed": 42, "n_samples": 5000},
            "params": {"lambda": 0.354}
        }"#,
    )?;
    let out = run(&config, None)?;
    let dir = std::env::temp_dir().join("chaodecay-example");
    out.write(&dir)?;
    println!("wrote {:?} to {}", out.manifest.outputs, dir.display());
    println!("{}", serde_json::to_string_pretty(&out.manifest.results).unwrap());
    Ok(())
}
