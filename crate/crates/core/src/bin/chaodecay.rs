use std::path::PathBuf;
use std::process::ExitCode;

use chaodecay::io::{execute, Command};
use clap::Parser;

/// Open chaotic cavity decay: billiard Monte Carlo and semiclassical loop
/// corrections.
#[derive(Parser)]
#[command(version)]
struct Cli {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the data files and `manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to `CHAODECAY_THREADS`.
    #[arg(long, env = "CHAODECAY_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.config, Some(cli.command), cli.out.as_deref(), cli.threads) {
        Ok(out) => {
            for w in &out.manifest.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("chaodecay: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
