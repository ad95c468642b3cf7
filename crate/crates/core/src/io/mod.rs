//! Configuration, parameter resolution, deterministic table output and the
//! command runners behind the `chaodecay` binary.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod resolve;
pub mod run;

pub use config::{parse_config, Command, RunConfig};
pub use csv::{write_atomic, Table};
pub use manifest::{verify_manifest, Derived, Manifest};
pub use resolve::{resolve_params, Resolved, DEFAULTS};
pub use run::{compare_report, execute, quadrature_sequence, read_survival_csv, resolve_config, run, RunOutput};
