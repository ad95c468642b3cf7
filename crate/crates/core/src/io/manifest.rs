use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::resolve::{resolve_params, Defaults, DEFAULTS};
use crate::error::{Error, Result};
use crate::formulas::SemiclassicalParams;

/// Derived quantities recorded next to the results. Infinite or undefined
/// values are written as `null`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub area: Option<f64>,
    pub perimeter: Option<f64>,
    pub diameter: Option<f64>,
    pub mean_free_time: Option<f64>,
    pub opening_length: Option<f64>,
    pub sigma2: Option<f64>,
    pub tau_dwell: Option<f64>,
    pub tau_heisenberg: Option<f64>,
    pub lambda: Option<f64>,
    pub tau_d: Option<f64>,
    pub t_ehrenfest: Option<f64>,
    pub t_loop_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Configuration with every default filled in; running it again
    /// reproduces the data files byte for byte.
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub defaults: serde_json::Value,
    pub derived: Derived,
    pub results: serde_json::Value,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_clock: WallClock,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Recomputes the derived quantities of a resolved configuration. Parameters
/// the command does not need are left out rather than reported as errors.
pub fn derive(config: &RunConfig) -> Result<Derived> {
    let mut d = Derived::default();
    if let Some(g) = &config.geometry {
        let g = g.build()?;
        let speed = config.ensemble.as_ref().and_then(|e| e.speed).unwrap_or(DEFAULTS.speed);
        d.area = Some(g.area());
        d.perimeter = Some(g.perimeter());
        d.diameter = Some(g.diameter());
        d.mean_free_time = Some(g.mean_free_path() / speed);
    }
    if let Ok(r) = resolve_params(config) {
        fill_params(&mut d, &r.params);
    }
    Ok(d)
}

fn fill_params(d: &mut Derived, p: &SemiclassicalParams) {
    d.opening_length = finite(p.opening_length);
    d.sigma2 = finite(p.sigma2);
    d.tau_dwell = finite(p.tau_dwell);
    d.tau_heisenberg = finite(p.tau_heisenberg);
    d.lambda = finite(p.lambda);
    d.tau_d = finite(p.tau_d());
    d.t_ehrenfest = p.t_ehrenfest().ok().and_then(finite);
    d.t_loop_min = p.t_loop_min().ok().and_then(finite);
}

pub(crate) fn defaults_value() -> serde_json::Value {
    serde_json::to_value::<Defaults>(DEFAULTS).expect("defaults serialize")
}

/// Parses a manifest and checks every stored derived value against a fresh
/// computation from its configuration, to relative precision `tol`.
pub fn verify_manifest(text: &str, tol: f64) -> Result<Manifest> {
    let manifest: Manifest =
        serde_json::from_str(text).map_err(|e| Error::validation("manifest", e.to_string()))?;
    let fresh = derive(&manifest.config)?;
    let stored = serde_json::to_value(&manifest.derived).expect("serializes");
    let fresh = serde_json::to_value(&fresh).expect("serializes");
    for (key, a) in stored.as_object().expect("object") {
        let b = &fresh[key];
        let ok = match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => (x - y).abs() <= tol * x.abs().max(y.abs()),
            (None, None) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::validation(format!("derived.{key}"), format!("stored {a}, recomputed {b}")));
        }
    }
    Ok(manifest)
}
