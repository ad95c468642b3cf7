use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{BathSpec, Regime};
use crate::geometry::{CavityGeometry, Shape};
use crate::quadrature::QuadratureSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Lyapunov,
    Variance,
    PairDecoherence,
    Correction,
    Fig3,
    Quadrature,
    Peak,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Lyapunov => "lyapunov",
            Command::Variance => "variance",
            Command::PairDecoherence => "pair-decoherence",
            Command::Correction => "correction",
            Command::Fig3 => "fig3",
            Command::Quadrature => "quadrature",
            Command::Peak => "peak",
            Command::Compare => "compare",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Command::Simulate | Command::Lyapunov | Command::Variance | Command::PairDecoherence)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Circle,
    Cardioid,
    Stadium,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub shape: ShapeKind,
    #[serde(default = "one")]
    pub scale: f64,
    /// Stadium only: half the length of the straight segments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening_center: Option<f64>,
    /// Absent means a closed cavity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening_length: Option<f64>,
}

impl GeometryConfig {
    pub fn shape(&self) -> Result<Shape> {
        match (self.shape, self.half_length) {
            (ShapeKind::Circle, None) => Ok(Shape::Circle),
            (ShapeKind::Cardioid, None) => Ok(Shape::Cardioid),
            (ShapeKind::Stadium, Some(h)) => Ok(Shape::Stadium { half_length: h }),
            (ShapeKind::Stadium, None) => Err(Error::validation("geometry.half_length", "required for a stadium")),
            (_, Some(_)) => Err(Error::validation("geometry.half_length", "only valid for a stadium")),
        }
    }

    pub fn build(&self) -> Result<CavityGeometry> {
        let shape = self.shape()?;
        let invalid = |e: Error| match e {
            Error::Domain(m) => Error::validation("geometry", m),
            other => other,
        };
        match (self.opening_length, self.opening_center) {
            (None, None) => CavityGeometry::closed(shape, self.scale).map_err(invalid),
            (None, Some(_)) => Err(Error::validation("geometry.opening_length", "required with opening_center")),
            (Some(l), None) => CavityGeometry::with_default_opening(shape, self.scale, l).map_err(invalid),
            (Some(l), Some(c)) => CavityGeometry::new(shape, self.scale, c, l).map_err(invalid),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    /// Sample step for trajectories, in time units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Observation time of the Lyapunov estimate, in mean free times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_obs_collisions: Option<f64>,
    /// Write the first trajectory of the ensemble as an event CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_trajectory: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "tauD_over_TH", default, skip_serializing_if = "Option::is_none")]
    pub tau_dwell_over_th: Option<f64>,
    #[serde(rename = "taud_over_TH", default, skip_serializing_if = "Option::is_none")]
    pub taud_over_th: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_dwell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_heisenberg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathSpec>,
    /// Decoherence time given directly; converted to `alpha` at the resolved
    /// `sigma2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encounter_length2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Explicit grid; overrides the range fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Survival grids: end of the log-spaced part.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_geometric: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub lambda_tau_d: Vec<f64>,
    /// `t_E / tau_D`, fixing `c^2/hbar = exp(lambda tau_D t_E/tau_D)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub te_over_tau_d: Option<f64>,
    /// Explicit `c^2/hbar` per sequence entry, instead of `te_over_tau_d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2_over_hbar: Option<Vec<f64>>,
    /// `alpha tau_D sigma^2`; overrides the coupling of the params block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_tau_d_sigma2: Option<f64>,
    pub t_over_tau_d: Vec<f64>,
    #[serde(default)]
    pub spec: QuadratureSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub survival_csv: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    /// Output directory; the command line `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

/// Parses a JSON configuration. Malformed JSON is a syntax error with its
/// position; well-formed JSON that does not fit the schema is a validation
/// error with the offending field path.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    if let Err(e) = serde_json::from_str::<serde_json::Value>(text) {
        return Err(Error::Syntax { line: e.line(), column: e.column(), message: e.to_string() });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::validation(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    validate(&config)?;
    Ok(config)
}

/// Checks that the blocks needed by the command are present.
pub fn validate(config: &RunConfig) -> Result<()> {
    let Some(command) = config.command else {
        return Err(Error::validation("command", "missing"));
    };
    let needs_geometry = matches!(
        command,
        Command::Simulate | Command::Lyapunov | Command::Variance | Command::PairDecoherence
    );
    if needs_geometry && config.geometry.is_none() {
        return Err(Error::validation("geometry", format!("required for {}", command.name())));
    }
    if command.is_stochastic() {
        let seed = config.ensemble.as_ref().and_then(|e| e.seed);
        if seed.is_none() {
            return Err(Error::validation("ensemble.seed", format!("required for {}", command.name())));
        }
    }
    if command == Command::Simulate {
        let open = config.geometry.as_ref().and_then(|g| g.opening_length).is_some();
        if !open {
            return Err(Error::validation("geometry.opening_length", "simulate needs an open cavity"));
        }
    }
    if command == Command::Fig3 {
        let p = config.params.as_ref();
        if p.and_then(|p| p.tau_dwell_over_th).is_none() {
            return Err(Error::validation("params.tauD_over_TH", "required for fig3"));
        }
        if p.and_then(|p| p.taud_over_th.as_ref()).is_none() {
            return Err(Error::validation("params.taud_over_TH", "required for fig3"));
        }
    }
    if command == Command::Quadrature && config.quadrature.is_none() {
        return Err(Error::validation("quadrature", "required for quadrature"));
    }
    if command == Command::Compare && config.compare.is_none() {
        return Err(Error::validation("compare", "required for compare"));
    }
    if let Some(g) = &config.geometry {
        g.build()?;
    }
    Ok(())
}
