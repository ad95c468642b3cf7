use serde::Serialize;

use super::config::{ParamsConfig, RunConfig};
use crate::error::{Error, Result};
use crate::formulas::{
    alpha_from_bath, dwell_time, heisenberg_time, Regime, SemiclassicalParams,
};
use crate::geometry::CavityGeometry;

/// Values assumed when a configuration leaves them out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Defaults {
    pub mass: f64,
    pub speed: f64,
    pub hbar: f64,
    pub eta: f64,
    pub n_samples: usize,
    pub t_obs_collisions: f64,
    pub samples_per_flight: f64,
}

pub const DEFAULTS: Defaults = Defaults {
    mass: 1.0,
    speed: 1.0,
    hbar: 1.0,
    eta: 1.0,
    n_samples: 10_000,
    t_obs_collisions: 1000.0,
    samples_per_flight: 8.0,
};

/// Semiclassical parameters with the provenance notes collected while filling
/// them in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub params: SemiclassicalParams,
    pub regime: Regime,
    pub warnings: Vec<String>,
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && !v.is_nan() {
        Ok(v)
    } else {
        Err(Error::validation(path, format!("must be positive, got {v}")))
    }
}

/// Fills in every semiclassical constant from the params block, falling back
/// to quantities of the geometry and then to the defaults. A directly given
/// `alpha` takes precedence over a bath, which takes precedence over `tau_d`.
pub fn resolve_params(config: &RunConfig) -> Result<Resolved> {
    let empty = ParamsConfig::default();
    let p = config.params.as_ref().unwrap_or(&empty);
    let geometry: Option<CavityGeometry> = config.geometry.as_ref().map(|g| g.build()).transpose()?;
    let open_length = config.geometry.as_ref().and_then(|g| g.opening_length);
    let speed = config.ensemble.as_ref().and_then(|e| e.speed).unwrap_or(DEFAULTS.speed);
    let mut warnings = Vec::new();

    let hbar = positive("params.hbar", p.hbar.or(p.bath.as_ref().map(|b| b.hbar)).unwrap_or(DEFAULTS.hbar))?;
    if let (Some(h), Some(b)) = (p.hbar, &p.bath) {
        if h != b.hbar {
            return Err(Error::validation("params.bath.hbar", "disagrees with params.hbar"));
        }
    }
    let mass = positive("params.mass", p.mass.unwrap_or(DEFAULTS.mass))?;

    if p.tau_dwell_over_th.is_some() && (p.tau_dwell.is_some() || p.tau_heisenberg.is_some()) {
        return Err(Error::validation(
            "params.tauD_over_TH",
            "give either the ratio or tau_dwell and tau_heisenberg",
        ));
    }
    let tau_heisenberg = match (p.tau_heisenberg, p.tau_dwell_over_th, &geometry) {
        (Some(th), _, _) => positive("params.tau_heisenberg", th)?,
        (None, Some(_), _) => 1.0,
        (None, None, Some(g)) => heisenberg_time(g.area(), mass, hbar)?,
        _ => return Err(Error::validation("params.tau_heisenberg", "missing and no geometry to derive it")),
    };
    let tau_dwell = match (p.tau_dwell, p.tau_dwell_over_th, &geometry, open_length) {
        (Some(td), _, _, _) => positive("params.tau_dwell", td)?,
        (None, Some(r), _, _) => positive("params.tauD_over_TH", r)? * tau_heisenberg,
        (None, None, Some(g), Some(l)) => dwell_time(g.area(), l, speed, mass)?,
        _ => return Err(Error::validation("params.tau_dwell", "missing and no open geometry to derive it")),
    };

    let lambda = match p.lambda {
        Some(l) => positive("params.lambda", l)?,
        None => f64::INFINITY,
    };
    let c2 = positive("params.c2", p.c2.unwrap_or(hbar))?;

    let coupled_directly = p.alpha.is_some() || p.bath.is_some();
    let sigma2 = match p.sigma2 {
        Some(s) => positive("params.sigma2", s)?,
        None if coupled_directly => {
            return Err(Error::validation("params.sigma2", "required when alpha or a bath is given"))
        }
        None => 1.0,
    };
    let alpha = match (p.alpha, &p.bath, p.tau_d) {
        (Some(a), bath, tau_d) => {
            if bath.is_some() {
                warnings.push("alpha given directly; bath ignored".to_string());
            }
            if tau_d.is_some() {
                warnings.push("alpha given directly; tau_d ignored".to_string());
            }
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::validation("params.alpha", format!("must be non-negative, got {a}")));
            }
            a
        }
        (None, Some(bath), tau_d) => {
            if tau_d.is_some() {
                warnings.push("bath given; tau_d ignored".to_string());
            }
            if !bath.high_temperature_ok() {
                warnings.push(format!(
                    "beta hbar omega_char = {:.3} exceeds the high-temperature range",
                    bath.high_temperature_parameter().unwrap_or(f64::NAN)
                ));
            }
            alpha_from_bath(bath).map_err(|e| Error::validation("params.bath", e.to_string()))?
        }
        (None, None, Some(td)) if td.is_infinite() => 0.0,
        (None, None, Some(td)) => 1.0 / (2.0 * positive("params.tau_d", td)? * sigma2),
        (None, None, None) => 0.0,
    };

    let eta = positive("params.eta", p.eta.unwrap_or(DEFAULTS.eta))?;
    let encounter_length2 = positive("params.encounter_length2", p.encounter_length2.unwrap_or(sigma2))?;
    let cavity_size = match (p.cavity_size, &geometry) {
        (Some(c), _) => positive("params.cavity_size", c)?,
        (None, Some(g)) => g.diameter(),
        (None, None) => 1.0,
    };
    let opening_length = match (p.opening_length, open_length) {
        (Some(l), _) | (None, Some(l)) => positive("params.opening_length", l)?,
        (None, None) => cavity_size,
    };

    let params = SemiclassicalParams {
        tau_dwell,
        tau_heisenberg,
        lambda,
        hbar,
        c2,
        alpha,
        sigma2,
        eta,
        encounter_length2,
        cavity_size,
        opening_length,
    };
    params.validate().map_err(|e| Error::validation("params", e.to_string()))?;
    let flags = params.flags();
    if lambda.is_finite() && !flags.lambda_tau_d_large {
        warnings.push(format!("lambda tau_D = {:.3} is below the semiclassical range", lambda * tau_dwell));
    }
    if lambda.is_finite() && !flags.alpha_over_lambda_small {
        warnings.push(format!("alpha sigma^2 / lambda = {:.3e} is outside weak coupling", alpha * sigma2 / lambda));
    }
    Ok(Resolved { params, regime: p.regime.unwrap_or_default(), warnings })
}
