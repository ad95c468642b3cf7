use serde::{Deserialize, Serialize};

use super::closed_form::{decoherence_time, ehrenfest_time, loop_length_time};
use crate::error::{Error, Result};

/// `lambda tau_D` at or above this counts as semiclassical.
pub const LAMBDA_TAU_D_MIN: f64 = 10.0;
/// `alpha sigma^2 / lambda` at or below this counts as weak coupling.
pub const ALPHA_OVER_LAMBDA_MAX: f64 = 0.01;
/// `beta hbar omega_char` at or below this counts as high temperature.
pub const HIGH_TEMPERATURE_MAX: f64 = 0.1;

/// Ohmic bath with spectral density `J(w) = Gamma w` at inverse temperature
/// `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub gamma: f64,
    pub beta: f64,
    pub hbar: f64,
    /// Characteristic system frequency for the high-temperature check.
    #[serde(default)]
    pub omega_char: Option<f64>,
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", self.gamma), ("beta", self.beta), ("hbar", self.hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("bath {name} must be positive and finite")));
            }
        }
        Ok(())
    }

    /// `beta hbar omega_char`, when a characteristic frequency is known.
    pub fn high_temperature_parameter(&self) -> Option<f64> {
        self.omega_char.map(|w| self.beta * self.hbar * w)
    }

    /// `false` only when the collapse of the bath kernel to a delta function
    /// is doubtful.
    pub fn high_temperature_ok(&self) -> bool {
        self.high_temperature_parameter().is_none_or(|x| x <= HIGH_TEMPERATURE_MAX)
    }
}

/// Every constant entering the closed forms and the encounter integral.
/// Derived times are computed on demand so they cannot drift from their
/// inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalParams {
    pub tau_dwell: f64,
    pub tau_heisenberg: f64,
    pub lambda: f64,
    pub hbar: f64,
    /// Action scale bounding the linearized encounter region, `|su| <= c2`.
    pub c2: f64,
    /// Coupling constant, `1/(length^2 time)`.
    pub alpha: f64,
    pub sigma2: f64,
    pub eta: f64,
    /// Squared length scale of the partner separation across the encounter.
    pub encounter_length2: f64,
    /// Cavity size, used for the loop-closing time and the Ehrenfest-regime
    /// decoherence time.
    pub cavity_size: f64,
    pub opening_length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    pub lambda_tau_d_large: bool,
    pub alpha_over_lambda_small: bool,
}

impl SemiclassicalParams {
    /// Parameters for the plain closed form only: `tau_d` is encoded through
    /// `alpha` at unit `sigma2`, and the Ehrenfest and loop-closing times are
    /// zero. `tau_d = INFINITY` means no coupling.
    pub fn from_times(tau_dwell: f64, tau_heisenberg: f64, tau_d: f64) -> Self {
        Self {
            tau_dwell,
            tau_heisenberg,
            lambda: f64::INFINITY,
            hbar: 1.0,
            c2: 1.0,
            alpha: if tau_d.is_infinite() { 0.0 } else { 0.5 / tau_d },
            sigma2: 1.0,
            eta: 1.0,
            encounter_length2: 1.0,
            cavity_size: 1.0,
            opening_length: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_dwell", self.tau_dwell),
            ("tau_heisenberg", self.tau_heisenberg),
            ("lambda", self.lambda),
            ("hbar", self.hbar),
            ("c2", self.c2),
            ("sigma2", self.sigma2),
            ("eta", self.eta),
            ("encounter_length2", self.encounter_length2),
            ("cavity_size", self.cavity_size),
            ("opening_length", self.opening_length),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(Error::domain(format!("{name} must be positive")));
            }
        }
        if !(self.tau_heisenberg.is_finite() && self.sigma2.is_finite()) {
            return Err(Error::domain("tau_heisenberg and sigma2 must be finite"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::domain("alpha must be non-negative and finite"));
        }
        Ok(())
    }

    /// `1/(2 alpha sigma^2)`, infinite without coupling.
    pub fn tau_d(&self) -> f64 {
        decoherence_time(self.alpha, self.sigma2).unwrap_or(f64::NAN)
    }

    /// `1/(2 alpha L^2)` with `L` the cavity size.
    pub fn tau_d_ehrenfest(&self) -> f64 {
        decoherence_time(self.alpha, self.cavity_size * self.cavity_size).unwrap_or(f64::NAN)
    }

    pub fn t_ehrenfest(&self) -> Result<f64> {
        ehrenfest_time(self.lambda, self.c2, self.hbar)
    }

    pub fn t_loop_min(&self) -> Result<f64> {
        loop_length_time(self.lambda, self.cavity_size, self.opening_length)
    }

    /// Phase-space volume of the energy shell, `2 pi hbar T_H`.
    pub fn omega(&self) -> f64 {
        std::f64::consts::TAU * self.hbar * self.tau_heisenberg
    }

    pub fn flags(&self) -> RegimeFlags {
        RegimeFlags {
            lambda_tau_d_large: self.lambda * self.tau_dwell >= LAMBDA_TAU_D_MIN,
            alpha_over_lambda_small: self.alpha * self.sigma2 / self.lambda <= ALPHA_OVER_LAMBDA_MAX,
        }
    }
}
