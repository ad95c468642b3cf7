use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::formulas::{decay_kernel, decay_kernel_rate, SemiclassicalParams};

use super::rules::Rule;

/// `t_enc = ln(c^2 / |su|) / lambda`.
pub fn encounter_time(s: f64, u: f64, lambda: f64, c2: f64) -> Result<f64> {
    let su = (s * u).abs();
    if su == 0.0 {
        return Err(Error::domain("encounter time diverges at su = 0"));
    }
    if su > c2 * (1.0 + 1e-15) {
        return Err(Error::domain(format!("|su| = {su} exceeds c2 = {c2}")));
    }
    Ok((c2 / su).ln().max(0.0) / lambda)
}

/// Decoherence accumulated across the encounter,
/// `exp(-alpha eta l^2 / lambda (1 - (su/c^2)^2))` with `l^2` the encounter
/// length scale.
pub(crate) fn encounter_decoherence(params: &SemiclassicalParams, w: f64) -> f64 {
    (-params.alpha * params.eta * params.encounter_length2 / params.lambda * (1.0 - w * w)).exp()
}

/// Pointwise 2-leg integrand at encounter coordinates `(s, u)`, loop start
/// `t_prime` and loop length `t_loop`:
/// `e^{i su/hbar} e^{-(t - t_enc)/tau_D} / (Omega t_enc) * E(su) * e^{-2 alpha sigma^2 t_loop}`.
/// Points outside the admissible time window (with the encounter exposure
/// split evenly, `t_u = t_s = t_enc/2`) give zero.
pub fn integrand_2leg(
    s: f64,
    u: f64,
    t_prime: f64,
    t_loop: f64,
    t: f64,
    params: &SemiclassicalParams,
) -> Result<Complex64> {
    let t_enc = encounter_time(s, u, params.lambda, params.c2)?;
    let (t_u, t_s) = (0.5 * t_enc, 0.5 * t_enc);
    let inside = t_prime >= t_s
        && t_prime <= t - 2.0 * t_u - t_s
        && t_loop >= 0.0
        && t_loop <= t - t_prime - 2.0 * t_u - t_s;
    if !inside || t_enc == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let su = s * u;
    let amplitude = (-(t - t_enc) / params.tau_dwell).exp() / (params.omega() * t_enc)
        * encounter_decoherence(params, su / params.c2)
        * (-2.0 * params.alpha * params.sigma2 * t_loop).exp();
    Ok(Complex64::from_polar(amplitude, su / params.hbar))
}

/// The three diagrams of the one-encounter correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagram {
    TwoLeg,
    OneLegHead,
    OneLegTail,
}

/// Time-integrated weight of a diagram at encounter duration `tau`, with the
/// `1/t_enc` factor removed (it cancels the density of `su`).
pub(crate) struct Profile<'a> {
    pub params: &'a SemiclassicalParams,
    pub t: f64,
    pub diagram: Diagram,
    /// Fraction of the encounter exposure assigned to the unstable side.
    pub split: f64,
    pub inner: &'a Rule,
}

impl Profile<'_> {
    pub fn eval(&self, tau: f64) -> f64 {
        let p = self.params;
        let t = self.t;
        let tau_d = p.tau_d();
        let w = (-p.lambda * tau).exp();
        let enc = encounter_decoherence(p, w);
        match self.diagram {
            Diagram::TwoLeg => {
                // t' in [t_s, t - 2 t_u - t_s], loop in [0, t - t' - 2 t_u - t_s]
                let t_u = self.split * tau;
                let t_s = tau - t_u;
                let window = t - 2.0 * t_u - t_s;
                if window <= t_s {
                    return 0.0;
                }
                enc * (-(t - tau) / p.tau_dwell).exp() * decay_kernel(window - t_s, tau_d)
            }
            Diagram::OneLegHead => {
                // encounter cut by the start: a = exposed time inside [0, t]
                let b = tau.min(t - tau);
                if b <= 0.0 {
                    return 0.0;
                }
                enc * self.inner.integrate(0.0, b, |a| {
                    (-(t - a) / p.tau_dwell).exp() * decay_kernel_rate(t - tau - a, tau_d)
                })
            }
            Diagram::OneLegTail => {
                // mirror image: the encounter is cut by the end, a' = t - a
                let b = tau.min(t - tau);
                if b <= 0.0 {
                    return 0.0;
                }
                enc * self.inner.integrate(t - b, t, |ap| {
                    (-ap / p.tau_dwell).exp() * decay_kernel_rate(ap - tau, tau_d)
                })
            }
        }
    }

    /// Encounter durations where the profile has a kink.
    pub fn kinks(&self) -> Vec<f64> {
        vec![0.5 * self.t]
    }
}
