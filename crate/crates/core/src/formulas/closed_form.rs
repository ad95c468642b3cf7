use super::params::{BathSpec, SemiclassicalParams};
use super::curves::Regime;
use crate::error::{Error, Result};

/// Below this argument `g` is summed as a series.
const SERIES_THRESHOLD: f64 = 1e-3;

/// `g(y) = e^{-y} - 1 + y`, free of cancellation for small `y`.
pub(crate) fn g_excess(y: f64) -> f64 {
    if y < SERIES_THRESHOLD {
        // y^2/2 - y^3/6 + y^4/24 - y^5/120 + y^6/720
        let y2 = y * y;
        y2 * (0.5 - y * (1.0 / 6.0 - y * (1.0 / 24.0 - y * (1.0 / 120.0 - y / 720.0))))
    } else {
        (-y).exp_m1() + y
    }
}

/// `tau_d^2 (e^{-t/tau_d} - 1) + tau_d t`, tending to `t^2/2` as
/// `tau_d -> inf`. Zero for `t <= 0`.
pub(crate) fn decay_kernel(t: f64, tau_d: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if tau_d.is_infinite() {
        0.5 * t * t
    } else {
        tau_d * tau_d * g_excess(t / tau_d)
    }
}

/// Time derivative of [`decay_kernel`], `tau_d (1 - e^{-t/tau_d})`.
pub(crate) fn decay_kernel_rate(t: f64, tau_d: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if tau_d.is_infinite() {
        t
    } else {
        -tau_d * (-t / tau_d).exp_m1()
    }
}

/// `alpha = 2 Gamma / (hbar^2 beta)`.
pub fn alpha_from_bath(bath: &BathSpec) -> Result<f64> {
    bath.validate()?;
    Ok(2.0 * bath.gamma / (bath.hbar * bath.hbar * bath.beta))
}

/// `tau_D = Omega / (2 l p) = pi A / (l v)` with `Omega = 2 pi m A`.
pub fn dwell_time(area: f64, opening_length: f64, speed: f64, mass: f64) -> Result<f64> {
    positive(&[("area", area), ("opening_length", opening_length), ("speed", speed), ("mass", mass)])?;
    let omega = std::f64::consts::TAU * mass * area;
    Ok(omega / (2.0 * opening_length * mass * speed))
}

/// `T_H = Omega / (2 pi hbar) = m A / hbar`.
pub fn heisenberg_time(area: f64, mass: f64, hbar: f64) -> Result<f64> {
    positive(&[("area", area), ("mass", mass), ("hbar", hbar)])?;
    Ok(mass * area / hbar)
}

/// `tau_d = 1 / (2 alpha sigma^2)`; infinite at `alpha = 0`.
pub fn decoherence_time(alpha: f64, sigma2: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !(sigma2 > 0.0) {
        return Err(Error::domain("decoherence time needs alpha >= 0 and sigma2 > 0"));
    }
    Ok(1.0 / (2.0 * alpha * sigma2))
}

/// `t_E = ln(c^2 / hbar) / lambda`.
pub fn ehrenfest_time(lambda: f64, c2: f64, hbar: f64) -> Result<f64> {
    positive(&[("lambda", lambda), ("c2", c2), ("hbar", hbar)])?;
    if c2 < hbar {
        return Err(Error::domain("c2 < hbar gives a negative Ehrenfest time"));
    }
    Ok((c2 / hbar).ln() / lambda)
}

/// `t_lL = ln(L / l) / lambda`, half the minimum loop time.
pub fn loop_length_time(lambda: f64, cavity_size: f64, opening_length: f64) -> Result<f64> {
    positive(&[("lambda", lambda), ("cavity_size", cavity_size), ("opening_length", opening_length)])?;
    if cavity_size < opening_length {
        return Err(Error::domain("cavity size below opening length gives a negative loop time"));
    }
    Ok((cavity_size / opening_length).ln() / lambda)
}

pub fn classical_survival(tau_dwell: f64, t: f64) -> f64 {
    (-t / tau_dwell).exp()
}

/// `e^{-t/tau_D} t^2 / (2 T_H tau_D)`.
pub fn bare_quantum_correction(tau_dwell: f64, tau_heisenberg: f64, t: f64) -> f64 {
    if tau_dwell.is_infinite() {
        return 0.0;
    }
    (-t / tau_dwell).exp() * (0.5 * t * t) / (tau_heisenberg * tau_dwell)
}

/// Decohered loop correction
/// `e^{-t/tau_D} [tau_d^2 (e^{-t/tau_d} - 1) + tau_d t] / (T_H tau_D)`.
pub fn loop_correction(params: &SemiclassicalParams, t: f64) -> f64 {
    if params.tau_dwell.is_infinite() {
        return 0.0;
    }
    (-t / params.tau_dwell).exp() * decay_kernel(t, params.tau_d())
        / (params.tau_heisenberg * params.tau_dwell)
}

/// Short-time expansion `e^{-t/tau_D} [t^2/(2 T_H tau_D) - t^3/(6 T_H tau_D tau_d)]`
/// truncated after the `order`-th power (2 or 3).
pub fn loop_correction_short_time(params: &SemiclassicalParams, t: f64, order: u32) -> Result<f64> {
    let poly = match order {
        2 => 0.5 * t * t,
        3 => 0.5 * t * t - t * t * t / (6.0 * params.tau_d()),
        _ => return Err(Error::domain("short-time order must be 2 or 3")),
    };
    if params.tau_dwell.is_infinite() {
        return Ok(0.0);
    }
    Ok((-t / params.tau_dwell).exp() * poly / (params.tau_heisenberg * params.tau_dwell))
}

/// Ehrenfest-gated loop correction, with `tau_d` built from the cavity size.
/// It equals
/// `e^{-(t-t_E)/tau_D} e^{-2 t_lL/tau_d} [tau_d^2 (e^{-T/tau_d} - 1) + tau_d T] / (T_H tau_D)`
/// with `T = t - 2 t_E - 2 t_lL`, and vanishes for `T <= 0`.
pub fn loop_correction_ehrenfest(params: &SemiclassicalParams, t: f64) -> Result<f64> {
    let t_e = params.t_ehrenfest()?;
    let t_ll = params.t_loop_min()?;
    let tau_d = params.tau_d_ehrenfest();
    let gate = t - 2.0 * t_e - 2.0 * t_ll;
    if gate <= 0.0 || params.tau_dwell.is_infinite() {
        return Ok(0.0);
    }
    let loop_decay = if tau_d.is_infinite() { 1.0 } else { (-2.0 * t_ll / tau_d).exp() };
    Ok((-(t - t_e) / params.tau_dwell).exp() * loop_decay * decay_kernel(gate, tau_d)
        / (params.tau_heisenberg * params.tau_dwell))
}

/// Classical decay plus the selected correction bracket.
pub fn total_survival(params: &SemiclassicalParams, t: f64, regime: Regime) -> Result<f64> {
    Ok(classical_survival(params.tau_dwell, t) + regime.bracket(params, t)?)
}

fn positive(values: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in values {
        if !(v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}
