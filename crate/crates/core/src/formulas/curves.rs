use serde::{Deserialize, Serialize};

use super::closed_form::{
    decay_kernel, decay_kernel_rate, loop_correction, loop_correction_ehrenfest,
    loop_correction_short_time,
};
use super::params::SemiclassicalParams;
use crate::error::{Error, Result};

/// Scan points used to bracket the first sign change of the slope.
const PEAK_SCAN: usize = 4000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Main result.
    #[default]
    Plain,
    /// Third-order short-time expansion.
    ShortTime,
    /// Ehrenfest-gated form.
    Ehrenfest,
}

impl Regime {
    pub fn bracket(self, params: &SemiclassicalParams, t: f64) -> Result<f64> {
        match self {
            Regime::Plain => Ok(loop_correction(params, t)),
            Regime::ShortTime => loop_correction_short_time(params, t, 3),
            Regime::Ehrenfest => loop_correction_ehrenfest(params, t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrectionCurve {
    pub times: Vec<f64>,
    pub bracket: Vec<f64>,
    pub regime: Regime,
    pub params: SemiclassicalParams,
}

pub fn correction_curve(params: &SemiclassicalParams, regime: Regime, times: &[f64]) -> Result<CorrectionCurve> {
    params.validate()?;
    let bracket = times.iter().map(|&t| regime.bracket(params, t)).collect::<Result<_>>()?;
    Ok(CorrectionCurve { times: times.to_vec(), bracket, regime, params: params.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrectionPeak {
    pub t_star: f64,
    pub value: f64,
    pub regime: Regime,
    pub params: SemiclassicalParams,
}

/// Interior maximizer of the bracket on `(0, 20 max(tau_D, tau_d))`, as the
/// first downward zero of its logarithmic slope. For the plain regime that
/// slope, `K'(t) - K(t)/tau_D` up to a positive factor, is concave, so
/// the maximizer is unique.
pub fn correction_peak(params: &SemiclassicalParams, regime: Regime) -> Result<CorrectionPeak> {
    params.validate()?;
    let tau_dwell = params.tau_dwell;
    if tau_dwell.is_infinite() {
        return Err(Error::numeric("closed cavity: the bracket vanishes identically"));
    }
    let (tau_d, shift) = match regime {
        Regime::Ehrenfest => (
            params.tau_d_ehrenfest(),
            2.0 * params.t_ehrenfest()? + 2.0 * params.t_loop_min()?,
        ),
        _ => (params.tau_d(), 0.0),
    };
    let slope = |t: f64| match regime {
        Regime::ShortTime => {
            let p = 0.5 * t * t - t * t * t / (6.0 * tau_d);
            let dp = t - 0.5 * t * t / tau_d;
            dp - p / tau_dwell
        }
        _ => decay_kernel_rate(t, tau_d) - decay_kernel(t, tau_d) / tau_dwell,
    };
    let upper = 20.0 * if tau_d.is_finite() { tau_dwell.max(tau_d) } else { tau_dwell };
    let lower = upper * 1e-9;
    let ratio = (upper / lower).powf(1.0 / (PEAK_SCAN - 1) as f64);
    let mut a = lower;
    let mut found = None;
    for _ in 1..PEAK_SCAN {
        let b = a * ratio;
        if slope(a) > 0.0 && slope(b) <= 0.0 {
            found = Some((a, b));
            break;
        }
        a = b;
    }
    let (mut lo, mut hi) = found.ok_or_else(|| {
        Error::numeric_with("no sign change of the bracket slope", vec![("upper", upper), ("tau_d", tau_d)])
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi) + shift;
    Ok(CorrectionPeak { t_star, value: regime.bracket(params, t_star)?, regime, params: params.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure3Column {
    /// `tau_d / T_H`; infinite for the vanishing-coupling reference.
    pub taud_over_th: f64,
    pub values: Vec<f64>,
}

/// Brackets at fixed `tau_D / T_H` for several `tau_d / T_H`, in units
/// `T_H = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure3Table {
    pub taud_over_th_dwell: f64,
    pub times: Vec<f64>,
    pub columns: Vec<Figure3Column>,
    pub reference: Vec<f64>,
}

pub fn figure3_curves(tau_d_over_th: f64, taud_over_th: &[f64], times: &[f64]) -> Result<Figure3Table> {
    if !(tau_d_over_th > 0.0) || taud_over_th.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::domain("figure ratios must be positive"));
    }
    let column = |ratio: f64| {
        let p = SemiclassicalParams::from_times(tau_d_over_th, 1.0, ratio);
        times.iter().map(|&t| loop_correction(&p, t)).collect::<Vec<_>>()
    };
    Ok(Figure3Table {
        taud_over_th_dwell: tau_d_over_th,
        times: times.to_vec(),
        columns: taud_over_th
            .iter()
            .filter(|r| r.is_finite())
            .map(|&r| Figure3Column { taud_over_th: r, values: column(r) })
            .collect(),
        reference: column(f64::INFINITY),
    })
}
