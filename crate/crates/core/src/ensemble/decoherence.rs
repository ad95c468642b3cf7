use rayon::prelude::*;
use serde::Serialize;

use super::sampling::{sample_one, EnsembleSpec};
use crate::error::{Error, Result};
use crate::geometry::{propagate, CavityGeometry, Trajectory};

/// Relative tolerance on matching sample steps.
const DT_MATCH: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairDecoherencePoint {
    pub t: f64,
    /// Ensemble mean of the decoherence exponent.
    pub exponent: f64,
    pub std_error: f64,
}

/// `alpha * int_0^t |r_a(s) - r_b(s)|^2 ds` by the trapezoidal rule on the
/// shared sample grid.
pub fn decoherence_functional(a: &Trajectory, b: &Trajectory, alpha: f64, t: f64) -> Result<f64> {
    decoherence_integral(a, b, alpha, 0.0, t)
}

/// Same integral over `[t0, t1]`. The squared separation is interpolated
/// linearly between grid nodes, so integrals over adjacent windows add up.
pub fn decoherence_integral(a: &Trajectory, b: &Trajectory, alpha: f64, t0: f64, t1: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::domain("alpha must be non-negative"));
    }
    if !(t0 >= 0.0 && t1 >= t0) {
        return Err(Error::domain("integration window must satisfy 0 <= t0 <= t1"));
    }
    let dt = a.dt;
    if (a.dt - b.dt).abs() > DT_MATCH * dt {
        return Err(Error::domain(format!("sample steps differ: {} vs {}", a.dt, b.dt)));
    }
    let n = a.samples.len().min(b.samples.len());
    let covered = n.saturating_sub(1) as f64 * dt;
    if n == 0 || t1 > covered * (1.0 + DT_MATCH) + DT_MATCH * dt {
        return Err(Error::domain(format!("sample grids cover [0, {covered}] but t = {t1}")));
    }
    let f = |k: usize| (a.samples[k].position - b.samples[k].position).norm_sq();
    let value = |t: f64| -> (usize, f64) {
        let k = ((t / dt).floor() as usize).min(n.saturating_sub(2));
        let w = (t / dt - k as f64).clamp(0.0, 1.0);
        if n == 1 {
            return (0, f(0));
        }
        (k, f(k) * (1.0 - w) + f(k + 1) * w)
    };
    if t1 == t0 {
        return Ok(0.0);
    }
    let (k0, f0) = value(t0);
    let (k1, f1) = value(t1);
    let integral = if k0 == k1 {
        0.5 * (f0 + f1) * (t1 - t0)
    } else {
        let mut s = 0.5 * (f0 + f(k0 + 1)) * ((k0 + 1) as f64 * dt - t0);
        for k in k0 + 1..k1 {
            s += 0.5 * (f(k) + f(k + 1)) * dt;
        }
        s + 0.5 * (f(k1) + f1) * (t1 - k1 as f64 * dt)
    };
    Ok(alpha * integral)
}

/// Mean decoherence exponent of `spec.n_samples` independent trajectory
/// pairs in the closed cavity, at each of `times`. Pair `k` uses streams `2k`
/// and `2k + 1`.
pub fn pair_decoherence_curve(
    geometry: &CavityGeometry,
    spec: &EnsembleSpec,
    alpha: f64,
    dt: f64,
    times: &[f64],
) -> Result<Vec<PairDecoherencePoint>> {
    spec.validate()?;
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if !(t_max > 0.0) {
        return Err(Error::domain("time grid must contain a positive time"));
    }
    let horizon = t_max + dt;
    let per_pair: Vec<Vec<f64>> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let (pa, _) = sample_one(geometry, spec, 2 * k)?;
            let (pb, _) = sample_one(geometry, spec, 2 * k + 1)?;
            let ta = propagate(geometry, &pa, horizon, dt, false)?;
            let tb = propagate(geometry, &pb, horizon, dt, false)?;
            times.iter().map(|&t| decoherence_functional(&ta, &tb, alpha, t)).collect()
        })
        .collect::<Result<_>>()?;
    let n = per_pair.len() as f64;
    Ok(times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let mean = per_pair.iter().map(|v| v[j]).sum::<f64>() / n;
            let var = if n > 1.0 {
                per_pair.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            PairDecoherencePoint { t, exponent: mean, std_error: (var / n).sqrt() }
        })
        .collect())
}
