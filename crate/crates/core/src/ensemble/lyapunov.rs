use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::{sample_one, EnsembleSpec};
use crate::error::{Error, Result};
use crate::geometry::{CavityGeometry, Particle, PhasePoint, Vec2};

/// Initial and renormalized phase-space separation, in units of the scale.
const D0_REL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    /// Combined error: ensemble standard error and finite-time drift in
    /// quadrature.
    pub std_error: f64,
    /// Standard error of the mean over trajectories.
    pub sem: f64,
    /// Ensemble mean of the finite-time exponents at half the observation time.
    pub lambda_half: f64,
    pub n: usize,
    pub t_obs: f64,
}

struct Finite {
    full: f64,
    half: f64,
}

/// Benettin estimate of the largest Lyapunov exponent. Each reference
/// trajectory carries a companion at phase-space distance `d0 = 1e-9 scale`
/// (metric `|dr|^2 + (|dv| scale / v)^2`); the pair is compared and the
/// offset rescaled to `d0` midway through every free flight. The opening is
/// ignored.
pub fn estimate_lyapunov(geometry: &CavityGeometry, spec: &EnsembleSpec, t_obs: f64) -> Result<LyapunovEstimate> {
    spec.validate()?;
    if !(t_obs > 0.0) {
        return Err(Error::domain("t_obs must be positive"));
    }
    let runs: Vec<Finite> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| finite_time_exponent(geometry, spec, i, t_obs))
        .collect::<Result<_>>()?;
    let n = runs.len() as f64;
    let lambda = runs.iter().map(|r| r.full).sum::<f64>() / n;
    let lambda_half = runs.iter().map(|r| r.half).sum::<f64>() / n;
    let var = if runs.len() > 1 {
        runs.iter().map(|r| (r.full - lambda).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let sem = (var / n).sqrt();
    let drift = lambda - lambda_half;
    Ok(LyapunovEstimate {
        lambda,
        std_error: sem.hypot(drift),
        sem,
        lambda_half,
        n: runs.len(),
        t_obs,
    })
}

fn finite_time_exponent(geometry: &CavityGeometry, spec: &EnsembleSpec, index: u64, t_obs: f64) -> Result<Finite> {
    let (start, mut rng) = sample_one(geometry, spec, index)?;
    let v = spec.speed;
    let scale = geometry.scale;
    let d0 = D0_REL * scale;

    let psi = rng.gen_range(0.0..std::f64::consts::TAU);
    let turn = if rng.gen::<bool>() { 1.0 } else { -1.0 } * d0 / (std::f64::consts::SQRT_2 * scale);
    let dr = Vec2::from_angle(psi) * (d0 / std::f64::consts::SQRT_2);
    let dir0 = start.momentum / v;
    let pert_dir = Vec2::from_angle(dir0.angle() + turn);
    let mut reference = Particle::new(&start)?;
    let mut companion = companion_at(geometry, &reference, dr, pert_dir)?;

    let mut log_sum = 0.0;
    let mut half = None;
    let mut last_t = 0.0;
    loop {
        reference.bounce(geometry, false)?;
        let flight = reference.time_to_wall(geometry)?;
        let t_mid = reference.time + 0.5 * flight;
        if t_mid > t_obs {
            break;
        }
        if half.is_none() && t_mid > 0.5 * t_obs && last_t > 0.0 {
            half = Some(log_sum / last_t);
        }
        reference.drift(t_mid - reference.time);
        companion.advance_to(geometry, t_mid)?;
        let sep_r = companion.position - reference.position;
        let sep_u = companion.direction - reference.direction;
        let d = (sep_r.norm_sq() + (sep_u.norm() * scale).powi(2)).sqrt();
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::numeric_with(
                "separation underflow or overflow",
                vec![("index", index as f64), ("time", t_mid), ("separation", d)],
            ));
        }
        log_sum += (d / d0).ln();
        last_t = t_mid;
        let f = d0 / d;
        let u = reference.direction + sep_u * f;
        companion = companion_at(geometry, &reference, sep_r * f, u / u.norm())?;
    }
    if last_t == 0.0 {
        return Err(Error::domain("t_obs shorter than the first free flight"));
    }
    let full = log_sum / last_t;
    Ok(Finite { full, half: half.unwrap_or(full) })
}

/// Companion at `reference + dr` with direction `dir`, mirroring `dr` when
/// the offset point lies outside the cavity.
fn companion_at(geometry: &CavityGeometry, reference: &Particle, dr: Vec2, dir: Vec2) -> Result<Particle> {
    let mut pos = reference.position + dr;
    if !geometry.contains(pos) {
        pos = reference.position - dr;
    }
    let mut p = Particle::new(&PhasePoint::new(pos, dir * reference.speed))?;
    p.time = reference.time;
    Ok(p)
}
