use serde::Serialize;

use super::sampling::{sample_ensemble, sample_one, EnsembleSpec};
use crate::error::Result;
use crate::geometry::{CavityGeometry, Particle, Vec2};

/// Relative disagreement between the two estimators above which an
/// ergodicity warning is raised.
pub const ERGODIC_TOLERANCE: f64 = 0.05;

/// Time samples per mean free time on the long trajectory.
const SAMPLES_PER_FLIGHT: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceEstimate {
    /// Uniform-area (phase-space) average; the canonical value.
    pub sigma2_area: f64,
    pub sigma2_area_std_error: f64,
    /// Time average along one long closed trajectory.
    pub sigma2_time: f64,
    pub rel_diff: f64,
    pub ergodic_warning: bool,
}

/// Position variance `<|r - <r>|^2>` estimated over the ensemble and along one
/// trajectory of `n_samples` mean free times.
pub fn position_variance(geometry: &CavityGeometry, spec: &EnsembleSpec) -> Result<VarianceEstimate> {
    let points = sample_ensemble(geometry, spec)?;
    let (sigma2_area, sigma2_area_std_error) = variance_of(points.iter().map(|p| p.position));

    let flight = geometry.mean_free_path() / spec.speed;
    let dt = flight / SAMPLES_PER_FLIGHT;
    let n_time = (spec.n_samples as f64 * SAMPLES_PER_FLIGHT).max(2.0) as usize;
    let (start, _) = sample_one(geometry, spec, u64::MAX)?;
    let mut particle = Particle::new(&start)?;
    let mut positions = Vec::with_capacity(n_time);
    for k in 0..n_time {
        particle.advance_to(geometry, k as f64 * dt)?;
        positions.push(particle.position);
    }
    let (sigma2_time, _) = variance_of(positions.into_iter());

    let rel_diff = (sigma2_time - sigma2_area).abs() / sigma2_area;
    Ok(VarianceEstimate {
        sigma2_area,
        sigma2_area_std_error,
        sigma2_time,
        rel_diff,
        ergodic_warning: rel_diff > ERGODIC_TOLERANCE,
    })
}

/// Unbiased variance of a 2-D sample and the standard error of that value.
fn variance_of(points: impl Iterator<Item = Vec2> + Clone) -> (f64, f64) {
    let n = points.clone().count() as f64;
    let mean = points.clone().fold(Vec2::ZERO, |acc, p| acc + p) / n;
    let sq: Vec<f64> = points.map(|p| (p - mean).norm_sq()).collect();
    let m = sq.iter().sum::<f64>() / n;
    let var_sq = sq.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m * n / (n - 1.0), (var_sq / n).sqrt())
}
