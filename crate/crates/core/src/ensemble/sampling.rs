use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CavityGeometry, PhasePoint, Vec2};

/// Rejection draws allowed per phase point before giving up.
const MAX_REJECTIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Uniform in area, isotropic in direction, fixed speed.
    #[default]
    UniformAreaIsotropic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_samples: usize,
    pub seed: u64,
    pub speed: f64,
    #[serde(default)]
    pub sampling: Sampling,
}

impl EnsembleSpec {
    pub fn new(n_samples: usize, seed: u64, speed: f64) -> Self {
        Self { n_samples, seed, speed, sampling: Sampling::UniformAreaIsotropic }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::domain("n_samples must be at least 1"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::domain("speed must be positive and finite"));
        }
        Ok(())
    }
}

/// Independent stream number `index` of the master `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Phase point `index` of the ensemble, together with its stream positioned
/// just after the draws that produced it.
pub fn sample_one(
    geometry: &CavityGeometry,
    spec: &EnsembleSpec,
    index: u64,
) -> Result<(PhasePoint, ChaCha8Rng)> {
    let mut rng = stream_rng(spec.seed, index);
    let (lo, hi) = geometry.bounding_box();
    for _ in 0..MAX_REJECTIONS {
        let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if geometry.contains(p) {
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            return Ok((PhasePoint::new(p, Vec2::from_angle(angle) * spec.speed), rng));
        }
    }
    Err(Error::numeric_with(
        "rejection sampling exceeded its attempt bound",
        vec![("index", index as f64), ("attempts", MAX_REJECTIONS as f64)],
    ))
}

/// `spec.n_samples` i.i.d. microcanonical phase points.
pub fn sample_ensemble(geometry: &CavityGeometry, spec: &EnsembleSpec) -> Result<Vec<PhasePoint>> {
    spec.validate()?;
    (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| sample_one(geometry, spec, i).map(|(p, _)| p))
        .collect()
}
