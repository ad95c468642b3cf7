//! Monte Carlo estimators over microcanonical billiard ensembles.
//!
//! Every trajectory index owns an independent counter-based random stream
//! derived from the master seed, and all reductions run in index order, so
//! results are bit-identical for any worker count.

mod decoherence;
mod lyapunov;
mod sampling;
mod survival;
mod variance;

pub use decoherence::{
    decoherence_functional, decoherence_integral, pair_decoherence_curve, PairDecoherencePoint,
};
pub use lyapunov::{estimate_lyapunov, LyapunovEstimate};
pub use sampling::{sample_ensemble, sample_one, stream_rng, EnsembleSpec, Sampling};
pub use survival::{
    fit_escape_rate, hybrid_grid, survival_curve, survival_from_escape_times, EscapeFit,
    SurvivalCurve,
};
pub use variance::{position_variance, VarianceEstimate, ERGODIC_TOLERANCE};
