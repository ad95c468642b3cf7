//! Closed-form expressions of the semiclassical theory: parameter maps,
//! classical decay, the bare and decohered loop corrections, their
//! short-time and Ehrenfest-time variants, and curve utilities.
//!
//! All brackets are the loop-correction factor that multiplies the
//! transported Wigner function. Summing it with the classical decay assumes a
//! normalized initial state supported inside the cavity, for which the
//! phase-space projection factorizes as in the vanishing-coupling result.

mod closed_form;
mod curves;
mod params;

pub use closed_form::{
    alpha_from_bath, bare_quantum_correction, classical_survival, decoherence_time, dwell_time,
    ehrenfest_time, heisenberg_time, loop_correction, loop_correction_ehrenfest,
    loop_correction_short_time, loop_length_time, total_survival,
};
pub(crate) use closed_form::{decay_kernel, decay_kernel_rate};
pub use curves::{
    correction_curve, correction_peak, figure3_curves, CorrectionCurve, CorrectionPeak, Figure3Column,
    Figure3Table, Regime,
};
pub use params::{BathSpec, RegimeFlags, SemiclassicalParams};
