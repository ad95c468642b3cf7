//! Direct numerical evaluation of the one-encounter loop integral, for
//! comparison with the closed-form bracket in the semiclassical limit.

mod diagrams;
mod filon;
mod integrand;
mod rules;
mod study;
mod substitution;

pub use diagrams::{
    integrate_1leg, integrate_2leg, DiagramResult, OneLegConvention, OscillatoryMethod, QuadratureSpec,
};
pub use integrand::{encounter_time, integrand_2leg, Diagram};
pub use study::{convergence_study, ConvergenceRow, ConvergenceTable, QuadratureTotal, total_correction};
