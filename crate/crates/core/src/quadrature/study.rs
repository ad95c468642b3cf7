use serde::Serialize;

use super::diagrams::{integrate_1leg, integrate_2leg, DiagramResult, QuadratureSpec};
use crate::error::{Error, Result};
use crate::formulas::{loop_correction, SemiclassicalParams};

/// Sum of the three diagrams.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureTotal {
    pub value: f64,
    pub est_error: f64,
    pub imag: f64,
    pub two_leg: DiagramResult,
    pub head: DiagramResult,
    pub tail: DiagramResult,
}

pub fn total_correction(params: &SemiclassicalParams, t: f64, spec: &QuadratureSpec) -> Result<QuadratureTotal> {
    let two_leg = integrate_2leg(params, t, spec)?;
    let (head, tail) = integrate_1leg(params, t, spec)?;
    Ok(QuadratureTotal {
        value: two_leg.value + head.value + tail.value,
        est_error: two_leg.est_error + head.est_error + tail.est_error,
        imag: two_leg.imag + head.imag + tail.imag,
        two_leg,
        head,
        tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub lambda_tau_d: f64,
    pub c2_over_hbar: f64,
    /// `alpha sigma^2 / lambda`.
    pub alpha_over_lambda: f64,
    pub t_over_tau_d: f64,
    pub quad_value: f64,
    pub closed_form: f64,
    pub rel_dev: f64,
    pub est_err: f64,
    pub im_part: f64,
    pub two_leg_value: f64,
    pub two_leg_rel_dev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    /// Row-major: all times of the first parameter set, then the next.
    pub rows: Vec<ConvergenceRow>,
    pub n_params: usize,
    pub n_times: usize,
}

impl ConvergenceTable {
    pub fn row(&self, param_index: usize, time_index: usize) -> &ConvergenceRow {
        &self.rows[param_index * self.n_times + time_index]
    }

    /// Share of times at which `|rel_dev|` decreases at every step of the
    /// parameter sequence.
    pub fn fraction_decreasing(&self) -> f64 {
        let ok = (0..self.n_times)
            .filter(|&j| {
                (1..self.n_params).all(|i| self.row(i, j).rel_dev.abs() < self.row(i - 1, j).rel_dev.abs())
            })
            .count();
        ok as f64 / self.n_times as f64
    }

    /// Largest `|rel_dev|` for the last parameter set.
    pub fn final_max_deviation(&self) -> f64 {
        (0..self.n_times).map(|j| self.row(self.n_params - 1, j).rel_dev.abs()).fold(0.0, f64::max)
    }

    pub fn final_max_two_leg_deviation(&self) -> f64 {
        (0..self.n_times).map(|j| self.row(self.n_params - 1, j).two_leg_rel_dev.abs()).fold(0.0, f64::max)
    }

    /// `true` when every imaginary part is within its error estimate.
    pub fn imaginary_parts_within_error(&self) -> bool {
        self.rows.iter().all(|r| r.im_part.abs() <= r.est_err)
    }
}

/// Quadrature against the closed form along a parameter sequence ordered by
/// increasing `lambda tau_D`, at times given in units of each `tau_D`.
pub fn convergence_study(
    sequence: &[SemiclassicalParams],
    t_over_tau_dwell: &[f64],
    spec: &QuadratureSpec,
) -> Result<ConvergenceTable> {
    if sequence.is_empty() || t_over_tau_dwell.is_empty() {
        return Err(Error::domain("convergence study needs parameters and times"));
    }
    if sequence.windows(2).any(|w| w[1].lambda * w[1].tau_dwell <= w[0].lambda * w[0].tau_dwell) {
        return Err(Error::domain("parameter sequence must increase in lambda tau_D"));
    }
    let mut rows = Vec::with_capacity(sequence.len() * t_over_tau_dwell.len());
    for p in sequence {
        for &x in t_over_tau_dwell {
            let t = x * p.tau_dwell;
            let q = total_correction(p, t, spec)?;
            let closed = loop_correction(p, t);
            rows.push(ConvergenceRow {
                lambda_tau_d: p.lambda * p.tau_dwell,
                c2_over_hbar: p.c2 / p.hbar,
                alpha_over_lambda: p.alpha * p.sigma2 / p.lambda,
                t_over_tau_d: x,
                quad_value: q.value,
                closed_form: closed,
                rel_dev: (q.value - closed) / closed,
                est_err: q.est_error,
                im_part: q.imag,
                two_leg_value: q.two_leg.value,
                two_leg_rel_dev: (q.two_leg.value - closed) / closed,
            });
        }
    }
    Ok(ConvergenceTable { rows, n_params: sequence.len(), n_times: t_over_tau_dwell.len() })
}
