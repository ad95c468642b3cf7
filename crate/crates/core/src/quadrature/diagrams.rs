use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filon;
use super::integrand::{Diagram, Profile};
use super::rules::Rule;
use super::substitution::{self, HalfLines};
use crate::error::{Error, Result};
use crate::formulas::SemiclassicalParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscillatoryMethod {
    #[default]
    Substitution1d,
    Filon2d,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneLegConvention {
    /// Encounters cut by the trajectory start or end contribute with their
    /// exposure reduced to the part inside `[0, t]`.
    #[default]
    TruncatedEncounter,
    /// One-leg diagrams are dropped.
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per panel over the encounter coordinates.
    pub su_grid: usize,
    /// Gauss-Legendre nodes for the exposed-time integral of one-leg diagrams.
    pub t_grid: usize,
    /// Smallest `|su|/c^2` resolved.
    pub su_cut: f64,
    pub oscillatory_method: OscillatoryMethod,
    pub one_leg_convention: OneLegConvention,
    /// Gauss-Legendre nodes of the boundary-phase average.
    pub phase_nodes: usize,
    /// Share of the encounter exposure on the unstable side, `t_u / t_enc`.
    pub encounter_split: f64,
    /// Allowed change between the `su_grid` and `2 su_grid` values, relative
    /// to the integral of the absolute integrand.
    pub refinement_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            su_grid: 32,
            t_grid: 24,
            su_cut: 1e-14,
            oscillatory_method: OscillatoryMethod::Substitution1d,
            one_leg_convention: OneLegConvention::TruncatedEncounter,
            phase_nodes: 16,
            encounter_split: 0.5,
            refinement_tolerance: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.su_cut > 0.0 && self.su_cut < 1.0) {
            return Err(Error::domain("su_cut must lie in (0, 1)"));
        }
        if self.su_grid < 16 || self.t_grid < 16 || self.phase_nodes < 16 {
            return Err(Error::domain("node counts must be at least 16"));
        }
        if !(self.encounter_split >= 0.0 && self.encounter_split <= 1.0) {
            return Err(Error::domain("encounter_split must lie in [0, 1]"));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(Error::domain("refinement_tolerance must be positive"));
        }
        Ok(())
    }
}

/// Contribution of one diagram to the loop-correction bracket.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramResult {
    pub value: f64,
    pub est_error: f64,
    pub imag: f64,
    /// Value at half the `su_grid`.
    pub coarse_value: f64,
    pub diagram: Diagram,
    pub t: f64,
    pub params: SemiclassicalParams,
    pub spec: QuadratureSpec,
}

impl DiagramResult {
    fn zero(diagram: Diagram, t: f64, params: &SemiclassicalParams, spec: &QuadratureSpec) -> Self {
        Self {
            value: 0.0,
            est_error: 0.0,
            imag: 0.0,
            coarse_value: 0.0,
            diagram,
            t,
            params: params.clone(),
            spec: spec.clone(),
        }
    }
}

/// Boundary-phase average of the transform over `k` in `[K - pi, K + pi]`,
/// `K = c^2/hbar`. The sharp edge `|su| = c^2` adds a term `sin(K) f(0)`
/// that oscillates in `K` at full strength; the average removes it while
/// leaving the smooth part. The transform is odd and entire in `k`, so the
/// window may extend below zero.
fn averaged(profile: &Profile, spec: &QuadratureSpec, su_grid: usize) -> Result<HalfLines> {
    let p = profile.params;
    let rule = Rule::new(su_grid)?;
    let phase = Rule::new(spec.phase_nodes)?;
    let big_k = p.c2 / p.hbar;
    let tau_max = profile.t.min(-spec.su_cut.ln() / p.lambda);
    let parts: Vec<HalfLines> = phase
        .nodes()
        .par_iter()
        .map(|&(x, _)| {
            let k = big_k + std::f64::consts::PI * x;
            match spec.oscillatory_method {
                OscillatoryMethod::Substitution1d => substitution::transform(profile, k, tau_max, &rule),
                OscillatoryMethod::Filon2d => filon::transform(profile, k, tau_max, &rule, 4 * su_grid),
            }
        })
        .collect();
    let mut out = HalfLines { re: 0.0, im: 0.0, abs: 0.0 };
    for (part, &(_, w)) in parts.iter().zip(phase.nodes()) {
        out.re += 0.5 * w * part.re;
        out.im += 0.5 * w * part.im;
        out.abs += 0.5 * w * part.abs;
    }
    Ok(out)
}

fn integrate_diagram(
    diagram: Diagram,
    params: &SemiclassicalParams,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<DiagramResult> {
    params.validate()?;
    spec.validate()?;
    if !(t > 0.0) {
        return Ok(DiagramResult::zero(diagram, t.max(0.0), params, spec));
    }
    let inner = Rule::new(spec.t_grid)?;
    let profile = Profile { params, t, diagram, split: spec.encounter_split, inner: &inner };
    let coarse = averaged(&profile, spec, spec.su_grid)?;
    let fine = averaged(&profile, spec, 2 * spec.su_grid)?;
    let diff = (fine.re - coarse.re).abs();
    let scale = fine.abs;
    if !(fine.re.is_finite() && coarse.re.is_finite()) || diff > spec.refinement_tolerance * scale {
        return Err(Error::numeric_with(
            "encounter integral did not converge under grid refinement",
            vec![("coarse", coarse.re), ("fine", fine.re), ("scale", scale), ("t", t)],
        ));
    }
    Ok(DiagramResult {
        value: fine.re,
        est_error: diff.max(64.0 * f64::EPSILON * scale),
        imag: fine.im,
        coarse_value: coarse.re,
        diagram,
        t,
        params: params.clone(),
        spec: spec.clone(),
    })
}

/// Two-leg diagram: encounter fully inside the trajectory. The `t'` and
/// `t_loop` integrals are elementary and done in closed form; the encounter
/// coordinates are integrated by `spec.oscillatory_method`.
pub fn integrate_2leg(params: &SemiclassicalParams, t: f64, spec: &QuadratureSpec) -> Result<DiagramResult> {
    integrate_diagram(Diagram::TwoLeg, params, t, spec)
}

/// One-leg diagrams (encounter cut by the start, and by the end), returned
/// as `(head, tail)`.
pub fn integrate_1leg(
    params: &SemiclassicalParams,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<(DiagramResult, DiagramResult)> {
    if spec.one_leg_convention == OneLegConvention::Excluded {
        spec.validate()?;
        return Ok((
            DiagramResult::zero(Diagram::OneLegHead, t, params, spec),
            DiagramResult::zero(Diagram::OneLegTail, t, params, spec),
        ));
    }
    Ok((
        integrate_diagram(Diagram::OneLegHead, params, t, spec)?,
        integrate_diagram(Diagram::OneLegTail, params, t, spec)?,
    ))
}
