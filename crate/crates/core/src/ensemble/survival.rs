use rayon::prelude::*;
use serde::Serialize;

use super::sampling::{sample_one, EnsembleSpec};
use crate::error::{Error, Result};
use crate::geometry::{escape_time, CavityGeometry};

/// Fraction of an ensemble still inside an open cavity, on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    /// Binomial error `sqrt(s (1 - s) / N)`.
    pub std_error: Vec<f64>,
    pub n_samples: usize,
    pub geometry_hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EscapeFit {
    pub rate: f64,
    pub std_error: f64,
    pub n_points: usize,
    pub window: (f64, f64),
}

/// `0`, then `n_geometric` log-spaced times up to `t_transient`, then
/// `n_linear` evenly spaced times from `t_transient` to `t_max`.
pub fn hybrid_grid(t_transient: f64, t_max: f64, n_geometric: usize, n_linear: usize) -> Result<Vec<f64>> {
    if !(t_transient > 0.0 && t_max > t_transient) {
        return Err(Error::domain("hybrid grid requires 0 < t_transient < t_max"));
    }
    let mut grid = vec![0.0];
    let first = t_transient * 1e-2;
    for k in 0..n_geometric {
        let f = if n_geometric == 1 { 1.0 } else { k as f64 / (n_geometric - 1) as f64 };
        grid.push(first * (t_transient / first).powf(f));
    }
    for k in 1..=n_linear {
        grid.push(t_transient + (t_max - t_transient) * k as f64 / n_linear as f64);
    }
    grid.dedup();
    Ok(grid)
}

/// Stable 64-bit FNV-1a digest of the serialized geometry.
pub(crate) fn geometry_hash(geometry: &CavityGeometry) -> String {
    let json = serde_json::to_string(geometry).expect("geometry serializes");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in json.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Survival curve from per-trajectory escape times (`None` = never escaped
/// within the grid).
pub fn survival_from_escape_times(
    times: &[f64],
    escapes: &[Option<f64>],
    geometry_hash: String,
) -> Result<SurvivalCurve> {
    if escapes.is_empty() {
        return Err(Error::statistics("empty ensemble"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_none_or(|&t| t < 0.0) {
        return Err(Error::domain("time grid must be non-negative and strictly increasing"));
    }
    let mut sorted: Vec<f64> = escapes.iter().flatten().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let n = escapes.len();
    let nf = n as f64;
    let mut survival = Vec::with_capacity(times.len());
    let mut std_error = Vec::with_capacity(times.len());
    for &t in times {
        let escaped = sorted.partition_point(|&te| te <= t);
        let s = (n - escaped) as f64 / nf;
        survival.push(s);
        std_error.push((s * (1.0 - s) / nf).sqrt());
    }
    Ok(SurvivalCurve { times: times.to_vec(), survival, std_error, n_samples: n, geometry_hash })
}

/// Monte Carlo survival curve of `spec` in the open `geometry`.
pub fn survival_curve(geometry: &CavityGeometry, spec: &EnsembleSpec, times: &[f64]) -> Result<SurvivalCurve> {
    spec.validate()?;
    let t_max = *times.last().ok_or_else(|| Error::domain("empty time grid"))?;
    let escapes: Vec<Option<f64>> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let (p, _) = sample_one(geometry, spec, i)?;
            escape_time(geometry, &p, t_max)
        })
        .collect::<Result<_>>()?;
    survival_from_escape_times(times, &escapes, geometry_hash(geometry))
}

/// Weighted least-squares slope of `ln s(t)` over `window`, using only points
/// with `s > 10 / N`. The error is the covariance estimate, inflated by the
/// reduced chi-square when that exceeds one.
pub fn fit_escape_rate(curve: &SurvivalCurve, window: (f64, f64)) -> Result<EscapeFit> {
    let nf = curve.n_samples as f64;
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::domain("fit window must satisfy t0 < t1"));
    }
    let mut pts = Vec::new();
    for (&t, &s) in curve.times.iter().zip(&curve.survival) {
        if t >= t0 && t <= t1 && s > 10.0 / nf {
            // delta-method variance of ln s, floored so s = 1 stays finite
            let var = (1.0 - s + 1.0 / nf) / (nf * s);
            pts.push((t, s.ln(), 1.0 / var));
        }
    }
    if pts.len() < 10 {
        return Err(Error::statistics(format!(
            "only {} usable grid points in window [{t0}, {t1}], need 10",
            pts.len()
        )));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let tm = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ym = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - tm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let chi2: f64 = pts.iter().map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = (pts.len() - 2) as f64;
    let inflation = (chi2 / dof).max(1.0);
    Ok(EscapeFit {
        rate: -slope,
        std_error: (inflation / sxx).sqrt(),
        n_points: pts.len(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand::distributions::Distribution;

    use super::*;
    use crate::geometry::Shape;

    fn synthetic(n: usize, exact: bool) -> SurvivalCurve {
        let times: Vec<f64> = (0..60).map(|k| k as f64 * 0.25).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let survival = times
            .iter()
            .map(|t| {
                let p = (-t / 3.0f64).exp();
                if exact {
                    p
                } else {
                    rand::distributions::Bernoulli::new(p)
                        .map(|b| (0..n).filter(|_| b.sample(&mut rng)).count() as f64 / n as f64)
                        .unwrap()
                }
            })
            .collect::<Vec<_>>();
        let std_error = survival.iter().map(|s| (s * (1.0 - s) / n as f64).sqrt()).collect();
        SurvivalCurve { times, survival, std_error, n_samples: n, geometry_hash: String::new() }
    }

    #[test]
    fn exact_exponential_gives_exact_rate() {
        let fit = fit_escape_rate(&synthetic(100_000, true), (0.0, 15.0)).unwrap();
        assert!((fit.rate - 1.0 / 3.0).abs() < 1e-12, "{fit:?}");
    }

    #[test]
    fn binomial_draws_give_rate_within_three_errors() {
        let fit = fit_escape_rate(&synthetic(100_000, false), (0.0, 15.0)).unwrap();
        assert!((fit.rate - 1.0 / 3.0).abs() < 3.0 * fit.std_error, "{fit:?}");
    }

    #[test]
    fn too_few_points_is_a_statistics_error() {
        let r = fit_escape_rate(&synthetic(100, true), (0.0, 2.0));
        assert!(matches!(r, Err(Error::Statistics(_))));
    }

    #[test]
    fn curve_from_escape_times_is_monotone_and_starts_at_one() {
        let times = [0.0, 1.0, 2.0, 3.0];
        let c = survival_from_escape_times(&times, &[Some(0.5), Some(2.0), None, Some(2.5)], "x".into()).unwrap();
        assert_eq!(c.survival, vec![1.0, 0.75, 0.5, 0.25]);
        assert!((c.std_error[1] - (0.75f64 * 0.25 / 4.0).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn fully_open_cavity_empties_within_one_flight() {
        let g = CavityGeometry::new(Shape::Circle, 1.0, 0.0, std::f64::consts::TAU).unwrap();
        let spec = EnsembleSpec::new(2000, 5, 1.0);
        let c = survival_curve(&g, &spec, &[0.0, 1e-3, 2.0, 3.0]).unwrap();
        assert_eq!(c.survival[0], 1.0);
        assert_eq!(c.survival[2], 0.0);
    }

    #[test]
    fn hybrid_grid_is_increasing() {
        let g = hybrid_grid(3.0, 100.0, 20, 50).unwrap();
        assert_eq!(g[0], 0.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g.last().unwrap() - 100.0).abs() < 1e-12);
    }
}
