//! One-dimensional route. With `x = su` the density of `x` over the square
//! `|s|, |u| <= c` is `2 ln(c^2/|x|) = 2 lambda t_enc`, which cancels the
//! `1/t_enc` of the integrand. Writing `x = c^2 e^{-lambda tau}` gives, for
//! each half line of `x`,
//! `(lambda^2 k / (pi T_H)) int cos(k e^{-lambda tau}) e^{-lambda tau} f(tau) dtau`
//! with `k = c^2/hbar` and `f` the time-integrated diagram weight.

use super::integrand::Profile;
use super::rules::Rule;

/// Real and imaginary parts of the transform at phase scale `k`, and the
/// same integral with `|cos|` for scale.
pub(crate) struct HalfLines {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

/// Panel breakpoints in `tau`: the oscillation nodes `k e^{-lambda tau} = j pi`,
/// the profile kinks, and a uniform split of width at most `1/lambda`.
fn breakpoints(k: f64, lambda: f64, tau_max: f64, kinks: &[f64]) -> Vec<f64> {
    let mut pts = vec![0.0, tau_max];
    let mut j = 1.0;
    while j * std::f64::consts::PI < k.abs() {
        let tau = (k.abs() / (j * std::f64::consts::PI)).ln() / lambda;
        if tau < tau_max {
            pts.push(tau);
        }
        j += 1.0;
    }
    pts.extend(kinks.iter().copied().filter(|&x| x > 0.0 && x < tau_max));
    let n_uniform = (tau_max * lambda).ceil() as usize;
    for i in 1..n_uniform {
        pts.push(tau_max * i as f64 / n_uniform as f64);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * tau_max);
    pts
}

pub(crate) fn transform(profile: &Profile, k: f64, tau_max: f64, rule: &Rule) -> HalfLines {
    let p = profile.params;
    let lambda = p.lambda;
    let pts = breakpoints(k, lambda, tau_max, &profile.kinks());
    let pref = lambda * lambda * k / (std::f64::consts::PI * p.tau_heisenberg);
    let (mut pos_re, mut pos_im, mut neg_re, mut neg_im, mut abs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for &(x, wt) in rule.nodes() {
            let tau = mid + half * x;
            let decay = (-lambda * tau).exp();
            let amp = wt * half * decay * profile.eval(tau);
            let phase = k * decay;
            let (sin, cos) = phase.sin_cos();
            pos_re += amp * cos;
            pos_im += amp * sin;
            // mirrored half line x < 0
            neg_re += amp * (-phase).cos();
            neg_im += amp * (-phase).sin();
            abs += amp.abs();
        }
    }
    HalfLines { re: pref * (pos_re + neg_re), im: pref * (pos_im + neg_im), abs: 2.0 * pref.abs() * abs }
}
