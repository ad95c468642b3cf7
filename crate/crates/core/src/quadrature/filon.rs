//! Two-dimensional route over the scaled square `sigma = s/c`,
//! `upsilon = u/c` in `[0, 1]^2`:
//! `(lambda k / (pi T_H)) int dsigma int dupsilon cos(k sigma upsilon) f(tau) / (-ln(sigma upsilon))`
//! per half line of `su`, with `tau = -ln(sigma upsilon)/lambda`.
//!
//! The `upsilon` integral is done by the Filon-Simpson rule (piecewise
//! quadratic amplitude times the exact oscillation) on a mesh graded
//! geometrically in `z = -ln(sigma upsilon)`, which resolves the `1/z` growth
//! at the corner `sigma = upsilon = 1`. The `sigma` integral uses
//! Gauss-Legendre panels in `r`, with `-ln sigma = Z r^3` absorbing the
//! logarithmic endpoint singularity.

use super::integrand::Profile;
use super::rules::Rule;
use super::substitution::HalfLines;

const OUTER_PANELS: usize = 8;

/// `int_{-1}^{1} x^m cos(theta x) dx` for `m = 0, 2` and
/// `int_{-1}^{1} x sin(theta x) dx`.
fn moments(theta: f64) -> (f64, f64, f64) {
    if theta.abs() < 1.0 {
        // term n carries (-1)^n theta^{2n} / (2n)! resp. theta^{2n+1}/(2n+1)!
        let (mut c0, mut c2, mut s1) = (0.0, 0.0, 0.0);
        let mut even = 1.0;
        let mut odd = theta;
        for n in 0..12 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let m = 2 * n;
            c0 += sign * even * 2.0 / (m as f64 + 1.0);
            c2 += sign * even * 2.0 / (m as f64 + 3.0);
            s1 += sign * odd * 2.0 / (m as f64 + 3.0);
            even *= theta * theta / ((m + 1) * (m + 2)) as f64;
            odd *= theta * theta / ((m + 2) * (m + 3)) as f64;
        }
        (c0, c2, s1)
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        (
            2.0 * s / theta,
            2.0 * ((t2 - 2.0) * s + 2.0 * theta * c) / (t2 * theta),
            2.0 * (s - theta * c) / t2,
        )
    }
}

/// Filon-Simpson `(int A cos(w y), int A sin(w y))` over nodes `ys`
/// (ascending, odd count) with amplitudes `amp`.
fn filon(ys: &[f64], amp: &[f64], omega: f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    let mut i = 0;
    while i + 2 < ys.len() {
        let (a, m, b) = (ys[i], ys[i + 1], ys[i + 2]);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        if h > 0.0 {
            let xm = (m - c) / h;
            let (f0, f1, f2) = (amp[i], amp[i + 1], amp[i + 2]);
            // quadratic q0 + q1 x + q2 x^2 through (-1, f0), (xm, f1), (1, f2)
            let q1 = 0.5 * (f2 - f0);
            let mean = 0.5 * (f0 + f2);
            let q2 = (mean - f1 + q1 * xm) / (1.0 - xm * xm);
            let q0 = mean - q2;
            let (c0, c2, s1) = moments(omega * h);
            let even = q0 * c0 + q2 * c2;
            let odd = q1 * s1;
            let (sn, cs) = (omega * c).sin_cos();
            re += h * (cs * even - sn * odd);
            im += h * (sn * even + cs * odd);
        }
        i += 2;
    }
    (re, im)
}

pub(crate) fn transform(profile: &Profile, k: f64, tau_max: f64, rule: &Rule, inner_nodes: usize) -> HalfLines {
    let p = profile.params;
    let lambda = p.lambda;
    let z_max = lambda * tau_max;
    let pref = lambda * k / (std::f64::consts::PI * p.tau_heisenberg);
    let n_inner = 2 * (inner_nodes / 2).max(1);
    let (mut re, mut im, mut abs) = (0.0, 0.0, 0.0);
    let mut ys = vec![0.0; n_inner + 1];
    let mut amp = vec![0.0; n_inner + 1];
    for panel in 0..OUTER_PANELS {
        let r0 = panel as f64 / OUTER_PANELS as f64;
        let r1 = (panel + 1) as f64 / OUTER_PANELS as f64;
        let half = 0.5 * (r1 - r0);
        let mid = 0.5 * (r0 + r1);
        for &(x, w) in rule.nodes() {
            let r = mid + half * x;
            let zeta = z_max * r * r * r;
            let jac = 3.0 * z_max * r * r;
            let sigma = (-zeta).exp();
            // inner mesh, ascending in upsilon = e^{zeta - z}
            for j in 0..=n_inner {
                let z = zeta * (z_max / zeta).powf((n_inner - j) as f64 / n_inner as f64);
                ys[j] = (zeta - z).exp();
                amp[j] = profile.eval(z / lambda) / z;
            }
            ys[n_inner] = 1.0;
            let (cr, ci) = filon(&ys, &amp, k * sigma);
            let weight = w * half * jac * sigma;
            re += weight * cr;
            im += weight * ci;
            let plain: f64 = ys.windows(2).zip(amp.windows(2)).map(|(y, a)| 0.5 * (y[1] - y[0]) * (a[0].abs() + a[1].abs())).sum();
            abs += weight * plain;
        }
    }
    // the mirrored half line su < 0 reverses the phase
    let (neg_re, neg_im) = (re, -im);
    HalfLines { re: pref * (re + neg_re), im: pref * (im + neg_im), abs: 2.0 * pref.abs() * abs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_branches_agree() {
        let a = moments(0.999_999_999);
        let b = moments(1.000_000_001);
        assert!((a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-8 && (a.2 - b.2).abs() < 1e-8);
        let (c0, c2, s1) = moments(0.0);
        assert_eq!((c0, c2, s1), (2.0, 2.0 / 3.0, 0.0));
    }

    #[test]
    fn filon_is_exact_for_quadratics() {
        // int_0^2 (1 + y^2) cos(5 y) dy on an uneven three-point mesh
        let ys = [0.0, 0.7, 2.0];
        let amp: Vec<f64> = ys.iter().map(|y| 1.0 + y * y).collect();
        let (re, im) = filon(&ys, &amp, 5.0);
        let exact_re = {
            let f = |y: f64| (1.0 + y * y) * (5.0 * y).sin() / 5.0 + 2.0 * y * (5.0 * y).cos() / 25.0
                - 2.0 * (5.0 * y).sin() / 125.0;
            f(2.0) - f(0.0)
        };
        let exact_im = {
            let f = |y: f64| -(1.0 + y * y) * (5.0 * y).cos() / 5.0 + 2.0 * y * (5.0 * y).sin() / 25.0
                + 2.0 * (5.0 * y).cos() / 125.0;
            f(2.0) - f(0.0)
        };
        assert!((re - exact_re).abs() < 1e-13, "{re} {exact_re}");
        assert!((im - exact_im).abs() < 1e-13, "{im} {exact_im}");
    }
}
