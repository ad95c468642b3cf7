//! Real-root isolation for the low-degree polynomials that arise when a ray
//! is intersected with an algebraic boundary curve.
//!
//! Roots are isolated recursively: the real roots of the derivative split the
//! search interval into pieces on which the polynomial is monotone, and every
//! piece with a sign change holds exactly one root, found by safeguarded
//! bisection. Tangential contacts (even-multiplicity roots) have no sign change
//! and are not reported.

/// Polynomial in ascending-power coefficient order.
pub(crate) fn eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 1 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// Root of a function that is monotone on `[lo, hi]` with `f(lo)` and `f(hi)`
/// of opposite sign.
fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(coeffs, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-changing real roots inside the open interval `(lo, hi)`, ascending.
pub(crate) fn sign_change_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let coeffs = trimmed(coeffs);
    match coeffs.len() {
        0 | 1 => Vec::new(),
        2 => {
            let r = -coeffs[0] / coeffs[1];
            if r > lo && r < hi {
                vec![r]
            } else {
                Vec::new()
            }
        }
        _ => {
            let mut knots = vec![lo];
            knots.extend(critical_points(coeffs, lo, hi));
            knots.push(hi);
            let mut roots = Vec::new();
            for w in knots.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (fa, fb) = (eval(coeffs, a), eval(coeffs, b));
                if fa == 0.0 || fb == 0.0 {
                    continue;
                }
                if (fa < 0.0) != (fb < 0.0) {
                    roots.push(bisect(coeffs, a, b, fa));
                }
            }
            roots
        }
    }
}

/// All real roots of the derivative inside `(lo, hi)`, including
/// even-multiplicity ones, as monotonicity breakpoints.
fn critical_points(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let d = derivative(coeffs);
    let d = trimmed(&d);
    if d.len() == 3 {
        // Quadratic derivative: closed form keeps double roots.
        let (c, b, a) = (d[0], d[1], d[2]);
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let mut r = [q / a, if q != 0.0 { c / q } else { q / a }];
        r.sort_by(f64::total_cmp);
        return r.into_iter().filter(|&x| x > lo && x < hi).collect();
    }
    let mut pts = sign_change_roots(d, lo, hi);
    // Even-multiplicity roots of the derivative are not breakpoints of
    // monotonicity, so dropping them is harmless.
    pts.dedup();
    pts
}
