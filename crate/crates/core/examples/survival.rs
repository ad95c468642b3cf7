//! Monte Carlo survival in an open cardioid against the classical law
//! `exp(-t/tau_D)` with `tau_D = pi A / (l v)`.

use std::f64::consts::PI;

use chaodecay::ensemble::{fit_escape_rate, hybrid_grid, survival_curve, EnsembleSpec};
use chaodecay::geometry::{CavityGeometry, Shape};

fn main() -> chaodecay::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let lambda = 0.354;
    for l in [0.5, 0.25, 0.125] {
        let cavity = CavityGeometry::with_default_opening(Shape::Cardioid, 1.0, l)?;
        let tau_d = PI * cavity.area() / l;
        let times = hybrid_grid(2.0 / lambda, 5.0 * tau_d, 30, 200)?;
        let curve = survival_curve(&cavity, &EnsembleSpec::new(n, 1, 1.0), &times)?;
        let fit = fit_escape_rate(&curve, (2.0 / lambda, 4.0 * tau_d))?;
        println!(
            "l = {l:<6} tau_D = {tau_d:8.2}  fitted rate * tau_D = {:.4} +- {:.4}",
            fit.rate * tau_d,
            fit.std_error * tau_d
        );
    }
    Ok(())
}
