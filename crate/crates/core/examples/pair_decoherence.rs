//! Growth of the decoherence exponent for uncorrelated trajectory pairs:
//! the slope in time approaches `2 alpha sigma^2`.

use chaodecay::ensemble::{pair_decoherence_curve, position_variance, EnsembleSpec};
use chaodecay::geometry::{CavityGeometry, Shape};

fn main() -> chaodecay::Result<()> {
    let cavity = CavityGeometry::closed(Shape::Cardioid, 1.0)?;
    let sigma2 = position_variance(&cavity, &EnsembleSpec::new(50_000, 2, 1.0))?.sigma2_area;
    let alpha = 0.5;
    let tau = cavity.mean_free_path();
    let times: Vec<f64> = (1..=10).map(|k| 5.0 * k as f64 * tau).collect();
    let curve = pair_decoherence_curve(&cavity, &EnsembleSpec::new(200, 9, 1.0), alpha, tau / 16.0, &times)?;
    println!("2 sigma^2 = {:.4}", 2.0 * sigma2);
    for p in curve {
        println!("t = {:7.2}  exponent/(alpha t) = {:.4} +- {:.4}", p.t, p.exponent / (alpha * p.t), p.std_error / (alpha * p.t));
    }
    Ok(())
}
