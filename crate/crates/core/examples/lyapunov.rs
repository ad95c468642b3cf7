//! Largest Lyapunov exponent of the three billiard shapes.

use chaodecay::ensemble::{estimate_lyapunov, EnsembleSpec};
use chaodecay::geometry::{CavityGeometry, Shape};

fn main() -> chaodecay::Result<()> {
    let spec = EnsembleSpec::new(200, 3, 1.0);
    for (name, shape) in [
        ("circle", Shape::Circle),
        ("stadium", Shape::Stadium { half_length: 1.0 }),
        ("cardioid", Shape::Cardioid),
    ] {
        let cavity = CavityGeometry::closed(shape, 1.0)?;
        let est = estimate_lyapunov(&cavity, &spec, 1000.0 * cavity.mean_free_path())?;
        println!("{name:<9} lambda = {:.4} +- {:.4} (half-time {:.4})", est.lambda, est.std_error, est.lambda_half);
    }
    Ok(())
}
