//! Position variance over the area against the time average along one orbit.

use chaodecay::ensemble::{position_variance, EnsembleSpec};
use chaodecay::geometry::{CavityGeometry, Shape};

fn main() -> chaodecay::Result<()> {
    let spec = EnsembleSpec::new(50_000, 11, 1.0);
    for (name, shape) in [("circle", Shape::Circle), ("cardioid", Shape::Cardioid)] {
        let v = position_variance(&CavityGeometry::closed(shape, 1.0)?, &spec)?;
        println!(
            "{name:<9} area {:.4} +- {:.4}  time {:.4}  rel diff {:.3}{}",
            v.sigma2_area,
            v.sigma2_area_std_error,
            v.sigma2_time,
            v.rel_diff,
            if v.ergodic_warning { "  (not ergodic)" } else { "" }
        );
    }
    Ok(())
}
