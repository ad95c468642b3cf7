use chaodecay::ensemble::{estimate_lyapunov, EnsembleSpec};
use chaodecay::geometry::{CavityGeometry, Shape};

#[test]
fn lyapunov_exponent_scales_with_speed_over_size() {
    let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
    let big = g.rescaled(2.5).unwrap();
    let base = estimate_lyapunov(&g, &EnsembleSpec::new(100, 4, 1.0), 400.0).unwrap();
    let scaled = estimate_lyapunov(&big, &EnsembleSpec::new(100, 4, 3.0), 400.0 * 2.5 / 3.0).unwrap();
    let expect = base.lambda * 3.0 / 2.5;
    let err = (base.std_error * 3.0 / 2.5).hypot(scaled.std_error);
    assert!((scaled.lambda - expect).abs() <= 3.0 * err, "{} vs {expect} +- {err}", scaled.lambda);
}

#[test]
fn stadium_is_chaotic_and_circle_is_not() {
    let spec = EnsembleSpec::new(100, 8, 1.0);
    let stadium = CavityGeometry::closed(Shape::Stadium { half_length: 1.0 }, 1.0).unwrap();
    let circle = CavityGeometry::closed(Shape::Circle, 1.0).unwrap();
    let s = estimate_lyapunov(&stadium, &spec, 500.0).unwrap();
    let c = estimate_lyapunov(&circle, &spec, 500.0).unwrap();
    assert!(s.lambda > 10.0 * s.std_error, "{s:?}");
    assert!(c.lambda.abs() <= 3.0 * c.std_error, "{c:?}");
}
