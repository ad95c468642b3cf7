use std::f64::consts::PI;

use chaodecay::ensemble::{
    decoherence_functional, decoherence_integral, sample_ensemble, survival_from_escape_times, EnsembleSpec,
};
use chaodecay::formulas::{loop_correction, SemiclassicalParams};
use chaodecay::geometry::{next_collision, propagate, CavityGeometry, PhasePoint, Shape, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Circle),
        Just(Shape::Cardioid),
        (0.1f64..2.0).prop_map(|h| Shape::Stadium { half_length: h }),
    ]
}

fn state_in(geometry: &CavityGeometry, seed: u64) -> PhasePoint {
    let spec = EnsembleSpec::new(1, seed, 1.0);
    sample_ensemble(geometry, &spec).unwrap()[0]
}

/// Ray against the polygon through `n` boundary points: the smallest positive
/// crossing distance.
fn polygon_exit(geometry: &CavityGeometry, origin: Vec2, dir: Vec2, n: usize) -> f64 {
    let p = geometry.perimeter();
    let pts: Vec<Vec2> = (0..n).map(|k| geometry.boundary_point(p * k as f64 / n as f64).unwrap().0).collect();
    let mut best = f64::INFINITY;
    for k in 0..n {
        let (a, b) = (pts[k], pts[(k + 1) % n]);
        let e = b - a;
        let denom = dir.cross(e);
        if denom.abs() < 1e-300 {
            continue;
        }
        let w = a - origin;
        let t = w.cross(e) / denom;
        let u = w.cross(dir) / denom;
        if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            best = best.min(t);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn speed_is_conserved_and_samples_stay_inside(shape in shape(), scale in 0.5f64..3.0, seed in any::<u64>()) {
        let g = CavityGeometry::closed(shape, scale).unwrap();
        let start = state_in(&g, seed);
        let traj = propagate(&g, &start, 40.0 * scale, 0.1 * scale, false).unwrap();
        for c in &traj.collisions {
            prop_assert!((c.outgoing.norm() - c.incoming.norm()).abs() < 1e-12);
            prop_assert!(g.signed_distance(c.point).abs() < 1e-9 * scale);
        }
        for s in &traj.samples {
            prop_assert!((s.momentum.norm() - 1.0).abs() < 1e-12);
            prop_assert!(g.signed_distance(s.position) >= -1e-9 * scale);
        }
    }

    #[test]
    fn wall_hits_match_an_inscribed_polygon(shape in shape(), seed in any::<u64>()) {
        let g = CavityGeometry::closed(shape, 1.0).unwrap();
        let s = state_in(&g, seed);
        let (t, _) = next_collision(&g, &s).unwrap();
        let poly = polygon_exit(&g, s.position, s.momentum, 20_000);
        prop_assert!((t - poly).abs() < 1e-6, "exact {t} polygon {poly}");
    }

    #[test]
    fn circle_hits_match_the_chord_formula(seed in any::<u64>(), radius in 0.3f64..5.0) {
        let g = CavityGeometry::closed(Shape::Circle, radius).unwrap();
        let s = state_in(&g, seed);
        let b = s.position.dot(s.momentum);
        let c = s.position.norm_sq() - radius * radius;
        let chord = -b + (b * b - c).sqrt();
        let (t, _) = next_collision(&g, &s).unwrap();
        prop_assert!((t - chord).abs() <= 1e-12 * radius.max(1.0), "{t} {chord}");
    }

    #[test]
    fn survival_is_monotone_and_bounded(escapes in prop::collection::vec(prop::option::of(0.0f64..10.0), 1..200)) {
        let times: Vec<f64> = (0..50).map(|k| 0.2 * k as f64).collect();
        let curve = survival_from_escape_times(&times, &escapes, String::new()).unwrap();
        prop_assert_eq!(curve.survival[0], 1.0 - escapes.iter().filter(|e| **e == Some(0.0)).count() as f64 / escapes.len() as f64);
        for w in curve.survival.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(curve.survival.iter().all(|s| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn decoherence_is_symmetric_and_additive(sa in any::<u64>(), sb in any::<u64>(), t1 in 0.5f64..5.0, t2 in 5.0f64..9.0) {
        let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
        let a = propagate(&g, &state_in(&g, sa), 10.0, 0.05, false).unwrap();
        let b = propagate(&g, &state_in(&g, sb), 10.0, 0.05, false).unwrap();
        let ab = decoherence_functional(&a, &b, 0.7, t2).unwrap();
        let ba = decoherence_functional(&b, &a, 0.7, t2).unwrap();
        prop_assert_eq!(ab, ba);
        let split = decoherence_integral(&a, &b, 0.7, 0.0, t1).unwrap() + decoherence_integral(&a, &b, 0.7, t1, t2).unwrap();
        prop_assert!((split - ab).abs() <= 1e-12 * ab.abs().max(1e-300), "{split} {ab}");
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn bracket_is_positive_and_grows_with_decoherence_time(
        tau_dwell in 0.05f64..3.0,
        td1 in 0.01f64..10.0,
        factor in 1.01f64..100.0,
        x in 1e-3f64..10.0,
    ) {
        let t = x * tau_dwell;
        let lo = loop_correction(&SemiclassicalParams::from_times(tau_dwell, 1.0, td1), t);
        let hi = loop_correction(&SemiclassicalParams::from_times(tau_dwell, 1.0, td1 * factor), t);
        let reference = loop_correction(&SemiclassicalParams::from_times(tau_dwell, 1.0, f64::INFINITY), t);
        prop_assert!(lo > 0.0);
        prop_assert!(lo < hi && hi < reference, "{lo} {hi} {reference}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cardioid_trajectories_retrace_under_time_reversal(seed in any::<u64>()) {
        let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
        let start = state_in(&g, seed);
        // 10 / lambda with lambda ~ 0.35
        let horizon = 28.0;
        let fwd = propagate(&g, &start, horizon, horizon, false).unwrap();
        let mut back_start = fwd.final_state;
        back_start.momentum = back_start.momentum * -1.0;
        let back = propagate(&g, &back_start, horizon, horizon, false).unwrap();
        let err = (back.final_state.position - start.position).norm();
        prop_assert!(err < 1e-6, "return error {err}");
    }
}

#[test]
fn containment_test_reproduces_the_cardioid_area() {
    let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
    let (lo, hi) = g.bounding_box();
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 400_000;
    let inside = (0..n)
        .filter(|_| g.contains(Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y))))
        .count() as f64;
    let f = inside / n as f64;
    let err = (f * (1.0 - f) / n as f64).sqrt() * box_area;
    assert!((f * box_area - 1.5 * PI).abs() < 4.0 * err, "{} vs {}", f * box_area, 1.5 * PI);
}
