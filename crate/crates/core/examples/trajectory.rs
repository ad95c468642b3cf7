//! A single cardioid trajectory: wall hits up to escape through the opening.

use chaodecay::geometry::{propagate, CavityGeometry, PhasePoint, Shape, Vec2};

fn main() -> chaodecay::Result<()> {
    let cavity = CavityGeometry::with_default_opening(Shape::Cardioid, 1.0, 0.4)?;
    let start = PhasePoint::new(Vec2::new(0.8, 0.1), Vec2::from_angle(0.3));
    let traj = propagate(&cavity, &start, 500.0, 0.5, true)?;

    println!("{:>10} {:>10} {:>10} {:>8}", "t", "s", "|p|", "grazing");
    for c in traj.collisions.iter().take(12) {
        println!("{:10.4} {:10.4} {:10.3e} {:>8}", c.time, c.arclength, c.outgoing.norm(), c.grazing);
    }
    match traj.escape_time {
        Some(t) => println!("escaped at t = {t:.3} after {} bounces", traj.collisions.len()),
        None => println!("still inside at t = {}", traj.total_time),
    }
    Ok(())
}
