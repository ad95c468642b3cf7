use serde::Serialize;

use super::{CavityGeometry, Hit, Piece, Vec2};
use crate::error::{Error, Result};

/// Incidence cosines below this are grazing: the reflection is still
/// applied (it is continuous there) but the event is flagged.
const GRAZING_COS: f64 = 1e-12;

/// Position and momentum of a unit-mass particle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub position: Vec2,
    pub momentum: Vec2,
}

impl PhasePoint {
    pub fn new(position: Vec2, momentum: Vec2) -> Self {
        Self { position, momentum }
    }

    pub fn speed(&self) -> f64 {
        self.momentum.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Sample,
    Collision,
    Escape,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Collision {
    pub time: f64,
    pub arclength: f64,
    pub point: Vec2,
    pub incoming: Vec2,
    pub outgoing: Vec2,
    pub grazing: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sample {
    pub time: f64,
    pub position: Vec2,
    pub momentum: Vec2,
}

/// One classical path: collision log plus positions on a uniform time grid.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub initial: PhasePoint,
    pub collisions: Vec<Collision>,
    pub dt: f64,
    /// `samples[k]` is the state at time `k * dt`.
    pub samples: Vec<Sample>,
    pub escape_time: Option<f64>,
    pub total_time: f64,
    pub final_state: PhasePoint,
}

impl Trajectory {
    pub fn positions(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.samples.iter().map(|s| s.position)
    }

    /// Chronological event stream for CSV dumps.
    pub fn events(&self) -> Vec<(f64, Vec2, Vec2, EventKind)> {
        let mut out: Vec<(f64, Vec2, Vec2, EventKind)> = self
            .samples
            .iter()
            .map(|s| (s.time, s.position, s.momentum, EventKind::Sample))
            .collect();
        let speed = self.initial.speed();
        for (k, c) in self.collisions.iter().enumerate() {
            let escaped = self.escape_time.is_some() && k + 1 == self.collisions.len();
            let kind = if escaped { EventKind::Escape } else { EventKind::Collision };
            let mom = if escaped { c.incoming } else { c.outgoing } * speed;
            out.push((c.time, c.point, mom, kind));
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

/// Specular image of `incoming` about the line with unit normal `normal`.
pub fn reflect(incoming: Vec2, normal: Vec2) -> Result<Vec2> {
    const UNIT_TOL: f64 = 1e-12;
    if (incoming.norm() - 1.0).abs() > UNIT_TOL || (normal.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::domain("reflect expects unit vectors"));
    }
    Ok(specular(incoming, normal))
}

#[inline]
fn specular(incoming: Vec2, normal: Vec2) -> Vec2 {
    incoming - normal * (2.0 * incoming.dot(normal))
}

/// Flight time to, and arclength of, the next wall hit from a point strictly
/// inside the cavity.
pub fn next_collision(geometry: &CavityGeometry, state: &PhasePoint) -> Result<(f64, f64)> {
    if !geometry.contains(state.position) {
        return Err(Error::domain(format!(
            "start point ({}, {}) is not inside the cavity",
            state.position.x, state.position.y
        )));
    }
    let speed = state.speed();
    if !(speed > 0.0) {
        return Err(Error::domain("momentum must be non-zero"));
    }
    let hit = geometry.exit(state.position, state.momentum / speed, None)?;
    Ok((hit.distance / speed, hit.arclength))
}

/// Particle moving at constant speed inside a cavity. Tracks the wall piece
/// it currently sits on so the next ray cast can skip the trivial root.
#[derive(Clone, Debug)]
pub struct Particle {
    pub position: Vec2,
    /// Unit direction of motion.
    pub direction: Vec2,
    pub speed: f64,
    pub time: f64,
    on: Option<Piece>,
    pending: Option<Hit>,
}

impl Particle {
    pub fn new(state: &PhasePoint) -> Result<Self> {
        let speed = state.speed();
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::domain("momentum must be non-zero and finite"));
        }
        Ok(Self {
            position: state.position,
            direction: state.momentum / speed,
            speed,
            time: 0.0,
            on: None,
            pending: None,
        })
    }

    pub fn state(&self) -> PhasePoint {
        PhasePoint::new(self.position, self.direction * self.speed)
    }

    fn upcoming(&mut self, geometry: &CavityGeometry) -> Result<Hit> {
        if let Some(h) = self.pending {
            return Ok(h);
        }
        let h = geometry.exit(self.position, self.direction, self.on)?;
        self.pending = Some(h);
        Ok(h)
    }

    /// Time until the next wall hit.
    pub fn time_to_wall(&mut self, geometry: &CavityGeometry) -> Result<f64> {
        Ok(self.upcoming(geometry)?.distance / self.speed)
    }

    /// Moves to the next wall and reflects. Returns the collision record;
    /// when `absorb` is set and the hit point is in the opening, the particle
    /// stays on the wall with its incoming direction and `true` is returned.
    pub fn bounce(&mut self, geometry: &CavityGeometry, absorb: bool) -> Result<(Collision, bool)> {
        let hit = self.upcoming(geometry)?;
        self.pending = None;
        self.time += hit.distance / self.speed;
        self.position = hit.point;
        let incoming = self.direction;
        let escaped = absorb && geometry.in_opening(hit.arclength);
        let cos = incoming.dot(hit.inward_normal);
        let outgoing = if escaped {
            incoming
        } else {
            let out = specular(incoming, hit.inward_normal);
            out / out.norm()
        };
        self.direction = outgoing;
        self.on = Some(hit.piece);
        let collision = Collision {
            time: self.time,
            arclength: hit.arclength,
            point: hit.point,
            incoming,
            outgoing,
            grazing: cos.abs() < GRAZING_COS,
        };
        Ok((collision, escaped))
    }

    /// Free flight for `dt`, which must not reach the next wall.
    pub fn drift(&mut self, dt: f64) {
        if dt <= 0.0 {
            return;
        }
        self.position += self.direction * (self.speed * dt);
        self.time += dt;
        self.on = None;
        if let Some(h) = self.pending.as_mut() {
            h.distance -= self.speed * dt;
        }
    }

    /// Advances to absolute time `t` in a closed cavity, reflecting at walls.
    pub fn advance_to(&mut self, geometry: &CavityGeometry, t: f64) -> Result<()> {
        loop {
            let to_wall = self.time_to_wall(geometry)?;
            if self.time + to_wall > t {
                self.drift(t - self.time);
                return Ok(());
            }
            self.bounce(geometry, false)?;
        }
    }
}

/// Integrates one trajectory up to `t_max` (or escape when `open`), recording
/// every collision and the state at each multiple of `dt`.
pub fn propagate(
    geometry: &CavityGeometry,
    initial: &PhasePoint,
    t_max: f64,
    dt: f64,
    open: bool,
) -> Result<Trajectory> {
    if !(t_max > 0.0) || !(dt > 0.0) {
        return Err(Error::domain("t_max and dt must be positive"));
    }
    if !geometry.contains(initial.position) {
        return Err(Error::domain("initial point is not inside the cavity"));
    }
    let mut particle = Particle::new(initial)?;
    let mut collisions = Vec::new();
    let mut samples = Vec::new();
    let mut escape_time = None;
    let mut k = 0usize;
    // Sample grid times are k * dt, computed by multiplication to avoid drift.
    let mut next_sample = 0.0;
    loop {
        let wall_at = particle.time + particle.time_to_wall(geometry)?;
        while next_sample <= t_max && next_sample <= wall_at {
            particle.drift(next_sample - particle.time);
            samples.push(Sample {
                time: next_sample,
                position: particle.position,
                momentum: particle.direction * particle.speed,
            });
            k += 1;
            next_sample = k as f64 * dt;
        }
        if wall_at > t_max {
            particle.drift(t_max - particle.time);
            break;
        }
        let (c, escaped) = particle.bounce(geometry, open)?;
        collisions.push(c);
        if escaped {
            escape_time = Some(c.time);
            break;
        }
    }
    Ok(Trajectory {
        initial: *initial,
        collisions,
        dt,
        samples,
        escape_time,
        total_time: particle.time,
        final_state: particle.state(),
    })
}

/// Escape time without bookkeeping, `None` if still inside at `t_max`.
pub(crate) fn escape_time(geometry: &CavityGeometry, initial: &PhasePoint, t_max: f64) -> Result<Option<f64>> {
    let mut particle = Particle::new(initial)?;
    loop {
        let to_wall = particle.time_to_wall(geometry)?;
        if particle.time + to_wall > t_max {
            return Ok(None);
        }
        let (c, escaped) = particle.bounce(geometry, true)?;
        if escaped {
            return Ok(Some(c.time));
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::geometry::Shape;

    fn circle() -> CavityGeometry {
        CavityGeometry::closed(Shape::Circle, 1.0).unwrap()
    }

    #[test]
    fn reflection_examples() {
        let n = Vec2::new(1.0, 0.0);
        assert_eq!(reflect(Vec2::new(-1.0, 0.0), n).unwrap(), Vec2::new(1.0, 0.0));
        assert_eq!(reflect(Vec2::new(0.0, 1.0), n).unwrap(), Vec2::new(0.0, 1.0));
        let r = reflect(Vec2::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2), n).unwrap();
        assert!((r - Vec2::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(reflect(Vec2::new(2.0, 0.0), n).is_err());
    }

    #[test]
    fn radial_chord_in_unit_circle() {
        let v = 2.5;
        let s = PhasePoint::new(Vec2::ZERO, Vec2::new(v, 0.0));
        let (t, arc) = next_collision(&circle(), &s).unwrap();
        assert!((t - 1.0 / v).abs() < 1e-15);
        assert!(arc.abs() < 1e-15);
    }

    #[test]
    fn off_centre_vertical_chord() {
        let s = PhasePoint::new(Vec2::new(0.5, 0.0), Vec2::new(0.0, 1.0));
        let (t, arc) = next_collision(&circle(), &s).unwrap();
        assert!((t - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((arc - 0.75f64.sqrt().atan2(0.5)).abs() < 1e-15);
    }

    #[test]
    fn outside_start_is_rejected() {
        let s = PhasePoint::new(Vec2::new(1.5, 0.0), Vec2::new(0.0, 1.0));
        assert!(matches!(next_collision(&circle(), &s), Err(Error::Domain(_))));
    }

    #[test]
    fn diameter_orbit_zig_zag() {
        let g = circle();
        let init = PhasePoint::new(Vec2::new(0.2, 0.0), Vec2::new(1.0, 0.0));
        let traj = propagate(&g, &init, 10.0, 0.01, false).unwrap();
        for s in &traj.samples {
            // position along the diameter: unfolded coordinate 0.2 + t on a
            // period-4 triangle wave between -1 and 1
            let u = (0.2 + s.time + 1.0).rem_euclid(4.0);
            let x = if u <= 2.0 { u - 1.0 } else { 3.0 - u };
            assert!((s.position.x - x).abs() < 1e-9 && s.position.y.abs() < 1e-12);
        }
        assert_eq!(traj.collisions.len(), 5);
    }

    #[test]
    fn fully_open_cavity_escapes_at_first_hit() {
        let g = CavityGeometry::new(Shape::Cardioid, 1.0, 0.0, 8.0).unwrap();
        let init = PhasePoint::new(Vec2::new(1.0, 0.2), Vec2::new(0.3, 1.0));
        let traj = propagate(&g, &init, 100.0, 0.05, true).unwrap();
        assert_eq!(traj.collisions.len(), 1);
        let te = traj.escape_time.unwrap();
        assert_eq!(te, traj.collisions[0].time);
        assert!(traj.samples.iter().all(|s| s.time <= te));
        assert_eq!(traj.events().last().unwrap().3, EventKind::Escape);
    }

    #[test]
    fn cardioid_run_is_deterministic() {
        let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
        let init = PhasePoint::new(Vec2::new(0.9, -0.3), Vec2::new(-0.6, 0.8));
        let a = propagate(&g, &init, 200.0, 0.1, false).unwrap();
        let b = propagate(&g, &init, 200.0, 0.1, false).unwrap();
        assert_eq!(a.collisions.len(), b.collisions.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.position, y.position);
        }
    }

    #[test]
    fn reflection_law_and_speed_hold_along_cardioid_path() {
        let g = CavityGeometry::closed(Shape::Cardioid, 1.0).unwrap();
        let init = PhasePoint::new(Vec2::new(1.1, 0.25), Vec2::new(0.8, -0.6) * 1.7);
        let traj = propagate(&g, &init, 500.0, 0.05, false).unwrap();
        assert!(traj.collisions.len() > 100);
        for c in &traj.collisions {
            let (_, n) = g.boundary_point(c.arclength).unwrap();
            let expected = c.incoming - n * (2.0 * c.incoming.dot(n));
            assert!((expected - c.outgoing).norm() < 1e-9, "{c:?}");
            assert!((c.outgoing.norm() - 1.0).abs() < 1e-15);
        }
        for s in &traj.samples {
            assert!(((s.momentum.norm() - 1.7) / 1.7).abs() <= 1e-12);
            assert!(g.signed_distance(s.position) >= -1e-9);
        }
    }
}
