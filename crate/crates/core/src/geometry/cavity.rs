use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::poly;
use super::Vec2;
use crate::error::{Error, Result};

/// Billiard table outline. All shapes are placed with a fixed reference
/// frame; `CavityGeometry::offset` translates the whole table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum Shape {
    /// Disk of radius `scale` centred at the origin.
    Circle,
    /// Polar curve `rho = scale * (1 + cos phi)`, cusp at the origin.
    Cardioid,
    /// Bunimovich stadium: two semicircles of radius `scale` joined by
    /// straight segments of length `2 * half_length`.
    Stadium { half_length: f64 },
}

/// Boundary piece a point lies on. Circle and cardioid have a single piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Piece {
    Whole,
    Bottom,
    RightArc,
    Top,
    LeftArc,
}

/// Exit point of a ray.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Hit {
    pub distance: f64,
    pub point: Vec2,
    pub inward_normal: Vec2,
    pub arclength: f64,
    pub piece: Piece,
}

/// A 2-D cavity with one absorbing opening on its boundary.
///
/// Immutable after construction: every derived quantity is computed once in
/// [`CavityGeometry::new`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CavityGeometry {
    pub shape: Shape,
    pub scale: f64,
    /// Translation applied to the reference placement of the shape.
    pub offset: Vec2,
    /// Arclength coordinate of the opening midpoint.
    pub opening_center: f64,
    pub opening_length: f64,
    area: f64,
    perimeter: f64,
    diameter: f64,
}

impl CavityGeometry {
    pub fn new(shape: Shape, scale: f64, opening_center: f64, opening_length: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("scale must be positive, got {scale}")));
        }
        if let Shape::Stadium { half_length } = shape {
            if !(half_length.is_finite() && half_length >= 0.0) {
                return Err(Error::domain(format!(
                    "stadium half_length must be non-negative, got {half_length}"
                )));
            }
        }
        let (area, perimeter) = match shape {
            Shape::Circle => (PI * scale * scale, TAU * scale),
            Shape::Cardioid => (1.5 * PI * scale * scale, 8.0 * scale),
            Shape::Stadium { half_length } => (
                4.0 * half_length * scale + PI * scale * scale,
                4.0 * half_length + TAU * scale,
            ),
        };
        if !(opening_length > 0.0 && opening_length <= perimeter) {
            return Err(Error::domain(format!(
                "opening length must lie in (0, {perimeter}], got {opening_length}"
            )));
        }
        if !opening_center.is_finite() {
            return Err(Error::domain("opening centre must be finite"));
        }
        let mut geometry = Self {
            shape,
            scale,
            offset: Vec2::ZERO,
            opening_center: opening_center.rem_euclid(perimeter),
            opening_length,
            area,
            perimeter,
            diameter: 0.0,
        };
        geometry.diameter = match shape {
            Shape::Circle => 2.0 * scale,
            Shape::Stadium { half_length } => 2.0 * (half_length + scale),
            Shape::Cardioid => geometry.numeric_diameter(),
        };
        Ok(geometry)
    }

    /// Closed cavity variant used when the opening is irrelevant.
    pub fn closed(shape: Shape, scale: f64) -> Result<Self> {
        let g = Self::new(shape, scale, 0.0, f64::MIN_POSITIVE)?;
        Ok(g)
    }

    /// Default opening: centred at one eighth of the perimeter, which lies on
    /// a curved (circle, cardioid) or arc (stadium) part and off every
    /// symmetry axis of the three shapes.
    pub fn with_default_opening(shape: Shape, scale: f64, opening_length: f64) -> Result<Self> {
        let probe = Self::closed(shape, scale)?;
        let center = match shape {
            Shape::Stadium { half_length } => half_length + 0.25 * PI * scale,
            _ => 0.125 * probe.perimeter,
        };
        Self::new(shape, scale, center, opening_length)
    }

    pub fn translated(mut self, by: Vec2) -> Self {
        self.offset += by;
        self
    }

    /// Same shape and opening with all lengths multiplied by `k`.
    pub fn rescaled(&self, k: f64) -> Result<Self> {
        let shape = match self.shape {
            Shape::Stadium { half_length } => Shape::Stadium { half_length: half_length * k },
            s => s,
        };
        let mut g = Self::new(shape, self.scale * k, self.opening_center * k, self.opening_length * k)?;
        g.offset = self.offset * k;
        Ok(g)
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Largest distance between two boundary points.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Mean free path between collisions for the uniform ensemble, `pi A / P`.
    pub fn mean_free_path(&self) -> f64 {
        PI * self.area / self.perimeter
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let a = self.scale;
        let (lo, hi) = match self.shape {
            Shape::Circle => (Vec2::new(-a, -a), Vec2::new(a, a)),
            // max of (1 + cos phi) sin phi is at phi = pi/3
            Shape::Cardioid => {
                let ymax = 0.75 * 3f64.sqrt() * a;
                (Vec2::new(-0.25 * a, -ymax), Vec2::new(2.0 * a, ymax))
            }
            Shape::Stadium { half_length } => {
                (Vec2::new(-half_length - a, -a), Vec2::new(half_length + a, a))
            }
        };
        (lo + self.offset, hi + self.offset)
    }

    /// Whether the arclength coordinate lies inside the opening interval.
    pub fn in_opening(&self, s: f64) -> bool {
        if self.opening_length >= self.perimeter {
            return true;
        }
        let half = 0.5 * self.opening_length;
        let d = (s - self.opening_center).rem_euclid(self.perimeter);
        d <= half || d >= self.perimeter - half
    }

    /// Boundary position and unit inward normal at arclength `s`, measured
    /// counter-clockwise from the shape's reference point.
    pub fn boundary_point(&self, s: f64) -> Result<(Vec2, Vec2)> {
        if !(s >= 0.0 && s < self.perimeter) {
            return Err(Error::domain(format!(
                "arclength {s} outside [0, {})",
                self.perimeter
            )));
        }
        let a = self.scale;
        let (p, n) = match self.shape {
            Shape::Circle => {
                let u = Vec2::from_angle(s / a);
                (u * a, -u)
            }
            Shape::Cardioid => {
                let phi = cardioid_angle(s, a);
                let p = cardioid_point(phi, a);
                if (s - 4.0 * a).abs() == 0.0 {
                    // Cusp: the cavity lies along +x.
                    (p, Vec2::new(1.0, 0.0))
                } else {
                    let (sn, cs) = phi.sin_cos();
                    let rho = a * (1.0 + cs);
                    let drho = -a * sn;
                    let tangent = Vec2::new(drho * cs - rho * sn, drho * sn + rho * cs);
                    (p, tangent.perp().normalized())
                }
            }
            Shape::Stadium { half_length: l } => stadium_point(s, a, l),
        };
        Ok((p + self.offset, n))
    }

    /// Arclength coordinate of a point on (or numerically next to) the boundary.
    pub fn arclength_of(&self, point: Vec2) -> f64 {
        let p = point - self.offset;
        let a = self.scale;
        let s = match self.shape {
            Shape::Circle => p.angle().rem_euclid(TAU) * a,
            Shape::Cardioid => {
                let phi = p.angle().rem_euclid(TAU);
                if phi <= PI {
                    4.0 * a * (0.5 * phi).sin()
                } else {
                    8.0 * a - 4.0 * a * (0.5 * phi).sin()
                }
            }
            Shape::Stadium { half_length: l } => {
                if p.x > l {
                    l + a * (p.y.atan2(p.x - l) + FRAC_PI_2)
                } else if p.x < -l {
                    3.0 * l + PI * a + a * ((-p.y).atan2(-(p.x + l)) + FRAC_PI_2)
                } else if p.y > 0.0 {
                    l + PI * a + (l - p.x)
                } else {
                    p.x.rem_euclid(self.perimeter)
                }
            }
        };
        if s >= self.perimeter {
            s - self.perimeter
        } else {
            s
        }
    }

    /// Approximate signed distance to the boundary, positive inside.
    /// Exact for circle and stadium; first-order (implicit function over its
    /// gradient) for the cardioid.
    pub fn signed_distance(&self, point: Vec2) -> f64 {
        let p = point - self.offset;
        let a = self.scale;
        match self.shape {
            Shape::Circle => a - p.norm(),
            Shape::Stadium { half_length: l } => {
                let cx = p.x.clamp(-l, l);
                a - (p - Vec2::new(cx, 0.0)).norm()
            }
            Shape::Cardioid => {
                let f = cardioid_implicit(p, a);
                let g = cardioid_gradient(p, a).norm();
                if g > 0.0 {
                    -f / g
                } else {
                    0.0
                }
            }
        }
    }

    pub fn contains(&self, point: Vec2) -> bool {
        let p = point - self.offset;
        match self.shape {
            Shape::Cardioid => cardioid_implicit(p, self.scale) < 0.0,
            _ => self.signed_distance(point) > 0.0,
        }
    }

    /// First boundary crossing of the ray `origin + t * dir`, `t > 0`, `|dir| = 1`.
    /// `from` names the boundary piece the origin lies on, if any; that piece's
    /// trivial root at `t = 0` is deflated away.
    pub(crate) fn exit(&self, origin: Vec2, dir: Vec2, from: Option<Piece>) -> Result<Hit> {
        let p = origin - self.offset;
        let a = self.scale;
        let hit = match self.shape {
            Shape::Circle => {
                let t = circle_exit(p, dir, a, from.is_some());
                t.map(|t| {
                    let q = p + dir * t;
                    (t, q, -(q / a), Piece::Whole)
                })
            }
            Shape::Stadium { half_length } => stadium_exit(p, dir, a, half_length, from),
            Shape::Cardioid => self.cardioid_exit(p, dir, from.is_some()),
        };
        let (t, q, n, piece) = hit.ok_or_else(|| {
            Error::numeric_with(
                "no boundary crossing found along ray",
                vec![
                    ("x", origin.x),
                    ("y", origin.y),
                    ("dx", dir.x),
                    ("dy", dir.y),
                    ("signed_distance", self.signed_distance(origin)),
                ],
            )
        })?;
        let point = q + self.offset;
        Ok(Hit { distance: t, point, inward_normal: n, arclength: self.arclength_of(point), piece })
    }

    fn cardioid_exit(&self, p: Vec2, d: Vec2, on_boundary: bool) -> Option<(f64, Vec2, Vec2, Piece)> {
        let a = self.scale;
        let pp = p.norm_sq();
        let pd = p.dot(d);
        let a0 = pp - a * p.x;
        let a1 = 2.0 * pd - a * d.x;
        let c0 = a0 * a0 - a * a * pp;
        let c1 = 2.0 * a0 * a1 - 2.0 * a * a * pd;
        let c2 = a1 * a1 + 2.0 * a0 - a * a;
        let c3 = 2.0 * a1;
        let c4 = 1.0;
        let t_max = 1.5 * self.diameter + 4.0 * p.norm();
        let roots = if on_boundary {
            poly::sign_change_roots(&[c1, c2, c3, c4], 0.0, t_max)
        } else {
            poly::sign_change_roots(&[c0, c1, c2, c3, c4], 0.0, t_max)
        };
        // The first sign change leaves the interior.
        let mut t = *roots.first()?;
        // The quartic loses relative precision ~a/r near the cusp; polish on
        // the polar residual, which does not.
        for _ in 0..3 {
            let q = p + d * t;
            if q.norm() == 0.0 {
                break;
            }
            let (h, grad) = cardioid_radial_residual(q, a);
            let slope = grad.dot(d);
            if slope == 0.0 {
                break;
            }
            let dt = -h / slope;
            if !(dt.abs() <= 1e-6 * a) {
                break;
            }
            t += dt;
            if dt.abs() <= f64::EPSILON * t.abs() {
                break;
            }
        }
        let q = p + d * t;
        Some((t, q, cardioid_inward_normal(q), Piece::Whole))
    }

    fn numeric_diameter(&self) -> f64 {
        let n = 2048;
        let pts: Vec<Vec2> = (0..n)
            .map(|k| self.boundary_point(self.perimeter * k as f64 / n as f64).unwrap().0)
            .collect();
        let mut best = (0.0f64, 0usize, 0usize);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (pts[i] - pts[j]).norm_sq();
                if d > best.0 {
                    best = (d, i, j);
                }
            }
        }
        // Refine the best pair by coordinate search on the arclengths.
        let (mut si, mut sj) = (
            self.perimeter * best.1 as f64 / n as f64,
            self.perimeter * best.2 as f64 / n as f64,
        );
        let dist = |a: f64, b: f64| {
            let pa = self.boundary_point(a.rem_euclid(self.perimeter)).unwrap().0;
            let pb = self.boundary_point(b.rem_euclid(self.perimeter)).unwrap().0;
            (pa - pb).norm()
        };
        let mut step = self.perimeter / n as f64;
        let mut d = dist(si, sj);
        while step > 1e-13 * self.perimeter {
            let mut improved = false;
            for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let trial = dist(si + da, sj + db);
                if trial > d {
                    d = trial;
                    si += da;
                    sj += db;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        d
    }
}

pub(crate) fn cardioid_angle(s: f64, a: f64) -> f64 {
    let h = 4.0 * a;
    if s <= h {
        2.0 * (s / h).min(1.0).asin()
    } else {
        TAU - 2.0 * ((2.0 * h - s) / h).clamp(0.0, 1.0).asin()
    }
}

pub(crate) fn cardioid_point(phi: f64, a: f64) -> Vec2 {
    let rho = a * (1.0 + phi.cos());
    Vec2::from_angle(phi) * rho
}

fn cardioid_implicit(p: Vec2, a: f64) -> f64 {
    let r2 = p.norm_sq();
    let q = r2 - a * p.x;
    q * q - a * a * r2
}

/// `(cos(phi/2), sin(phi/2))` of the polar angle `phi` in `(-pi, pi]`, free of
/// cancellation on both sides of the axis. `q` must be non-zero.
fn half_angles(q: Vec2) -> (f64, f64) {
    let r = q.norm();
    let (one_plus, one_minus) = if q.x < 0.0 {
        (q.y * q.y / (r * (r - q.x)), (r - q.x) / r)
    } else {
        ((r + q.x) / r, q.y * q.y / (r * (r + q.x)))
    };
    ((0.5 * one_plus).sqrt(), (0.5 * one_minus).sqrt().copysign(if q.y == 0.0 { 1.0 } else { q.y }))
}

/// `r - a (1 + cos phi)` and its gradient.
fn cardioid_radial_residual(q: Vec2, a: f64) -> (f64, Vec2) {
    let r = q.norm();
    let (c, s) = half_angles(q);
    let h = r - 2.0 * a * c * c;
    let grad = q / r + Vec2::new(-q.y, q.x) / r * (2.0 * a * s * c / r);
    (h, grad)
}

/// Inward unit normal from the polar tangent at the angle of `q`.
fn cardioid_inward_normal(q: Vec2) -> Vec2 {
    if q.norm() == 0.0 {
        return Vec2::new(1.0, 0.0);
    }
    let (c, s) = half_angles(q);
    let cos_phi = c * c - s * s;
    let tangent = Vec2::new(-s * (1.0 + 2.0 * cos_phi), (2.0 * cos_phi - 1.0) * c);
    let n = Vec2::new(-tangent.y, tangent.x);
    n / n.norm()
}

fn cardioid_gradient(p: Vec2, a: f64) -> Vec2 {
    let r2 = p.norm_sq();
    let q = r2 - a * p.x;
    Vec2::new(
        2.0 * q * (2.0 * p.x - a) - 2.0 * a * a * p.x,
        4.0 * q * p.y - 2.0 * a * a * p.y,
    )
}

/// Larger root of `t^2 + 2 b t + c = 0` without cancellation.
fn exit_root(b: f64, c: f64) -> Option<f64> {
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some(if b <= 0.0 { -b + sq } else { -c / (b + sq) })
}

fn circle_exit(p: Vec2, d: Vec2, r: f64, on_boundary: bool) -> Option<f64> {
    let b = p.dot(d);
    if on_boundary {
        let t = -2.0 * b;
        return (t > 0.0).then_some(t);
    }
    let c = p.norm_sq() - r * r;
    exit_root(b, c).filter(|&t| t > 0.0)
}

fn stadium_point(s: f64, a: f64, l: f64) -> (Vec2, Vec2) {
    let arc = PI * a;
    if s < l {
        (Vec2::new(s, -a), Vec2::new(0.0, 1.0))
    } else if s < l + arc {
        let u = Vec2::from_angle((s - l) / a - FRAC_PI_2);
        (Vec2::new(l, 0.0) + u * a, -u)
    } else if s < 3.0 * l + arc {
        (Vec2::new(l - (s - l - arc), a), Vec2::new(0.0, -1.0))
    } else if s < 3.0 * l + 2.0 * arc {
        let u = Vec2::from_angle((s - 3.0 * l - arc) / a + FRAC_PI_2);
        (Vec2::new(-l, 0.0) + u * a, -u)
    } else {
        let x = s - (4.0 * l + 2.0 * arc);
        (Vec2::new(x, -a), Vec2::new(0.0, 1.0))
    }
}

fn stadium_exit(p: Vec2, d: Vec2, a: f64, l: f64, from: Option<Piece>) -> Option<(f64, Vec2, Vec2, Piece)> {
    let mut best: Option<(f64, Vec2, Vec2, Piece)> = None;
    let mut offer = |t: f64, n: Vec2, piece: Piece| {
        if t > 0.0 && best.is_none_or(|b| t < b.0) {
            best = Some((t, p + d * t, n, piece));
        }
    };
    // Straight walls at y = -a and y = +a. A joint point is assigned to the
    // piece reached first, which is the adjacent smooth piece on the approach
    // side.
    if d.y < 0.0 && from != Some(Piece::Bottom) {
        let t = (-a - p.y) / d.y;
        let x = p.x + t * d.x;
        if x.abs() <= l {
            offer(t, Vec2::new(0.0, 1.0), Piece::Bottom);
        }
    }
    if d.y > 0.0 && from != Some(Piece::Top) {
        let t = (a - p.y) / d.y;
        let x = p.x + t * d.x;
        if x.abs() <= l {
            offer(t, Vec2::new(0.0, -1.0), Piece::Top);
        }
    }
    for (center_x, piece) in [(l, Piece::RightArc), (-l, Piece::LeftArc)] {
        let c = Vec2::new(center_x, 0.0);
        let q = p - c;
        let b = q.dot(d);
        let t = if from == Some(piece) {
            Some(-2.0 * b)
        } else {
            exit_root(b, q.norm_sq() - a * a)
        };
        if let Some(t) = t {
            let hit = q + d * t;
            let on_side = if center_x > 0.0 { hit.x >= 0.0 } else { hit.x <= 0.0 };
            if on_side {
                offer(t, -(hit / a), piece);
            }
        }
    }
    best
}
