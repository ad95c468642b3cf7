//! Billiard cavities and free-flight dynamics with specular reflection.

mod cavity;
mod dynamics;
pub(crate) mod poly;
mod vec2;

pub use cavity::{CavityGeometry, Shape};
pub(crate) use cavity::{Hit, Piece};
pub(crate) use dynamics::escape_time;
pub use dynamics::{
    next_collision, propagate, reflect, Collision, EventKind, Particle, PhasePoint, Sample,
    Trajectory,
};
pub use vec2::Vec2;
