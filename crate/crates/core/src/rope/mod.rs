//! Position-based ropes with bending, segment collision and attachments.

pub mod file;
mod knot;
mod scene;
mod solver;

pub use knot::{knot_integrity_check, KnotMonitor, KnotReport};
pub use scene::{AttachTarget, Attachment, AttachmentId, SutureScene};
pub use solver::closest_points;

use crate::cga::Vec3;
use crate::softbody::SoftError;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RopeError {
    #[error("time step must be finite and positive, got {0}")]
    InvalidDt(f64),
    #[error("index {index} out of range ({count} available)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("invalid rope: {0}")]
    InvalidRope(String),
    #[error(transparent)]
    Soft(#[from] SoftError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RopeNode {
    pub position: Vec3,
    pub previous: Vec3,
    pub mass: f64,
    pub pinned: bool,
}

impl RopeNode {
    fn inverse_mass(&self) -> f64 {
        if self.pinned {
            0.0
        } else {
            1.0 / self.mass
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rope {
    nodes: Vec<RopeNode>,
    rest_length: f64,
    radius: f64,
    bend_stiffness: f64,
    iterations: usize,
    damping: f64,
    friction: f64,
}

impl Rope {
    /// Rope through `positions` at rest, each node of mass `node_mass`.
    pub fn new(
        positions: &[Vec3],
        node_mass: f64,
        rest_length: f64,
        radius: f64,
        bend_stiffness: f64,
        iterations: usize,
    ) -> Result<Self, RopeError> {
        if positions.len() < 2 {
            return Err(RopeError::InvalidRope(format!("needs at least 2 nodes, got {}", positions.len())));
        }
        if !(rest_length > 0.0) || !rest_length.is_finite() {
            return Err(RopeError::InvalidRope(format!("rest length {rest_length} must be positive")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(RopeError::InvalidRope(format!("collision radius {radius} must be positive")));
        }
        if !(0.0..=1.0).contains(&bend_stiffness) {
            return Err(RopeError::InvalidRope(format!("bend stiffness {bend_stiffness} not in [0, 1]")));
        }
        if iterations == 0 {
            return Err(RopeError::InvalidRope("solver iterations must be positive".into()));
        }
        if !(node_mass > 0.0) || !node_mass.is_finite() {
            return Err(RopeError::InvalidRope(format!("node mass {node_mass} must be positive")));
        }
        if positions.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(RopeError::InvalidRope("non-finite node position".into()));
        }
        let nodes =
            positions.iter().map(|&p| RopeNode { position: p, previous: p, mass: node_mass, pinned: false }).collect();
        Ok(Self { nodes, rest_length, radius, bend_stiffness, iterations, damping: 0.0, friction: 0.0 })
    }

    /// Straight rope of `count` nodes from `start` along unit `direction`.
    pub fn straight(
        start: Vec3,
        direction: Vec3,
        count: usize,
        rest_length: f64,
        radius: f64,
    ) -> Result<Self, RopeError> {
        let d = direction.normalize();
        let positions: Vec<Vec3> = (0..count).map(|i| start + d * (i as f64 * rest_length)).collect();
        Self::new(&positions, 1.0, rest_length, radius, 0.0, 20)
    }

    pub fn with_bend_stiffness(mut self, k: f64) -> Result<Self, RopeError> {
        if !(0.0..=1.0).contains(&k) {
            return Err(RopeError::InvalidRope(format!("bend stiffness {k} not in [0, 1]")));
        }
        self.bend_stiffness = k;
        Ok(self)
    }

    pub fn with_iterations(mut self, n: usize) -> Result<Self, RopeError> {
        if n == 0 {
            return Err(RopeError::InvalidRope("solver iterations must be positive".into()));
        }
        self.iterations = n;
        Ok(self)
    }

    /// Verlet velocity damping per step, in [0, 1).
    pub fn with_damping(mut self, d: f64) -> Result<Self, RopeError> {
        if !(0.0..1.0).contains(&d) {
            return Err(RopeError::InvalidRope(format!("damping {d} not in [0, 1)")));
        }
        self.damping = d;
        Ok(self)
    }

    /// Fraction of relative tangential motion removed at contacts, in [0, 1].
    pub fn with_friction(mut self, f: f64) -> Result<Self, RopeError> {
        if !(0.0..=1.0).contains(&f) {
            return Err(RopeError::InvalidRope(format!("friction {f} not in [0, 1]")));
        }
        self.friction = f;
        Ok(self)
    }

    pub fn nodes(&self) -> &[RopeNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn segment_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn rest_length(&self) -> f64 {
        self.rest_length
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn bend_stiffness(&self) -> f64 {
        self.bend_stiffness
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn friction(&self) -> f64 {
        self.friction
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    fn check(&self, index: usize) -> Result<(), RopeError> {
        if index >= self.nodes.len() {
            return Err(RopeError::IndexOutOfRange { index, count: self.nodes.len() });
        }
        Ok(())
    }

    pub fn set_pinned(&mut self, index: usize, pinned: bool) -> Result<(), RopeError> {
        self.check(index)?;
        let n = &mut self.nodes[index];
        n.pinned = pinned;
        n.previous = n.position;
        Ok(())
    }

    /// Moves a node; its previous position follows, so no velocity is added.
    pub fn set_position(&mut self, index: usize, position: Vec3) -> Result<(), RopeError> {
        self.check(index)?;
        self.nodes[index].position = position;
        self.nodes[index].previous = position;
        Ok(())
    }

    /// Moves a pinned node kinematically, keeping its previous position.
    pub fn drive(&mut self, index: usize, position: Vec3) -> Result<(), RopeError> {
        self.check(index)?;
        self.nodes[index].position = position;
        Ok(())
    }

    pub fn velocity(&self, index: usize, dt: f64) -> Vec3 {
        let n = &self.nodes[index];
        (n.position - n.previous) / dt
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        (self.nodes[i + 1].position - self.nodes[i].position).norm()
    }

    /// Largest `|length - rest| / rest` over segments.
    pub fn max_strain(&self) -> f64 {
        (0..self.segment_count())
            .map(|i| (self.segment_length(i) - self.rest_length).abs() / self.rest_length)
            .fold(0.0, f64::max)
    }

    /// Smallest index gap between segments that are tested for collision.
    /// Segments closer along the rope than this are never in contact.
    pub fn collision_skip(&self) -> usize {
        2.max((2.0 * self.radius / self.rest_length).ceil() as usize + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_ropes() {
        let p = [Vec3::zeros(), Vec3::x()];
        assert!(Rope::new(&p[..1], 1.0, 1.0, 0.1, 0.0, 10).is_err());
        assert!(Rope::new(&p, 1.0, 0.0, 0.1, 0.0, 10).is_err());
        assert!(Rope::new(&p, 1.0, 1.0, 0.0, 0.0, 10).is_err());
        assert!(Rope::new(&p, 1.0, 1.0, 0.1, 1.5, 10).is_err());
        assert!(Rope::new(&p, 1.0, 1.0, 0.1, 0.0, 0).is_err());
        assert!(Rope::new(&p, 1.0, 1.0, 0.1, 0.0, 10).is_ok());
    }
}
