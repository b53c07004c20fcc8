use super::solver::{apply_friction, candidate_pairs, project_collisions, validate_dt};
use super::{Rope, RopeError};
use crate::cga::Vec3;
use crate::softbody::ParticleBody;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttachTarget {
    Particle(usize),
    Anchor(Vec3),
}

/// Ties rope node `node` to a target. Compliance 0 is a hard constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attachment {
    pub node: usize,
    pub target: AttachTarget,
    pub compliance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttachmentId(u64);

fn check_attachment(rope: &Rope, body: Option<&ParticleBody>, a: &Attachment) -> Result<(), RopeError> {
    if a.node >= rope.node_count() {
        return Err(RopeError::IndexOutOfRange { index: a.node, count: rope.node_count() });
    }
    if !(a.compliance >= 0.0) || !a.compliance.is_finite() {
        return Err(RopeError::InvalidRope(format!("compliance {} must be finite and >= 0", a.compliance)));
    }
    if let AttachTarget::Particle(p) = a.target {
        let count = body.map_or(0, ParticleBody::particle_count);
        if p >= count {
            return Err(RopeError::IndexOutOfRange { index: p, count });
        }
    }
    Ok(())
}

/// One constraint-solve pass over ropes, attachments and an optional body.
fn solve(
    ropes: &mut [Rope],
    mut body: Option<&mut ParticleBody>,
    attachments: &[(usize, Attachment)],
    dt: f64,
    gravity: Vec3,
) -> Result<(), RopeError> {
    validate_dt(dt)?;
    for (r, a) in attachments {
        let rope = ropes.get(*r).ok_or(RopeError::IndexOutOfRange { index: *r, count: ropes.len() })?;
        check_attachment(rope, body.as_deref(), a)?;
    }
    for rope in ropes.iter_mut() {
        rope.integrate(dt, gravity);
    }
    let before = body.as_ref().map(|b| b.positions());
    let pairs = candidate_pairs(ropes);
    let rounds = ropes.iter().map(Rope::iterations).max().unwrap_or(0);
    let mut lambdas = vec![Vec3::zeros(); attachments.len()];
    for round in 0..rounds {
        for rope in ropes.iter_mut().filter(|r| round < r.iterations) {
            rope.project_distance();
        }
        for rope in ropes.iter_mut().filter(|r| round < r.iterations) {
            rope.project_bend();
        }
        for ((r, a), lambda) in attachments.iter().zip(&mut lambdas) {
            let node = ropes[*r].nodes[a.node];
            let wn = node.inverse_mass();
            let (target, wt) = match (a.target, body.as_deref()) {
                (AttachTarget::Anchor(p), _) => (p, 0.0),
                (AttachTarget::Particle(i), Some(b)) => {
                    let p = b.particles()[i];
                    (p.position, if p.pinned { 0.0 } else { 1.0 / p.mass })
                }
                (AttachTarget::Particle(_), None) => unreachable!("validated above"),
            };
            let alpha = a.compliance / (dt * dt);
            let w = wn + wt + alpha;
            if w == 0.0 {
                continue;
            }
            let c = node.position - target;
            let dl = (-c - *lambda * alpha) / w;
            *lambda += dl;
            ropes[*r].nodes[a.node].position += dl * wn;
            if let (AttachTarget::Particle(i), Some(b)) = (a.target, body.as_deref_mut()) {
                if wt > 0.0 {
                    b.set_position(i, target - dl * wt)?;
                }
            }
        }
        project_collisions(ropes, &pairs);
    }
    apply_friction(ropes, &pairs);
    if let (Some(b), Some(before)) = (body, before) {
        for (i, x0) in before.iter().enumerate() {
            let p = b.particles()[i];
            if p.position != *x0 {
                b.set_velocity(i, p.velocity + (p.position - x0) / dt)?;
            }
        }
    }
    Ok(())
}

impl Rope {
    /// One step: Verlet integration, then `iterations` rounds of distance,
    /// bend, attachment and self-collision projection. An attached body is
    /// moved by the attachments but not integrated.
    pub fn step(
        &mut self,
        dt: f64,
        gravity: Vec3,
        attachments: &[Attachment],
        body: Option<&mut ParticleBody>,
    ) -> Result<(), RopeError> {
        let tagged: Vec<(usize, Attachment)> = attachments.iter().map(|a| (0, *a)).collect();
        solve(std::slice::from_mut(self), body, &tagged, dt, gravity)
    }
}

/// Ropes, an optional soft body and the attachments tying them, stepped in one
/// combined pass.
#[derive(Debug, Clone)]
pub struct SutureScene {
    pub ropes: Vec<Rope>,
    pub body: Option<ParticleBody>,
    pub gravity: Vec3,
    attachments: Vec<(AttachmentId, usize, Attachment)>,
    next_id: u64,
}

impl SutureScene {
    pub fn new(ropes: Vec<Rope>, body: Option<ParticleBody>, gravity: Vec3) -> Self {
        Self { ropes, body, gravity, attachments: Vec::new(), next_id: 0 }
    }

    /// Ties a rope node to a body particle or a world anchor.
    pub fn tie_attachment(
        &mut self,
        rope: usize,
        node: usize,
        target: AttachTarget,
        compliance: f64,
    ) -> Result<AttachmentId, RopeError> {
        let r = self.ropes.get(rope).ok_or(RopeError::IndexOutOfRange { index: rope, count: self.ropes.len() })?;
        let a = Attachment { node, target, compliance };
        check_attachment(r, self.body.as_ref(), &a)?;
        let id = AttachmentId(self.next_id);
        self.next_id += 1;
        self.attachments.push((id, rope, a));
        Ok(id)
    }

    pub fn detach(&mut self, id: AttachmentId) -> bool {
        let before = self.attachments.len();
        self.attachments.retain(|(i, _, _)| *i != id);
        before != self.attachments.len()
    }

    pub fn attachments(&self) -> impl Iterator<Item = (usize, &Attachment)> {
        self.attachments.iter().map(|(_, r, a)| (*r, a))
    }

    /// Distance between an attached rope node and its target.
    pub fn separation(&self, id: AttachmentId) -> Option<f64> {
        let (_, r, a) = self.attachments.iter().find(|(i, _, _)| *i == id)?;
        let node = self.ropes[*r].nodes[a.node].position;
        let target = match a.target {
            AttachTarget::Anchor(p) => p,
            AttachTarget::Particle(i) => self.body.as_ref()?.particles()[i].position,
        };
        Some((node - target).norm())
    }

    /// Steps the body (if any), then solves ropes and attachments together.
    pub fn step(&mut self, dt: f64) -> Result<(), RopeError> {
        validate_dt(dt)?;
        if let Some(b) = self.body.as_mut() {
            b.step(dt, self.gravity)?;
        }
        let tagged: Vec<(usize, Attachment)> = self.attachments.iter().map(|(_, r, a)| (*r, *a)).collect();
        solve(&mut self.ropes, self.body.as_mut(), &tagged, dt, self.gravity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_endpoints_at_rest_do_not_move() {
        let mut r = Rope::straight(Vec3::zeros(), Vec3::x(), 2, 0.5, 0.05).unwrap();
        r.set_pinned(0, true).unwrap();
        r.set_pinned(1, true).unwrap();
        let before = r.positions();
        for _ in 0..10 {
            r.step(1.0 / 60.0, Vec3::new(0.0, -9.81, 0.0), &[], None).unwrap();
        }
        assert_eq!(r.positions(), before);
    }

    #[test]
    fn anchor_at_current_position_is_inert() {
        let mut r = Rope::straight(Vec3::zeros(), Vec3::x(), 5, 0.1, 0.02).unwrap();
        let a = Attachment { node: 4, target: AttachTarget::Anchor(r.nodes()[4].position), compliance: 0.0 };
        let before = r.positions();
        r.step(1.0 / 60.0, Vec3::zeros(), &[a], None).unwrap();
        for (p, q) in r.positions().iter().zip(&before) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn bad_indices_are_rejected() {
        let r = Rope::straight(Vec3::zeros(), Vec3::x(), 3, 0.1, 0.02).unwrap();
        let mut scene = SutureScene::new(vec![r], None, Vec3::zeros());
        assert!(matches!(
            scene.tie_attachment(0, 7, AttachTarget::Anchor(Vec3::zeros()), 0.0),
            Err(RopeError::IndexOutOfRange { index: 7, .. })
        ));
        assert!(scene.tie_attachment(0, 0, AttachTarget::Particle(0), 0.0).is_err());
        assert!(scene.tie_attachment(1, 0, AttachTarget::Anchor(Vec3::zeros()), 0.0).is_err());
        let id = scene.tie_attachment(0, 0, AttachTarget::Anchor(Vec3::zeros()), 0.0).unwrap();
        assert!(scene.detach(id));
        assert!(!scene.detach(id));
    }
}
