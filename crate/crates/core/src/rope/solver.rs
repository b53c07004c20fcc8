use super::{Rope, RopeError};
use crate::cga::Vec3;

/// Closest points between segments `[p1, q1]` and `[p2, q2]`: returns the
/// parameters `(s, t)` in [0, 1] and the two points.
pub fn closest_points(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> (f64, f64, Vec3, Vec3) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let eps = 1e-30;
    let (s, t) = if a <= eps && e <= eps {
        (0.0, 0.0)
    } else if a <= eps {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > eps { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    (s, t, p1 + d1 * s, p2 + d2 * t)
}

/// A contact between segment `a` of rope `ra` and segment `b` of rope `rb`.
#[derive(Debug, Clone, Copy)]
pub(super) struct SegmentPair {
    pub ra: usize,
    pub a: usize,
    pub rb: usize,
    pub b: usize,
}

/// Segment pairs eligible for collision: non-adjacent pairs within a rope and
/// every pair across ropes.
pub(super) fn candidate_pairs(ropes: &[Rope]) -> Vec<SegmentPair> {
    let mut out = Vec::new();
    for (ra, rope) in ropes.iter().enumerate() {
        let skip = rope.collision_skip();
        for a in 0..rope.segment_count() {
            for b in a + skip..rope.segment_count() {
                out.push(SegmentPair { ra, a, rb: ra, b });
            }
        }
        for (rb, other) in ropes.iter().enumerate().skip(ra + 1) {
            for a in 0..rope.segment_count() {
                for b in 0..other.segment_count() {
                    out.push(SegmentPair { ra, a, rb, b });
                }
            }
        }
    }
    out
}

pub(super) fn contact_distance(ropes: &[Rope], pair: &SegmentPair) -> f64 {
    ropes[pair.ra].radius + ropes[pair.rb].radius
}

pub(super) fn segment_distance(ropes: &[Rope], pair: &SegmentPair) -> f64 {
    let (a, b) = (&ropes[pair.ra].nodes, &ropes[pair.rb].nodes);
    let (_, _, p, q) =
        closest_points(a[pair.a].position, a[pair.a + 1].position, b[pair.b].position, b[pair.b + 1].position);
    (p - q).norm()
}

pub(super) fn validate_dt(dt: f64) -> Result<(), RopeError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(RopeError::InvalidDt(dt));
    }
    Ok(())
}

impl Rope {
    pub(super) fn integrate(&mut self, dt: f64, gravity: Vec3) {
        let keep = 1.0 - self.damping;
        for n in self.nodes.iter_mut() {
            if n.pinned {
                n.previous = n.position;
                continue;
            }
            let next = n.position + (n.position - n.previous) * keep + gravity * (dt * dt);
            n.previous = n.position;
            n.position = next;
        }
    }

    pub(super) fn project_distance(&mut self) {
        for i in 0..self.segment_count() {
            let (w1, w2) = (self.nodes[i].inverse_mass(), self.nodes[i + 1].inverse_mass());
            if w1 + w2 == 0.0 {
                continue;
            }
            let d = self.nodes[i + 1].position - self.nodes[i].position;
            let len = d.norm();
            if len == 0.0 {
                continue;
            }
            let corr = d * ((len - self.rest_length) / (len * (w1 + w2)));
            self.nodes[i].position += corr * w1;
            self.nodes[i + 1].position -= corr * w2;
        }
    }

    /// Pulls each interior node toward the midpoint of its neighbours. The
    /// neighbours move the opposite way so momentum is preserved.
    pub(super) fn project_bend(&mut self) {
        if self.bend_stiffness == 0.0 {
            return;
        }
        for i in 1..self.segment_count() {
            let (w0, w1, w2) =
                (self.nodes[i - 1].inverse_mass(), self.nodes[i].inverse_mass(), self.nodes[i + 1].inverse_mass());
            let w = w1 + 0.25 * (w0 + w2);
            if w == 0.0 {
                continue;
            }
            let mid = (self.nodes[i - 1].position + self.nodes[i + 1].position) * 0.5;
            let lambda = (mid - self.nodes[i].position) * (self.bend_stiffness / w);
            self.nodes[i].position += lambda * w1;
            self.nodes[i - 1].position -= lambda * (0.5 * w0);
            self.nodes[i + 1].position -= lambda * (0.5 * w2);
        }
    }
}

/// Borrows two distinct ropes (or one rope twice) mutably.
fn rope_pair(ropes: &mut [Rope], ra: usize, rb: usize) -> (&mut Rope, Option<&mut Rope>) {
    if ra == rb {
        (&mut ropes[ra], None)
    } else {
        let (lo, hi) = ropes.split_at_mut(rb);
        (&mut lo[ra], Some(&mut hi[0]))
    }
}

/// Pushes apart every eligible segment pair closer than the sum of radii,
/// along the closest-points axis, split by generalized inverse mass.
pub(super) fn project_collisions(ropes: &mut [Rope], pairs: &[SegmentPair]) {
    for pair in pairs {
        let reach = contact_distance(ropes, pair);
        let (ra, rb) = rope_pair(ropes, pair.ra, pair.rb);
        let nb = match &rb {
            Some(r) => &r.nodes,
            None => &ra.nodes,
        };
        let (a0, a1) = (ra.nodes[pair.a], ra.nodes[pair.a + 1]);
        let (b0, b1) = (nb[pair.b], nb[pair.b + 1]);
        // Broad phase: segment midpoints too far apart to touch.
        let ha = 0.5 * (a1.position - a0.position).norm();
        let hb = 0.5 * (b1.position - b0.position).norm();
        let mids = ((a0.position + a1.position) - (b0.position + b1.position)).norm() * 0.5;
        if mids > ha + hb + reach {
            continue;
        }
        let (s, t, p, q) = closest_points(a0.position, a1.position, b0.position, b1.position);
        let diff = p - q;
        let dist = diff.norm();
        if dist >= reach || dist == 0.0 {
            continue;
        }
        let n = diff / dist;
        let ws = [
            a0.inverse_mass() * (1.0 - s),
            a1.inverse_mass() * s,
            b0.inverse_mass() * (1.0 - t),
            b1.inverse_mass() * t,
        ];
        let w = ws[0] * (1.0 - s) + ws[1] * s + ws[2] * (1.0 - t) + ws[3] * t;
        if w == 0.0 {
            continue;
        }
        let lambda = n * ((reach - dist) / w);
        ra.nodes[pair.a].position += lambda * ws[0];
        ra.nodes[pair.a + 1].position += lambda * ws[1];
        let nb = match rb {
            Some(r) => &mut r.nodes,
            None => &mut ra.nodes,
        };
        nb[pair.b].position -= lambda * ws[2];
        nb[pair.b + 1].position -= lambda * ws[3];
    }
}

/// Removes a fraction of the relative tangential motion at each contact.
pub(super) fn apply_friction(ropes: &mut [Rope], pairs: &[SegmentPair]) {
    for pair in pairs {
        let f = 0.5 * (ropes[pair.ra].friction + ropes[pair.rb].friction);
        if f == 0.0 {
            continue;
        }
        let reach = contact_distance(ropes, pair) * (1.0 + 1e-3);
        let (ra, rb) = rope_pair(ropes, pair.ra, pair.rb);
        let nb = match &rb {
            Some(r) => &r.nodes,
            None => &ra.nodes,
        };
        let (a0, a1) = (ra.nodes[pair.a], ra.nodes[pair.a + 1]);
        let (b0, b1) = (nb[pair.b], nb[pair.b + 1]);
        let (s, t, p, q) = closest_points(a0.position, a1.position, b0.position, b1.position);
        let dist = (p - q).norm();
        if dist >= reach || dist == 0.0 {
            continue;
        }
        let n = (p - q) / dist;
        let move_a = (a0.position - a0.previous) * (1.0 - s) + (a1.position - a1.previous) * s;
        let move_b = (b0.position - b0.previous) * (1.0 - t) + (b1.position - b1.previous) * t;
        let rel = move_a - move_b;
        let tangential = rel - n * rel.dot(&n);
        let ws = [
            a0.inverse_mass() * (1.0 - s),
            a1.inverse_mass() * s,
            b0.inverse_mass() * (1.0 - t),
            b1.inverse_mass() * t,
        ];
        let w = ws[0] * (1.0 - s) + ws[1] * s + ws[2] * (1.0 - t) + ws[3] * t;
        if w == 0.0 {
            continue;
        }
        let lambda = tangential * (-f / w);
        ra.nodes[pair.a].position += lambda * ws[0];
        ra.nodes[pair.a + 1].position += lambda * ws[1];
        let nb = match rb {
            Some(r) => &mut r.nodes,
            None => &mut ra.nodes,
        };
        nb[pair.b].position -= lambda * ws[2];
        nb[pair.b + 1].position -= lambda * ws[3];
    }
}
