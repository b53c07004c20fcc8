use super::solver::{candidate_pairs, segment_distance};
use super::Rope;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnotReport {
    /// Smallest distance between non-adjacent segments; `None` when the rope
    /// has no such pair.
    pub min_distance: Option<f64>,
    /// Segment pair attaining the minimum.
    pub closest_pair: Option<(usize, usize)>,
    pub radius: f64,
    /// `min_distance >= radius`: no segment has passed through another.
    pub pass: bool,
}

/// Closest approach of non-adjacent segments at the rope's current state.
pub fn knot_integrity_check(rope: &Rope) -> KnotReport {
    let ropes = std::slice::from_ref(rope);
    let mut best: Option<(f64, (usize, usize))> = None;
    for pair in candidate_pairs(ropes) {
        let d = segment_distance(ropes, &pair);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, (pair.a, pair.b)));
        }
    }
    KnotReport {
        min_distance: best.map(|b| b.0),
        closest_pair: best.map(|b| b.1),
        radius: rope.radius(),
        pass: best.is_none_or(|(d, _)| d >= rope.radius()),
    }
}

/// Tracks the worst knot report over a pull sequence.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct KnotMonitor {
    pub steps: usize,
    pub worst: Option<KnotReport>,
}

impl KnotMonitor {
    pub fn observe(&mut self, rope: &Rope) -> KnotReport {
        let r = knot_integrity_check(rope);
        self.steps += 1;
        let worse = match (&self.worst, r.min_distance) {
            (None, _) => true,
            (Some(w), Some(d)) => w.min_distance.is_none_or(|m| d < m),
            (Some(_), None) => false,
        };
        if worse {
            self.worst = Some(r);
        }
        r
    }

    /// True when every observed state passed.
    pub fn pass(&self) -> bool {
        self.worst.is_none_or(|w| w.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::Vec3;

    #[test]
    fn straight_rope_passes() {
        let r = Rope::straight(Vec3::zeros(), Vec3::x(), 20, 0.05, 0.02).unwrap();
        let rep = knot_integrity_check(&r);
        assert!(rep.pass);
        assert!(rep.min_distance.unwrap() >= 0.05 - 1e-12);
    }
}
