//! Procedural ropes: a hanging line, a pre-threaded overhand (open trefoil)
//! knot and a pair of crossing ropes.
//!
//! Fixture speeds stay below one collision radius per step; there is no
//! continuous collision detection.

use crate::cga::Vec3;
use crate::rope::Rope;
use std::f64::consts::{PI, TAU};

/// 30 nodes, 0.1 spacing, horizontal along +x; pin node 0 to hang it.
pub fn hanging_rope() -> Rope {
    Rope::straight(Vec3::new(0.0, 4.0, 0.0), Vec3::x(), 30, 0.1, 0.01)
        .and_then(|r| r.with_iterations(20))
        .and_then(|r| r.with_damping(0.02))
        .expect("valid rope")
}

/// Collision radius of the knot rope.
pub const KNOT_RADIUS: f64 = 0.01;
/// Nominal segment rest length of the knot rope.
pub const KNOT_SEGMENT: f64 = 0.025;

fn trefoil_point(t: f64, scale: f64) -> Vec3 {
    Vec3::new(t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()) * scale
}

/// Resamples a dense polyline at uniform arc length close to `step`, hitting
/// both endpoints. Returns the nodes and the exact spacing.
fn resample(dense: &[Vec3], step: f64) -> (Vec<Vec3>, f64) {
    let total: f64 = dense.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let count = (total / step).round().max(1.0) as usize;
    let step = total / count as f64;
    let mut out = vec![dense[0]];
    let mut carried = 0.0;
    for w in dense.windows(2) {
        let seg = (w[1] - w[0]).norm();
        let mut along = step - carried;
        while along <= seg {
            out.push(w[0] + (w[1] - w[0]) * (along / seg));
            along += step;
        }
        carried = seg - (along - step);
    }
    out.truncate(count);
    out.push(*dense.last().expect("non-empty polyline"));
    (out, step)
}

/// Open trefoil with straight tails. The knot proper is the trefoil curve
/// with a short arc removed at an outer lobe; each tail leaves radially and
/// sideways so the tails never cross.
pub struct TrefoilFixture {
    pub rope: Rope,
    /// Pull direction of node 0 and of the last node.
    pub pull: [Vec3; 2],
}

pub fn trefoil() -> TrefoilFixture {
    let scale = 0.06;
    let gap = 0.25;
    let mut dense = Vec::new();
    let tail = 20.0 * KNOT_SEGMENT;
    let start = trefoil_point(PI + gap, scale);
    let end = trefoil_point(PI - gap + TAU, scale);
    let dir_a = Vec3::new(1.0, -1.0, 0.0).normalize();
    let dir_b = Vec3::new(-1.0, -1.0, 0.0).normalize();
    let n_tail = 400;
    for i in (1..=n_tail).rev() {
        dense.push(start + dir_a * (tail * i as f64 / n_tail as f64));
    }
    let n_knot = 20_000;
    for i in 0..=n_knot {
        let t = PI + gap + (TAU - 2.0 * gap) * i as f64 / n_knot as f64;
        dense.push(trefoil_point(t, scale));
    }
    for i in 1..=n_tail {
        dense.push(end + dir_b * (tail * i as f64 / n_tail as f64));
    }
    let (nodes, spacing) = resample(&dense, KNOT_SEGMENT);
    let rope = Rope::new(&nodes, 1.0, spacing, KNOT_RADIUS, 0.05, 20)
        .and_then(|r| r.with_damping(0.02))
        .and_then(|r| r.with_friction(0.3))
        .expect("valid rope");
    TrefoilFixture { rope, pull: [dir_a, dir_b] }
}

/// Two 21-node ropes crossing at right angles, separated vertically by
/// three radii, ends free.
pub fn crossing_ropes() -> (Rope, Rope) {
    let r = 0.01;
    let a = Rope::straight(Vec3::new(-0.25, 0.015, 0.0), Vec3::x(), 21, 0.025, r).expect("valid rope");
    let b = Rope::straight(Vec3::new(0.0, -0.015, -0.25), Vec3::z(), 21, 0.025, r).expect("valid rope");
    (a, b)
}
