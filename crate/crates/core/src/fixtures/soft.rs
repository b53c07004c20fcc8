//! Procedural soft bodies.

use crate::cga::Vec3;
use crate::softbody::{Particle, ParticleBody};

fn lattice(dims: [usize; 3], spacing: f64, origin: Vec3) -> Vec<Particle> {
    let mut out = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let p = origin + Vec3::new(i as f64, j as f64, k as f64) * spacing;
                out.push(Particle::new(p, 1.0));
            }
        }
    }
    out
}

/// Index of lattice particle `(i, j, k)`.
pub fn lattice_index(dims: [usize; 3], i: usize, j: usize, k: usize) -> usize {
    (i * dims[1] + j) * dims[2] + k
}

/// Jello dimensions.
pub const JELLO_DIMS: [usize; 3] = [4, 4, 4];

/// 4×4×4 cube, 0.1 spacing, bottom face 0.5 above the ground plane y = 0.
pub fn jello() -> ParticleBody {
    ParticleBody::new(lattice(JELLO_DIMS, 0.1, Vec3::new(-0.15, 0.5, -0.15)), None, 0.4, 0.1)
        .expect("lattice is a valid body")
        .with_ground(0.0)
}

/// Free 3×3×3 cube, 0.1 spacing, corner at the origin.
pub fn cube(stiffness: f64, damping: f64) -> ParticleBody {
    ParticleBody::new(lattice([3, 3, 3], 0.1, Vec3::zeros()), None, stiffness, damping)
        .expect("lattice is a valid body")
}

/// Bar dimensions: 12 slabs of 2×2 particles along x.
pub const BAR_DIMS: [usize; 3] = [12, 2, 2];

/// Free-floating bar along x, 0.1 spacing, one cluster per pair of adjacent
/// slabs.
pub fn bar() -> ParticleBody {
    let clusters = (0..BAR_DIMS[0] - 1).map(|i| [bar_slab(i), bar_slab(i + 1)].concat()).collect();
    ParticleBody::new(lattice(BAR_DIMS, 0.1, Vec3::zeros()), Some(clusters), 0.5, 0.1).expect("lattice is a valid body")
}

/// Particles of slab `i` of the bar.
pub fn bar_slab(i: usize) -> Vec<usize> {
    (0..BAR_DIMS[1]).flat_map(|j| (0..BAR_DIMS[2]).map(move |k| lattice_index(BAR_DIMS, i, j, k))).collect()
}
