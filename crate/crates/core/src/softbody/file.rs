//! TOML body file.
//!
//! ```toml
//! stiffness = 0.5
//! damping = 0.1
//! ground = 0.0
//! dilation = false
//!
//! [[particles]]
//! position = [0.0, 1.0, 0.0]
//! mass = 1.0
//! pinned = false
//!
//! [[clusters]]
//! particles = [0, 1, 2, 3]
//!
//! [[spheres]]
//! center = [0.0, 0.0, 0.0]
//! radius = 0.5
//! ```
//!
//! Without `[[clusters]]` all particles form one cluster. `ground`, `dilation`,
//! `pinned`, `velocity` and `spheres` are optional.

use super::{Particle, ParticleBody, SoftError, Sphere};
use crate::cga::Vec3;
use crate::format::{self, FormatError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyFileError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Body(#[from] SoftError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParticleEntry {
    position: [f64; 3],
    mass: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pinned: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    velocity: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterEntry {
    particles: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereEntry {
    center: [f64; 3],
    radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodyFile {
    stiffness: f64,
    damping: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ground: Option<f64>,
    #[serde(default)]
    dilation: bool,
    particles: Vec<ParticleEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    clusters: Vec<ClusterEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    spheres: Vec<SphereEntry>,
}

pub fn parse_body(text: &str) -> Result<ParticleBody, BodyFileError> {
    let file: BodyFile = toml::from_str(text).map_err(FormatError::from)?;
    let particles = file
        .particles
        .iter()
        .map(|p| Particle {
            position: Vec3::from(p.position),
            velocity: p.velocity.map(Vec3::from).unwrap_or_else(Vec3::zeros),
            mass: p.mass,
            pinned: p.pinned,
        })
        .collect();
    let clusters = (!file.clusters.is_empty()).then(|| file.clusters.iter().map(|c| c.particles.clone()).collect());
    let mut body = ParticleBody::new(particles, clusters, file.stiffness, file.damping)?.with_dilation(file.dilation);
    if let Some(h) = file.ground {
        body = body.with_ground(h);
    }
    for s in &file.spheres {
        if !(s.radius > 0.0) {
            return Err(FormatError::Invalid(format!("sphere radius {} must be positive", s.radius)).into());
        }
        body = body.with_sphere(Sphere { center: Vec3::from(s.center), radius: s.radius });
    }
    Ok(body)
}

pub fn load_body(path: &Path) -> Result<ParticleBody, BodyFileError> {
    parse_body(&format::read_text(path)?)
}

/// Serializes the body's rest layout plus current velocities.
pub fn body_to_toml(body: &ParticleBody) -> Result<String, BodyFileError> {
    let file = BodyFile {
        stiffness: body.stiffness(),
        damping: body.damping(),
        ground: body.ground(),
        dilation: body.dilation(),
        particles: body
            .particles()
            .iter()
            .zip(body.rest())
            .map(|(p, r)| ParticleEntry {
                position: [r.x, r.y, r.z],
                mass: p.mass,
                pinned: p.pinned,
                velocity: (p.velocity != Vec3::zeros()).then(|| [p.velocity.x, p.velocity.y, p.velocity.z]),
            })
            .collect(),
        clusters: body.clusters().iter().map(|c| ClusterEntry { particles: c.indices().to_vec() }).collect(),
        spheres: body
            .spheres()
            .iter()
            .map(|s| SphereEntry { center: [s.center.x, s.center.y, s.center.z], radius: s.radius })
            .collect(),
    };
    Ok(toml::to_string(&file).map_err(FormatError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"
            stiffness = 0.5
            damping = 0.1
            ground = 0.0
            [[particles]]
            position = [0.0, 1.0, 0.0]
            mass = 1.0
            [[particles]]
            position = [1.0, 1.0, 0.0]
            mass = 2.0
            pinned = true
            [[particles]]
            position = [0.0, 2.0, 0.0]
            mass = 1.0
        "#;
        let body = parse_body(text).unwrap();
        assert_eq!(body.particle_count(), 3);
        assert!(body.particles()[1].pinned);
        assert_eq!(body.ground(), Some(0.0));
        let again = parse_body(&body_to_toml(&body).unwrap()).unwrap();
        assert_eq!(again, body);
    }

    #[test]
    fn rejects_bad_mass_and_unknown_fields() {
        let bad = "stiffness = 0.5\ndamping = 0.0\n[[particles]]\nposition = [0.0, 0.0, 0.0]\nmass = 0.0\n";
        assert!(matches!(parse_body(bad), Err(BodyFileError::Body(SoftError::BadMass { .. }))));
        let unknown = "stiffness = 0.5\ndamping = 0.0\nfoo = 1\nparticles = []\n";
        assert!(matches!(parse_body(unknown), Err(BodyFileError::Format(_))));
    }
}
