//! TOML rope file.
//!
//! ```toml
//! rest_length = 0.05
//! radius = 0.01
//! node_mass = 1.0
//! iterations = 20
//! bend_stiffness = 0.0
//! damping = 0.0
//! friction = 0.0
//! pinned = [0]
//! nodes = [[0.0, 0.0, 0.0], [0.05, 0.0, 0.0]]
//! ```
//!
//! Everything except `rest_length`, `radius` and `nodes` is optional.

use super::{Rope, RopeError};
use crate::cga::Vec3;
use crate::format::{self, FormatError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RopeFileError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Rope(#[from] RopeError),
}

fn one() -> f64 {
    1.0
}

fn twenty() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RopeFile {
    rest_length: f64,
    radius: f64,
    #[serde(default = "one")]
    node_mass: f64,
    #[serde(default = "twenty")]
    iterations: usize,
    #[serde(default)]
    bend_stiffness: f64,
    #[serde(default)]
    damping: f64,
    #[serde(default)]
    friction: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pinned: Vec<usize>,
    nodes: Vec<[f64; 3]>,
}

pub fn parse_rope(text: &str) -> Result<Rope, RopeFileError> {
    let file: RopeFile = toml::from_str(text).map_err(FormatError::from)?;
    let nodes: Vec<Vec3> = file.nodes.iter().map(|&p| Vec3::from(p)).collect();
    let mut rope =
        Rope::new(&nodes, file.node_mass, file.rest_length, file.radius, file.bend_stiffness, file.iterations)?
            .with_damping(file.damping)?
            .with_friction(file.friction)?;
    for &i in &file.pinned {
        rope.set_pinned(i, true)?;
    }
    Ok(rope)
}

pub fn load_rope(path: &Path) -> Result<Rope, RopeFileError> {
    parse_rope(&format::read_text(path)?)
}

pub fn rope_to_toml(rope: &Rope) -> Result<String, RopeFileError> {
    let mass = rope.nodes().first().map_or(1.0, |n| n.mass);
    if rope.nodes().iter().any(|n| n.mass != mass) {
        return Err(FormatError::Invalid("rope files store a single node mass".into()).into());
    }
    let file = RopeFile {
        rest_length: rope.rest_length(),
        radius: rope.radius(),
        node_mass: mass,
        iterations: rope.iterations(),
        bend_stiffness: rope.bend_stiffness(),
        damping: rope.damping(),
        friction: rope.friction(),
        pinned: rope.nodes().iter().enumerate().filter(|(_, n)| n.pinned).map(|(i, _)| i).collect(),
        nodes: rope.nodes().iter().map(|n| [n.position.x, n.position.y, n.position.z]).collect(),
    };
    Ok(toml::to_string(&file).map_err(FormatError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let mut r = Rope::straight(Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0, 2.0, 0.5), 7, 0.037, 0.011)
            .unwrap()
            .with_damping(0.02)
            .unwrap()
            .with_friction(0.3)
            .unwrap();
        r.set_pinned(0, true).unwrap();
        let back = parse_rope(&rope_to_toml(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_bad_pin() {
        let text = "rest_length = 0.1\nradius = 0.01\npinned = [5]\nnodes = [[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]]\n";
        assert!(matches!(parse_rope(text), Err(RopeFileError::Rope(RopeError::IndexOutOfRange { index: 5, .. }))));
    }
}
