//! TOML model file.
//!
//! ```toml
//! vertices = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
//! edges = [[0, 1]]
//! weights = [[[0, 1.0]], [[0, 0.5], [1, 0.5]]]
//!
//! [[bones]]
//! name = "root"
//! parent = -1
//! bind = [1.0]
//! ```
//!
//! `bind` is the bone's bind-pose motor as storage coefficients (trailing
//! zeros may be omitted); the binding offset is its reverse. `parent = -1`
//! marks a root. `weights[m]` lists `[bone, weight]` pairs for vertex `m`.

use super::{Influence, SkinBinding, SkinError, SkinnedModel};
use crate::cga::{Multivector, Vec3};
use crate::format::{self, FormatError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Model(#[from] SkinError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoneEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    parent: i64,
    bind: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    vertices: Vec<[f64; 3]>,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    weights: Vec<Vec<(usize, f64)>>,
    bones: Vec<BoneEntry>,
}

pub fn parse_model(text: &str) -> Result<SkinnedModel, ModelFileError> {
    let file: ModelFile = toml::from_str(text).map_err(FormatError::from)?;
    let n = file.bones.len();
    let mut parents = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n);
    for (i, bone) in file.bones.iter().enumerate() {
        parents.push(match bone.parent {
            -1 => None,
            p if p >= 0 && (p as usize) < n => Some(p as usize),
            p => {
                return Err(FormatError::Invalid(format!("bone {i}: parent {p} out of range")).into());
            }
        });
        offsets.push(format::multivector_from_list(&bone.bind)?.reverse());
    }
    let influences = file
        .weights
        .iter()
        .map(|list| list.iter().map(|&(bone, weight)| Influence { bone, weight }).collect())
        .collect();
    let rest = file.vertices.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect();
    let binding = SkinBinding::new(influences, offsets)?;
    Ok(SkinnedModel::new(rest, binding, parents, file.edges)?)
}

pub fn load_model(path: &Path) -> Result<SkinnedModel, ModelFileError> {
    parse_model(&format::read_text(path)?)
}

/// Serializes a model. Bones are named `bone<i>` unless `names` is given.
pub fn model_to_toml(model: &SkinnedModel, names: Option<&[String]>) -> Result<String, ModelFileError> {
    let bones = model
        .binding()
        .offsets()
        .iter()
        .enumerate()
        .map(|(i, b)| BoneEntry {
            name: Some(names.and_then(|n| n.get(i).cloned()).unwrap_or_else(|| format!("bone{i}"))),
            parent: model.parents()[i].map_or(-1, |p| p as i64),
            bind: format::multivector_to_list(&Multivector::reverse(b)),
        })
        .collect();
    let file = ModelFile {
        vertices: model.rest().iter().map(|v| [v.x, v.y, v.z]).collect(),
        edges: model.edges().to_vec(),
        weights: model.binding().influences().iter().map(|l| l.iter().map(|i| (i.bone, i.weight)).collect()).collect(),
        bones,
    };
    Ok(toml::to_string(&file).map_err(FormatError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"
vertices = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
edges = [[0, 1]]
weights = [[[0, 1.0]], [[0, 0.5], [1, 0.5]]]

[[bones]]
name = "root"
parent = -1
bind = [1.0]

[[bones]]
parent = 0
bind = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5]
"#;

    #[test]
    fn parses_and_round_trips() {
        let model = parse_model(DOC).unwrap();
        assert_eq!(model.bone_count(), 2);
        assert_eq!(model.parents(), &[None, Some(0)]);
        let text = model_to_toml(&model, None).unwrap();
        assert_eq!(parse_model(&text).unwrap(), model);
    }

    #[test]
    fn invalid_weights_fail() {
        let bad = DOC.replace("[[0, 0.5], [1, 0.5]]", "[[0, 0.5], [1, 0.6]]");
        assert!(matches!(parse_model(&bad), Err(ModelFileError::Model(SkinError::WeightSum { .. }))));
        let bad = DOC.replace("parent = 0", "parent = 7");
        assert!(matches!(parse_model(&bad), Err(ModelFileError::Format(_))));
    }
}
