//! Multivector-only linear blend skinning.
//!
//! A skinned vertex is `C[m] = Σ_n w_{m,n} (M_n B_n) c[m] rev(M_n B_n)` with
//! `c[m] = up(rest[m])`, followed by a down-projection. Because every rigid
//! sandwich keeps the e∞-weight of a point at 1, the blend down-projects to
//! exactly the weighted sum of rigidly moved positions, i.e. classic LBS.

mod cut;
pub mod file;
mod skin;

pub use cut::{cut_plane, ModelPart, Plane};
pub use skin::{compute_bind_offsets, globalize, skin_model, skin_vertex};

use crate::cga::{CgaError, Multivector, Vec3};
use crate::tolerance;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SkinError {
    #[error("vertex {vertex}: weights sum to {sum}, expected 1")]
    WeightSum { vertex: usize, sum: f64 },
    #[error("vertex {vertex}: negative or non-finite weight {weight}")]
    BadWeight { vertex: usize, weight: f64 },
    #[error("vertex {vertex} has no bone influences")]
    NoInfluence { vertex: usize },
    #[error("vertex {vertex} references bone {bone}, model has {bones}")]
    BoneOutOfRange { vertex: usize, bone: usize, bones: usize },
    #[error("bone {bone}: M * rev(M) deviates from 1 by {defect:e}")]
    NotAMotor { bone: usize, defect: f64 },
    #[error("pose has {got} bones, model has {expected}")]
    BoneCountMismatch { expected: usize, got: usize },
    #[error("vertex index {index} out of range ({count} vertices)")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("binding covers {binding} vertices, model has {vertices}")]
    VertexCountMismatch { binding: usize, vertices: usize },
    #[error("parent of bone {bone} is invalid or forms a cycle")]
    BadHierarchy { bone: usize },
    #[error("edge ({0}, {1}) references a missing vertex")]
    BadEdge(usize, usize),
    #[error("cutting plane normal is degenerate (norm {norm})")]
    DegeneratePlane { norm: f64 },
    #[error("vertex {vertex}: {source}")]
    Vertex { vertex: usize, source: CgaError },
    #[error("{} vertices failed to skin, first: {}", .0.len(), .0[0])]
    Vertices(Vec<SkinError>),
    #[error(transparent)]
    Cga(#[from] CgaError),
}

/// One bone's influence on a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Influence {
    pub bone: usize,
    pub weight: f64,
}

fn motor_defect(m: &Multivector) -> f64 {
    let n = m * &m.reverse();
    n.mass_outside(|i| i == 0) + (n.scalar_part() - 1.0).abs()
}

/// Per-vertex influence lists and per-bone bind offsets `B_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinBinding {
    influences: Vec<Vec<Influence>>,
    offsets: Vec<Multivector>,
}

impl SkinBinding {
    /// Validates weights (non-negative, summing to 1 within 1e-6), influence
    /// bone indices, and that every offset is a unit versor.
    pub fn new(influences: Vec<Vec<Influence>>, offsets: Vec<Multivector>) -> Result<Self, SkinError> {
        let bones = offsets.len();
        for (vertex, list) in influences.iter().enumerate() {
            if list.is_empty() {
                return Err(SkinError::NoInfluence { vertex });
            }
            let mut sum = 0.0;
            for inf in list {
                if !(inf.weight >= 0.0) || !inf.weight.is_finite() {
                    return Err(SkinError::BadWeight { vertex, weight: inf.weight });
                }
                if inf.bone >= bones {
                    return Err(SkinError::BoneOutOfRange { vertex, bone: inf.bone, bones });
                }
                sum += inf.weight;
            }
            if (sum - 1.0).abs() > tolerance::WEIGHT_SUM {
                return Err(SkinError::WeightSum { vertex, sum });
            }
        }
        for (bone, b) in offsets.iter().enumerate() {
            let defect = motor_defect(b);
            if !(defect <= tolerance::MOTOR_NORM) {
                return Err(SkinError::NotAMotor { bone, defect });
            }
        }
        Ok(Self { influences, offsets })
    }

    pub fn influences(&self) -> &[Vec<Influence>] {
        &self.influences
    }

    pub fn offsets(&self) -> &[Multivector] {
        &self.offsets
    }

    pub fn bone_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.influences.len()
    }
}

/// Bone motors at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSample {
    motors: Vec<Multivector>,
}

impl PoseSample {
    /// Every motor must satisfy `M rev(M) = 1` within 1e-9.
    pub fn new(motors: Vec<Multivector>) -> Result<Self, SkinError> {
        for (bone, m) in motors.iter().enumerate() {
            let defect = motor_defect(m);
            if !(defect <= tolerance::MOTOR_NORM) {
                return Err(SkinError::NotAMotor { bone, defect });
            }
        }
        Ok(Self { motors })
    }

    pub fn identity(bones: usize) -> Self {
        Self { motors: vec![Multivector::ONE; bones] }
    }

    /// Skips validation; for motors produced by this crate's own normalizing
    /// operations.
    pub(crate) fn from_trusted(motors: Vec<Multivector>) -> Self {
        Self { motors }
    }

    pub fn motors(&self) -> &[Multivector] {
        &self.motors
    }

    pub fn bone_count(&self) -> usize {
        self.motors.len()
    }

    /// Applies `global * M_n` to every bone.
    pub fn premultiplied(&self, global: &Multivector) -> Self {
        Self { motors: self.motors.iter().map(|m| global * m).collect() }
    }
}

/// Rest mesh plus skeleton and binding.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinnedModel {
    rest: Vec<Vec3>,
    binding: SkinBinding,
    parents: Vec<Option<usize>>,
    edges: Vec<[usize; 2]>,
}

impl SkinnedModel {
    pub fn new(
        rest: Vec<Vec3>,
        binding: SkinBinding,
        parents: Vec<Option<usize>>,
        edges: Vec<[usize; 2]>,
    ) -> Result<Self, SkinError> {
        if binding.vertex_count() != rest.len() {
            return Err(SkinError::VertexCountMismatch { binding: binding.vertex_count(), vertices: rest.len() });
        }
        if parents.len() != binding.bone_count() {
            return Err(SkinError::BoneCountMismatch { expected: binding.bone_count(), got: parents.len() });
        }
        check_forest(&parents)?;
        for e in &edges {
            if e[0] >= rest.len() || e[1] >= rest.len() {
                return Err(SkinError::BadEdge(e[0], e[1]));
            }
        }
        Ok(Self { rest, binding, parents, edges })
    }

    pub fn rest(&self) -> &[Vec3] {
        &self.rest
    }

    pub fn binding(&self) -> &SkinBinding {
        &self.binding
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn bone_count(&self) -> usize {
        self.parents.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.rest.len()
    }

    /// Same mesh and skeleton with a replacement binding.
    pub fn with_binding(&self, binding: SkinBinding) -> Result<Self, SkinError> {
        Self::new(self.rest.clone(), binding, self.parents.clone(), self.edges.clone())
    }
}

fn check_forest(parents: &[Option<usize>]) -> Result<(), SkinError> {
    for start in 0..parents.len() {
        let mut steps = 0;
        let mut cur = start;
        while let Some(p) = parents[cur] {
            if p >= parents.len() || steps > parents.len() {
                return Err(SkinError::BadHierarchy { bone: start });
            }
            cur = p;
            steps += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(bone: usize) -> Vec<Influence> {
        vec![Influence { bone, weight: 1.0 }]
    }

    #[test]
    fn binding_rejects_bad_weights() {
        let off = vec![Multivector::ONE; 2];
        let bad = vec![vec![Influence { bone: 0, weight: 0.5 }, Influence { bone: 1, weight: 0.4 }]];
        assert!(matches!(SkinBinding::new(bad, off.clone()), Err(SkinError::WeightSum { .. })));
        let neg = vec![vec![Influence { bone: 0, weight: 1.5 }, Influence { bone: 1, weight: -0.5 }]];
        assert!(matches!(SkinBinding::new(neg, off.clone()), Err(SkinError::BadWeight { .. })));
        assert!(matches!(SkinBinding::new(vec![vec![]], off.clone()), Err(SkinError::NoInfluence { .. })));
        assert!(matches!(SkinBinding::new(vec![one(2)], off), Err(SkinError::BoneOutOfRange { .. })));
    }

    #[test]
    fn binding_accepts_tolerance_edge() {
        let off = vec![Multivector::ONE; 2];
        let ok = vec![vec![Influence { bone: 0, weight: 0.5 }, Influence { bone: 1, weight: 0.5 + 5e-7 }]];
        assert!(SkinBinding::new(ok, off).is_ok());
    }

    #[test]
    fn binding_rejects_non_unit_offset() {
        let off = vec![Multivector::scalar(2.0)];
        assert!(matches!(SkinBinding::new(vec![one(0)], off), Err(SkinError::NotAMotor { .. })));
    }

    #[test]
    fn hierarchy_cycles_are_rejected() {
        let binding = SkinBinding::new(vec![one(0)], vec![Multivector::ONE; 2]).unwrap();
        let err = SkinnedModel::new(vec![Vec3::zeros()], binding.clone(), vec![Some(1), Some(0)], vec![]);
        assert!(matches!(err, Err(SkinError::BadHierarchy { .. })));
        assert!(SkinnedModel::new(vec![Vec3::zeros()], binding, vec![None, Some(0)], vec![]).is_ok());
    }
}
