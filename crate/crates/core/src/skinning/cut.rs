use super::{SkinBinding, SkinError, SkinnedModel};
use crate::cga::Vec3;

/// Cutting plane through `point` with normal `normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub point: Vec3,
    pub normal: Vec3,
}

/// One side of a cut. `source_indices[i]` is the original index of vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPart {
    pub model: SkinnedModel,
    pub source_indices: Vec<usize>,
}

/// Splits a model by plane side. Vertices on the plane go to the positive
/// side. Edges that cross the plane are dropped; each part keeps the full
/// skeleton and its own copy of the influence data, so both skin
/// independently. A plane that leaves one side empty returns a single part.
pub fn cut_plane(model: &SkinnedModel, plane: &Plane) -> Result<Vec<ModelPart>, SkinError> {
    let norm = plane.normal.norm();
    if !(norm > 1e-9) || !norm.is_finite() {
        return Err(SkinError::DegeneratePlane { norm });
    }
    let n = plane.normal / norm;
    let side: Vec<bool> = model.rest().iter().map(|p| (p - plane.point).dot(&n) >= 0.0).collect();

    let mut parts = Vec::new();
    for keep in [true, false] {
        let source: Vec<usize> = (0..model.vertex_count()).filter(|&i| side[i] == keep).collect();
        if source.is_empty() {
            continue;
        }
        let mut remap = vec![usize::MAX; model.vertex_count()];
        for (new, &old) in source.iter().enumerate() {
            remap[old] = new;
        }
        let rest = source.iter().map(|&i| model.rest()[i]).collect();
        let influences = source.iter().map(|&i| model.binding().influences()[i].clone()).collect();
        let binding = SkinBinding::new(influences, model.binding().offsets().to_vec())?;
        let edges = model
            .edges()
            .iter()
            .filter(|e| side[e[0]] == keep && side[e[1]] == keep)
            .map(|e| [remap[e[0]], remap[e[1]]])
            .collect();
        let part = SkinnedModel::new(rest, binding, model.parents().to_vec(), edges)?;
        parts.push(ModelPart { model: part, source_indices: source });
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::Multivector;
    use crate::skinning::Influence;

    fn segment() -> SkinnedModel {
        let rest = vec![Vec3::zeros(), Vec3::x()];
        let inf = vec![vec![Influence { bone: 0, weight: 1.0 }]; 2];
        let binding = SkinBinding::new(inf, vec![Multivector::ONE]).unwrap();
        SkinnedModel::new(rest, binding, vec![None], vec![[0, 1]]).unwrap()
    }

    #[test]
    fn far_plane_leaves_one_part() {
        let plane = Plane { point: Vec3::new(10.0, 0.0, 0.0), normal: Vec3::x() };
        let parts = cut_plane(&segment(), &plane).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].model, segment());
    }

    #[test]
    fn bisected_segment_splits_in_two() {
        let plane = Plane { point: Vec3::new(0.5, 0.0, 0.0), normal: Vec3::x() };
        let parts = cut_plane(&segment(), &plane).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].source_indices, vec![1]);
        assert_eq!(parts[1].source_indices, vec![0]);
        assert!(parts.iter().all(|p| p.model.edges().is_empty() && p.model.vertex_count() == 1));
    }

    #[test]
    fn zero_normal_is_rejected() {
        let plane = Plane { point: Vec3::zeros(), normal: Vec3::zeros() };
        assert!(matches!(cut_plane(&segment(), &plane), Err(SkinError::DegeneratePlane { .. })));
    }
}
