use super::{PoseSample, SkinBinding, SkinError, SkinnedModel};
use crate::cga::{apply_versor, blade, up, CgaError, Multivector, Vec3};
use crate::tolerance;

fn check_pose(model: &SkinnedModel, pose: &PoseSample) -> Result<(), SkinError> {
    if pose.bone_count() != model.bone_count() {
        return Err(SkinError::BoneCountMismatch { expected: model.bone_count(), got: pose.bone_count() });
    }
    Ok(())
}

// -(c . e∞) of a grade-1 point.
fn weight(c: &Multivector) -> f64 {
    c[blade::EM] - c[blade::EP]
}

fn skin_one(model: &SkinnedModel, pose: &PoseSample, m: usize) -> Result<Vec3, CgaError> {
    let c = up(model.rest()[m]);
    let offsets = model.binding().offsets();
    let mut acc = Multivector::ZERO;
    for inf in &model.binding().influences()[m] {
        if inf.weight == 0.0 {
            continue;
        }
        let v = pose.motors()[inf.bone] * offsets[inf.bone];
        let moved = apply_versor(&v, &c)?;
        // A dilating bone rescales the homogeneous weight of its image; bring
        // each image back to unit weight so the blend stays a blend of
        // positions.
        let w = weight(&moved);
        if w.abs() < tolerance::NULL_WEIGHT {
            return Err(CgaError::NullWeight { weight: w });
        }
        acc += moved * (inf.weight / w);
    }
    let w = weight(&acc);
    if w.abs() < tolerance::NULL_WEIGHT {
        return Err(CgaError::NullWeight { weight: w });
    }
    let p = Vec3::new(acc[blade::E1], acc[blade::E2], acc[blade::E3]) / w;
    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
        return Err(CgaError::NullWeight { weight: w });
    }
    Ok(p)
}

/// Skins a single vertex.
pub fn skin_vertex(model: &SkinnedModel, pose: &PoseSample, m: usize) -> Result<Vec3, SkinError> {
    check_pose(model, pose)?;
    if m >= model.vertex_count() {
        return Err(SkinError::VertexOutOfRange { index: m, count: model.vertex_count() });
    }
    skin_one(model, pose, m).map_err(|source| SkinError::Vertex { vertex: m, source })
}

/// Skins every vertex in index order. All per-vertex failures are collected.
pub fn skin_model(model: &SkinnedModel, pose: &PoseSample) -> Result<Vec<Vec3>, SkinError> {
    check_pose(model, pose)?;
    let mut out = Vec::with_capacity(model.vertex_count());
    let mut errors = Vec::new();
    for m in 0..model.vertex_count() {
        match skin_one(model, pose, m) {
            Ok(p) => out.push(p),
            Err(source) => errors.push(SkinError::Vertex { vertex: m, source }),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(SkinError::Vertices(errors))
    }
}

/// `B_n = rev(bind_n)`, keeping the model's influences.
pub fn compute_bind_offsets(model: &SkinnedModel, bind: &PoseSample) -> Result<SkinBinding, SkinError> {
    check_pose(model, bind)?;
    let offsets = bind.motors().iter().map(Multivector::reverse).collect();
    SkinBinding::new(model.binding().influences().to_vec(), offsets)
}

/// Local (parent-relative) motors to global motors, `G_n = G_parent L_n`.
pub fn globalize(parents: &[Option<usize>], local: &PoseSample) -> Result<PoseSample, SkinError> {
    if parents.len() != local.bone_count() {
        return Err(SkinError::BoneCountMismatch { expected: parents.len(), got: local.bone_count() });
    }
    let n = parents.len();
    let mut global: Vec<Option<Multivector>> = vec![None; n];
    // Each pass resolves at least one more depth level of a valid forest.
    for _ in 0..=n {
        let mut pending = false;
        for b in 0..n {
            if global[b].is_some() {
                continue;
            }
            global[b] = match parents[b] {
                None => Some(local.motors()[b]),
                Some(p) if p >= n => return Err(SkinError::BadHierarchy { bone: b }),
                Some(p) => global[p].map(|g| g * local.motors()[b]),
            };
            pending |= global[b].is_none();
        }
        if !pending {
            return Ok(PoseSample::from_trusted(global.into_iter().flatten().collect()));
        }
    }
    let bone = global.iter().position(Option::is_none).unwrap_or(0);
    Err(SkinError::BadHierarchy { bone })
}
