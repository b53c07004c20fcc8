use super::{interpolate_keys, CodecError, Key, KeyframeTrack, PoseTrack};
use crate::cga::{apply_versor, down, up, versor_to_affine, CgaError, Multivector, Vec3};
use crate::skinning::SkinnedModel;
use nalgebra::Matrix3;

pub type Affine = (Matrix3<f64>, Vec3);

/// Bone-local images `B_n c[m] rev(B_n)` of every vertex a bone influences.
///
/// A skinned vertex is a convex blend of the per-bone images `M_n q_n`, so
/// keeping every bone's image within epsilon keeps the blend within epsilon.
/// A bone that influences nothing gets unit probe points in its own frame.
#[derive(Debug, Clone)]
pub struct BoneProbes {
    points: Vec<Vec3>,
}

impl BoneProbes {
    pub fn new(model: &SkinnedModel, bone: usize) -> Result<Self, CgaError> {
        let offset = &model.binding().offsets()[bone];
        let mut points = Vec::new();
        for (m, list) in model.binding().influences().iter().enumerate() {
            if list.iter().any(|i| i.bone == bone && i.weight > 0.0) {
                points.push(down(&apply_versor(offset, &up(model.rest()[m]))?)?);
            }
        }
        if points.is_empty() {
            points = vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Largest probe displacement between two affine maps.
    pub fn error_affine(&self, a: &Affine, b: &Affine) -> f64 {
        let dl = a.0 - b.0;
        let dt = a.1 - b.1;
        self.points.iter().fold(0.0f64, |w, p| w.max((dl * p + dt).norm()))
    }

    pub fn error(&self, a: &Multivector, b: &Multivector) -> Result<f64, CgaError> {
        Ok(self.error_affine(&versor_to_affine(a)?, &versor_to_affine(b)?))
    }
}

struct BoneReducer<'a> {
    track: &'a PoseTrack,
    bone: usize,
    probes: BoneProbes,
    truth: Vec<Affine>,
}

impl<'a> BoneReducer<'a> {
    fn new(track: &'a PoseTrack, model: &SkinnedModel, bone: usize) -> Result<Self, CgaError> {
        let truth =
            (0..track.frame_count()).map(|k| versor_to_affine(track.motor(k, bone))).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { track, bone, probes: BoneProbes::new(model, bone)?, truth })
    }

    fn segment_errors(&self, keys: &[Key], lo: usize, errors: &mut [f64]) -> Result<(), CgaError> {
        let (a, b) = (keys[lo].frame, keys[lo + 1].frame);
        for k in a + 1..b {
            let approx = versor_to_affine(&interpolate_keys(&keys[lo..lo + 2], k)?)?;
            errors[k] = self.probes.error_affine(&self.truth[k], &approx);
        }
        errors[a] = 0.0;
        errors[b] = 0.0;
        Ok(())
    }

    fn reduce(&self, epsilon: f64) -> Result<Vec<Key>, CgaError> {
        let n = self.track.frame_count();
        let key = |k: usize| Key { frame: k, motor: *self.track.motor(k, self.bone) };
        let mut keys = vec![key(0), key(n - 1)];
        let mut errors = vec![0.0; n];
        self.segment_errors(&keys, 0, &mut errors)?;
        loop {
            // Largest error wins; ties go to the lowest frame index.
            let (worst, err) =
                errors
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (k, e)| if e > best.1 { (k, e) } else { best });
            if !(err > epsilon) {
                break;
            }
            let pos = keys.partition_point(|k| k.frame < worst);
            keys.insert(pos, key(worst));
            self.segment_errors(&keys, pos - 1, &mut errors)?;
            self.segment_errors(&keys, pos, &mut errors)?;
        }
        Ok(keys)
    }
}

fn check_inputs(track: &PoseTrack, model: &SkinnedModel) -> Result<(), CodecError> {
    if track.frame_count() < 2 {
        return Err(CodecError::TooFewFrames { needed: 2, got: track.frame_count() });
    }
    if model.bone_count() != track.bone_count() {
        return Err(CodecError::ModelMismatch(format!(
            "model has {} bones, track has {}",
            model.bone_count(),
            track.bone_count()
        )));
    }
    Ok(())
}

/// Greedy coarse-to-fine key selection per bone.
///
/// Starting from the two endpoint keys, the frame with the largest rebuilt
/// vertex error is inserted until every frame is within `epsilon`. The
/// insertion order does not depend on `epsilon`, so a smaller epsilon always
/// yields a superset of keys.
pub fn reduce_keyframes(track: &PoseTrack, model: &SkinnedModel, epsilon: f64) -> Result<KeyframeTrack, CodecError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(CodecError::InvalidEpsilon(epsilon));
    }
    check_inputs(track, model)?;
    let mut bones = Vec::with_capacity(track.bone_count());
    for bone in 0..track.bone_count() {
        let reducer = BoneReducer::new(track, model, bone)?;
        bones.push(reducer.reduce(epsilon)?);
    }
    KeyframeTrack::new(bones, track.frame_count(), track.frame_rate())
}

/// Per-frame vertex error of one bone's keys against the source track.
pub fn bone_error_profile(
    track: &PoseTrack,
    model: &SkinnedModel,
    keys: &KeyframeTrack,
    bone: usize,
) -> Result<Vec<f64>, CodecError> {
    check_inputs(track, model)?;
    let probes = BoneProbes::new(model, bone)?;
    (0..track.frame_count()).map(|k| Ok(probes.error(track.motor(k, bone), &keys.bone_motor(bone, k)?)?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::rotor;
    use crate::codec::codec_report;
    use crate::skinning::{Influence, PoseSample, SkinBinding};

    fn limb() -> SkinnedModel {
        let rest = vec![Vec3::zeros(), Vec3::x()];
        let inf = vec![vec![Influence { bone: 0, weight: 1.0 }]; 2];
        let binding = SkinBinding::new(inf, vec![Multivector::ONE]).unwrap();
        SkinnedModel::new(rest, binding, vec![None], vec![[0, 1]]).unwrap()
    }

    fn swing(frames: usize) -> PoseTrack {
        let poses = (0..frames)
            .map(|k| {
                let a = 0.25 * (k as f64 / (frames - 1) as f64 * std::f64::consts::TAU).sin();
                PoseSample::new(vec![rotor(Vec3::z(), a).unwrap()]).unwrap()
            })
            .collect();
        PoseTrack::new(60.0, poses).unwrap()
    }

    #[test]
    fn constant_track_needs_two_keys() {
        let track = PoseTrack::new(60.0, vec![PoseSample::identity(1); 10]).unwrap();
        let keys = reduce_keyframes(&track, &limb(), 1e-6).unwrap();
        assert_eq!(keys.key_count(), 2);
        let r = codec_report(&track, &keys, Some(&limb())).unwrap();
        assert_eq!(r.compression_ratio, 5.0);
        assert_eq!(r.max_vertex_error, Some(0.0));
    }

    #[test]
    fn error_bound_holds_and_keys_shrink() {
        let track = swing(120);
        let model = limb();
        let keys = reduce_keyframes(&track, &model, 1e-3).unwrap();
        assert!(keys.key_count() < 60, "{}", keys.key_count());
        let r = codec_report(&track, &keys, Some(&model)).unwrap();
        assert!(r.max_vertex_error.unwrap() <= 1e-3);
        let tighter = reduce_keyframes(&track, &model, 1e-4).unwrap();
        assert!(tighter.key_count() >= keys.key_count());
    }

    #[test]
    fn rejects_bad_epsilon() {
        let track = swing(4);
        assert!(matches!(reduce_keyframes(&track, &limb(), 0.0), Err(CodecError::InvalidEpsilon(_))));
        assert!(matches!(reduce_keyframes(&track, &limb(), f64::NAN), Err(CodecError::InvalidEpsilon(_))));
    }
}
