//! Procedural skinned models and tracks.

use crate::cga::{rotor, translator, Multivector, Vec3};
use crate::codec::PoseTrack;
use crate::skinning::{compute_bind_offsets, globalize, Influence, PoseSample, SkinBinding, SkinnedModel};
use std::f64::consts::TAU;

/// A bone of a procedural rig: joint offset from the parent joint, segment
/// direction/length used to place vertices, and a sinusoidal joint swing.
struct RigBone {
    name: &'static str,
    parent: Option<usize>,
    offset: Vec3,
    segment: Vec3,
    axis: Vec3,
    amplitude: f64,
    phase: f64,
}

struct Rig {
    bones: Vec<RigBone>,
}

impl Rig {
    fn parents(&self) -> Vec<Option<usize>> {
        self.bones.iter().map(|b| b.parent).collect()
    }

    fn names(&self) -> Vec<String> {
        self.bones.iter().map(|b| b.name.to_string()).collect()
    }

    /// Local motors `T(offset) R(axis, amplitude sin(phase + 2π s))`.
    fn local_pose(&self, s: f64, root_motion: impl Fn(f64) -> Vec3) -> PoseSample {
        let motors = self
            .bones
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let angle = b.amplitude * (b.phase + TAU * s).sin();
                let mut t = b.offset;
                if i == 0 {
                    t += root_motion(s);
                }
                translator(t) * rotor(b.axis, angle).expect("rig axes are unit")
            })
            .collect();
        PoseSample::new(motors).expect("rig motors are unit")
    }

    fn bind_pose(&self) -> PoseSample {
        let motors = self.bones.iter().map(|b| translator(b.offset)).collect();
        globalize(&self.parents(), &PoseSample::new(motors).expect("translators are unit")).expect("rig is a forest")
    }

    /// Rings of vertices along each bone segment, blended with the parent
    /// near the joint.
    fn skin(&self, rings: usize, per_ring: usize, radius: f64) -> SkinnedModel {
        let bind = self.bind_pose();
        let mut rest = Vec::new();
        let mut influences = Vec::new();
        let mut edges = Vec::new();
        for (i, b) in self.bones.iter().enumerate() {
            let joint =
                crate::cga::down(&crate::cga::apply_versor(&bind.motors()[i], &crate::cga::up(Vec3::zeros())).unwrap())
                    .unwrap();
            let dir = if b.segment.norm() > 0.0 { b.segment.normalize() } else { Vec3::y() };
            let side = if dir.cross(&Vec3::z()).norm() > 1e-6 { dir.cross(&Vec3::z()).normalize() } else { Vec3::x() };
            let lift = dir.cross(&side);
            for r in 0..rings {
                let f = (r as f64 + 0.5) / rings as f64;
                let centre = joint + b.segment * f;
                let first = rest.len();
                for q in 0..per_ring {
                    let a = TAU * q as f64 / per_ring as f64;
                    rest.push(centre + (side * a.cos() + lift * a.sin()) * radius);
                    let inf = match b.parent {
                        Some(p) if f < 0.5 => {
                            let w = 0.5 + f;
                            vec![Influence { bone: i, weight: w }, Influence { bone: p, weight: 1.0 - w }]
                        }
                        _ => vec![Influence { bone: i, weight: 1.0 }],
                    };
                    influences.push(inf);
                    edges.push([first + q, first + (q + 1) % per_ring]);
                    if r > 0 {
                        edges.push([first + q, first + q - per_ring]);
                    }
                }
            }
        }
        let n = self.bones.len();
        let binding = SkinBinding::new(influences, vec![Multivector::ONE; n]).expect("rig weights sum to 1");
        let model = SkinnedModel::new(rest, binding, self.parents(), edges).expect("rig is valid");
        let offsets = compute_bind_offsets(&model, &bind).expect("bind pose is unit");
        model.with_binding(offsets).expect("offsets are unit")
    }

    fn track(&self, frames: usize, frame_rate: f64, root_motion: impl Fn(f64) -> Vec3 + Copy) -> PoseTrack {
        let parents = self.parents();
        let poses = (0..frames)
            .map(|k| {
                let local = self.local_pose(k as f64 / frames as f64, root_motion);
                globalize(&parents, &local).expect("rig is a forest")
            })
            .collect();
        PoseTrack::new(frame_rate, poses).expect("track is valid")
    }
}

pub struct SkeletalFixture {
    pub model: SkinnedModel,
    pub bone_names: Vec<String>,
    pub track: PoseTrack,
}

fn bone(
    name: &'static str,
    parent: Option<usize>,
    offset: [f64; 3],
    segment: [f64; 3],
    axis: Vec3,
    amplitude: f64,
    phase: f64,
) -> RigBone {
    RigBone { name, parent, offset: Vec3::from(offset), segment: Vec3::from(segment), axis, amplitude, phase }
}

/// Two-bone arm along +x (upper arm and forearm), elbow flexing.
pub fn arm() -> SkeletalFixture {
    let rig = Rig {
        bones: vec![
            bone("upper", None, [0.0, 0.0, 0.0], [0.5, 0.0, 0.0], Vec3::y(), 0.3, 0.0),
            bone("fore", Some(0), [0.5, 0.0, 0.0], [0.4, 0.0, 0.0], Vec3::z(), 0.8, 0.5),
        ],
    };
    SkeletalFixture {
        model: rig.skin(4, 6, 0.05),
        bone_names: rig.names(),
        track: rig.track(60, 60.0, |_| Vec3::zeros()),
    }
}

/// Single unit-length limb along +x swinging ±0.25 rad about z over
/// 120 frames.
pub fn smooth() -> SkeletalFixture {
    let rig = Rig { bones: vec![bone("limb", None, [0.0; 3], [1.0, 0.0, 0.0], Vec3::z(), 0.25, 0.0)] };
    // Vertices at 0, 0.1, ..., 1.0 along the limb so the tip sits at unit distance.
    let rest: Vec<Vec3> = (0..=10).map(|i| Vec3::new(i as f64 / 10.0, 0.0, 0.0)).collect();
    let n = rest.len();
    let edges = (0..n - 1).map(|i| [i, i + 1]).collect();
    let binding = SkinBinding::new(vec![vec![Influence { bone: 0, weight: 1.0 }]; n], vec![Multivector::ONE])
        .expect("unit weights");
    let model = SkinnedModel::new(rest, binding, vec![None], edges).expect("valid limb");
    let parents = rig.parents();
    let frames = 120;
    let poses = (0..frames)
        .map(|k| {
            let local = rig.local_pose(k as f64 / (frames - 1) as f64, |_| Vec3::zeros());
            globalize(&parents, &local).expect("single bone")
        })
        .collect();
    SkeletalFixture { model, bone_names: rig.names(), track: PoseTrack::new(60.0, poses).expect("valid track") }
}

/// Frames in one walk cycle.
pub const WALK_FRAMES: usize = 120;

/// 30-bone biped on a treadmill: one looping walk cycle at 60 Hz.
pub fn walk() -> SkeletalFixture {
    let x = Vec3::x();
    let y = Vec3::y();
    let z = Vec3::z();
    let pi = std::f64::consts::PI;
    let mut b = vec![
        bone("pelvis", None, [0.0, 1.0, 0.0], [0.0, 0.1, 0.0], y, 0.08, 0.0),
        bone("spine1", Some(0), [0.0, 0.1, 0.0], [0.0, 0.15, 0.0], y, 0.05, pi),
        bone("spine2", Some(1), [0.0, 0.15, 0.0], [0.0, 0.15, 0.0], z, 0.03, 0.0),
        bone("spine3", Some(2), [0.0, 0.15, 0.0], [0.0, 0.15, 0.0], y, 0.04, pi),
        bone("neck", Some(3), [0.0, 0.15, 0.0], [0.0, 0.1, 0.0], x, 0.04, 0.5),
        bone("head", Some(4), [0.0, 0.1, 0.0], [0.0, 0.18, 0.0], y, 0.05, 1.0),
        bone("jaw", Some(5), [0.0, 0.02, 0.06], [0.0, -0.03, 0.06], x, 0.02, 0.0),
        bone("head_end", Some(5), [0.0, 0.18, 0.0], [0.0, 0.04, 0.0], x, 0.0, 0.0),
    ];
    for (side, sign, phase) in [("l", 1.0, 0.0), ("r", -1.0, pi)] {
        let names: [&'static str; 11] = if side == "l" {
            [
                "clav_l",
                "upper_arm_l",
                "fore_arm_l",
                "hand_l",
                "finger_a_l",
                "finger_b_l",
                "thigh_l",
                "shin_l",
                "foot_l",
                "toe_l",
                "toe_end_l",
            ]
        } else {
            [
                "clav_r",
                "upper_arm_r",
                "fore_arm_r",
                "hand_r",
                "finger_a_r",
                "finger_b_r",
                "thigh_r",
                "shin_r",
                "foot_r",
                "toe_r",
                "toe_end_r",
            ]
        };
        let s = b.len();
        b.push(bone(names[0], Some(3), [0.05 * sign, 0.12, 0.0], [0.15 * sign, 0.0, 0.0], z, 0.03, phase));
        b.push(bone(names[1], Some(s), [0.15 * sign, 0.0, 0.0], [0.0, -0.28, 0.0], x, 0.35, phase + pi));
        b.push(bone(names[2], Some(s + 1), [0.0, -0.28, 0.0], [0.0, -0.25, 0.0], x, 0.25, phase + pi + 0.6));
        b.push(bone(names[3], Some(s + 2), [0.0, -0.25, 0.0], [0.0, -0.08, 0.0], z, 0.1, phase));
        b.push(bone(names[4], Some(s + 3), [0.0, -0.08, 0.02], [0.0, -0.06, 0.0], x, 0.08, phase));
        b.push(bone(names[5], Some(s + 3), [0.0, -0.08, -0.02], [0.0, -0.06, 0.0], x, 0.08, phase + 0.3));
        let t = b.len();
        b.push(bone(names[6], Some(0), [0.1 * sign, 0.0, 0.0], [0.0, -0.45, 0.0], x, 0.4, phase));
        b.push(bone(names[7], Some(t), [0.0, -0.45, 0.0], [0.0, -0.42, 0.0], x, 0.35, phase + 1.2));
        b.push(bone(names[8], Some(t + 1), [0.0, -0.42, 0.0], [0.0, -0.05, 0.12], x, 0.2, phase + 0.6));
        b.push(bone(names[9], Some(t + 2), [0.0, -0.05, 0.12], [0.0, 0.0, 0.06], x, 0.15, phase + 1.0));
        b.push(bone(names[10], Some(t + 3), [0.0, 0.0, 0.06], [0.0, 0.0, 0.03], x, 0.0, 0.0));
    }
    let rig = Rig { bones: b };
    debug_assert_eq!(rig.bones.len(), 30);
    // Vertical bob at twice the stride frequency.
    let bob = |s: f64| Vec3::new(0.0, 0.02 * (2.0 * TAU * s).cos(), 0.0);
    SkeletalFixture { model: rig.skin(2, 4, 0.04), bone_names: rig.names(), track: rig.track(WALK_FRAMES, 60.0, bob) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skinning::skin_model;

    #[test]
    fn walk_has_thirty_bones_and_binds_cleanly() {
        let f = walk();
        assert_eq!(f.model.bone_count(), 30);
        assert_eq!(f.track.frame_count(), WALK_FRAMES);
        let bind = f.model.binding().offsets().iter().map(Multivector::reverse).collect();
        let out = skin_model(&f.model, &PoseSample::new(bind).unwrap()).unwrap();
        for (a, b) in out.iter().zip(f.model.rest()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn smooth_is_single_bone_120_frames() {
        let f = smooth();
        assert_eq!(f.track.frame_count(), 120);
        assert_eq!(f.track.bone_count(), 1);
    }
}
