//! Keyframe reduction for bone-motor tracks.
//!
//! Each bone keeps its own sparse key set. Intermediate frames are rebuilt by
//! normalized-linear motor interpolation between the bracketing keys.

pub mod file;
mod reduce;

pub use reduce::{bone_error_profile, reduce_keyframes, Affine, BoneProbes};

use crate::cga::{interpolate_as, CgaError, Multivector, VersorKind};
use crate::skinning::{skin_model, PoseSample, SkinError, SkinnedModel};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CodecError {
    #[error("epsilon must be finite and positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("frame rate must be finite and positive, got {0}")]
    InvalidFrameRate(f64),
    #[error("track needs at least {needed} frames, has {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("model/track mismatch: {0}")]
    ModelMismatch(String),
    #[error("frame {frame} out of range ({count} frames)")]
    OutOfRange { frame: usize, count: usize },
    #[error("bone {bone}: key frames must start at 0, end at {last} and strictly increase")]
    BadKeys { bone: usize, last: usize },
    #[error(transparent)]
    Skin(#[from] SkinError),
    #[error(transparent)]
    Cga(#[from] CgaError),
}

/// Time-indexed bone motors sampled at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseTrack {
    frame_rate: f64,
    frames: Vec<PoseSample>,
}

impl PoseTrack {
    pub fn new(frame_rate: f64, frames: Vec<PoseSample>) -> Result<Self, CodecError> {
        if !(frame_rate > 0.0) || !frame_rate.is_finite() {
            return Err(CodecError::InvalidFrameRate(frame_rate));
        }
        if frames.is_empty() {
            return Err(CodecError::TooFewFrames { needed: 1, got: 0 });
        }
        let bones = frames[0].bone_count();
        if let Some(f) = frames.iter().find(|f| f.bone_count() != bones) {
            return Err(CodecError::ModelMismatch(format!(
                "frame has {} bones, first frame has {bones}",
                f.bone_count()
            )));
        }
        Ok(Self { frame_rate, frames })
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn frames(&self) -> &[PoseSample] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn bone_count(&self) -> usize {
        self.frames[0].bone_count()
    }

    pub fn motor(&self, frame: usize, bone: usize) -> &Multivector {
        &self.frames[frame].motors()[bone]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Key {
    pub frame: usize,
    pub motor: Multivector,
}

/// Per-bone sparse keys over `frame_count` source frames.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyframeTrack {
    bones: Vec<Vec<Key>>,
    frame_count: usize,
    frame_rate: f64,
}

impl KeyframeTrack {
    pub fn new(bones: Vec<Vec<Key>>, frame_count: usize, frame_rate: f64) -> Result<Self, CodecError> {
        if frame_count < 2 {
            return Err(CodecError::TooFewFrames { needed: 2, got: frame_count });
        }
        let last = frame_count - 1;
        for (bone, keys) in bones.iter().enumerate() {
            let ordered = keys.windows(2).all(|w| w[0].frame < w[1].frame);
            let ends = keys.first().map(|k| k.frame) == Some(0) && keys.last().map(|k| k.frame) == Some(last);
            if !ordered || !ends {
                return Err(CodecError::BadKeys { bone, last });
            }
        }
        Ok(Self { bones, frame_count, frame_rate })
    }

    /// Keeps every source frame as a key.
    pub fn every_frame(track: &PoseTrack) -> Result<Self, CodecError> {
        let bones = (0..track.bone_count())
            .map(|b| (0..track.frame_count()).map(|k| Key { frame: k, motor: *track.motor(k, b) }).collect())
            .collect();
        Self::new(bones, track.frame_count(), track.frame_rate())
    }

    pub fn bones(&self) -> &[Vec<Key>] {
        &self.bones
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn bone_count(&self) -> usize {
        self.bones.len()
    }

    pub fn key_count(&self) -> usize {
        self.bones.iter().map(Vec::len).sum()
    }

    /// Motor of one bone at source frame `k`.
    pub fn bone_motor(&self, bone: usize, k: usize) -> Result<Multivector, CodecError> {
        if k >= self.frame_count {
            return Err(CodecError::OutOfRange { frame: k, count: self.frame_count });
        }
        Ok(interpolate_keys(&self.bones[bone], k)?)
    }
}

/// Interpolates a sorted key list at frame `k` (which must lie within it).
pub(crate) fn interpolate_keys(keys: &[Key], k: usize) -> Result<Multivector, CgaError> {
    let hi = keys.partition_point(|key| key.frame < k);
    let b = &keys[hi];
    if b.frame == k {
        return Ok(b.motor);
    }
    let a = &keys[hi - 1];
    let t = (k - a.frame) as f64 / (b.frame - a.frame) as f64;
    interpolate_as(&a.motor, &b.motor, t, VersorKind::Motor)
}

/// Pose at source frame `k`; exact at key frames.
pub fn reconstruct(keys: &KeyframeTrack, k: usize) -> Result<PoseSample, CodecError> {
    if k >= keys.frame_count {
        return Err(CodecError::OutOfRange { frame: k, count: keys.frame_count });
    }
    let motors = keys.bones.iter().map(|b| interpolate_keys(b, k)).collect::<Result<Vec<_>, _>>()?;
    Ok(PoseSample::from_trusted(motors))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodecReport {
    pub frame_count: usize,
    pub bone_count: usize,
    pub key_count: usize,
    pub compression_ratio: f64,
    pub max_motor_error: f64,
    pub mean_motor_error: f64,
    pub max_vertex_error: Option<f64>,
    pub mean_vertex_error: Option<f64>,
}

/// Sign-insensitive max coefficient distance (`M` and `-M` act identically).
pub fn motor_distance(a: &Multivector, b: &Multivector) -> f64 {
    a.max_abs_diff(b).min(a.max_abs_diff(&-*b))
}

/// Compares a reduced track against its source. Vertex metrics need a model.
pub fn codec_report(
    track: &PoseTrack,
    keys: &KeyframeTrack,
    model: Option<&SkinnedModel>,
) -> Result<CodecReport, CodecError> {
    if keys.bone_count() != track.bone_count() || keys.frame_count() != track.frame_count() {
        return Err(CodecError::ModelMismatch(format!(
            "keys cover {} bones x {} frames, track has {} x {}",
            keys.bone_count(),
            keys.frame_count(),
            track.bone_count(),
            track.frame_count()
        )));
    }
    if let Some(m) = model {
        if m.bone_count() != track.bone_count() {
            return Err(CodecError::ModelMismatch(format!(
                "model has {} bones, track has {}",
                m.bone_count(),
                track.bone_count()
            )));
        }
    }
    let (mut motor_max, mut motor_sum) = (0.0f64, 0.0);
    let (mut vert_max, mut vert_sum, mut vert_n) = (0.0f64, 0.0, 0usize);
    for k in 0..track.frame_count() {
        let pose = reconstruct(keys, k)?;
        for (a, b) in track.frames()[k].motors().iter().zip(pose.motors()) {
            let d = motor_distance(a, b);
            motor_max = motor_max.max(d);
            motor_sum += d;
        }
        if let Some(m) = model {
            let truth = skin_model(m, &track.frames()[k])?;
            let got = skin_model(m, &pose)?;
            for (a, b) in truth.iter().zip(&got) {
                let d = (a - b).norm();
                vert_max = vert_max.max(d);
                vert_sum += d;
                vert_n += 1;
            }
        }
    }
    let motor_n = (track.frame_count() * track.bone_count()).max(1) as f64;
    let key_count = keys.key_count();
    let ratio = if key_count == 0 { 0.0 } else { (track.frame_count() * track.bone_count()) as f64 / key_count as f64 };
    Ok(CodecReport {
        frame_count: track.frame_count(),
        bone_count: track.bone_count(),
        key_count,
        compression_ratio: ratio,
        max_motor_error: motor_max,
        mean_motor_error: motor_sum / motor_n,
        max_vertex_error: model.map(|_| vert_max),
        mean_vertex_error: model.map(|_| if vert_n == 0 { 0.0 } else { vert_sum / vert_n as f64 }),
    })
}
