//! TOML track file.
//!
//! ```toml
//! frame_rate = 60.0
//! bone_count = 1
//!
//! [[frames]]
//! motors = [[1.0]]
//! ```
//!
//! Each frame lists one motor per bone as storage coefficients; trailing zero
//! coefficients may be omitted.

use super::{CodecError, PoseTrack};
use crate::format::{self, FormatError};
use crate::skinning::{PoseSample, SkinError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackFileError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Track(#[from] CodecError),
}

impl From<SkinError> for TrackFileError {
    fn from(e: SkinError) -> Self {
        TrackFileError::Track(e.into())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameEntry {
    motors: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TrackFile {
    frame_rate: f64,
    bone_count: usize,
    frames: Vec<FrameEntry>,
}

pub fn parse_track(text: &str) -> Result<PoseTrack, TrackFileError> {
    let file: TrackFile = toml::from_str(text).map_err(FormatError::from)?;
    let mut frames = Vec::with_capacity(file.frames.len());
    for (k, f) in file.frames.iter().enumerate() {
        if f.motors.len() != file.bone_count {
            return Err(FormatError::Invalid(format!(
                "frame {k} has {} motors, bone_count is {}",
                f.motors.len(),
                file.bone_count
            ))
            .into());
        }
        let motors = f.motors.iter().map(|m| format::multivector_from_list(m)).collect::<Result<Vec<_>, _>>()?;
        frames.push(PoseSample::new(motors)?);
    }
    Ok(PoseTrack::new(file.frame_rate, frames)?)
}

pub fn load_track(path: &Path) -> Result<PoseTrack, TrackFileError> {
    parse_track(&format::read_text(path)?)
}

pub fn track_to_toml(track: &PoseTrack) -> Result<String, TrackFileError> {
    let file = TrackFile {
        frame_rate: track.frame_rate(),
        bone_count: track.bone_count(),
        frames: track
            .frames()
            .iter()
            .map(|f| FrameEntry { motors: f.motors().iter().map(format::multivector_to_list).collect() })
            .collect(),
    };
    Ok(toml::to_string(&file).map_err(FormatError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::{rotor, translator, Vec3};

    #[test]
    fn round_trip_is_bit_exact() {
        let frames = (0..3)
            .map(|k| {
                let m = translator(Vec3::new(0.1 * k as f64, 0.0, 1.0 / 3.0)) * rotor(Vec3::y(), 0.7).unwrap();
                PoseSample::new(vec![m]).unwrap()
            })
            .collect();
        let track = PoseTrack::new(60.0, frames).unwrap();
        let text = track_to_toml(&track).unwrap();
        assert_eq!(parse_track(&text).unwrap(), track);
    }

    #[test]
    fn bone_count_is_checked() {
        let text = "frame_rate = 60.0\nbone_count = 2\n[[frames]]\nmotors = [[1.0]]\n";
        assert!(matches!(parse_track(text), Err(TrackFileError::Format(FormatError::Invalid(_)))));
    }
}
