//! Resolves input arguments: an existing path is loaded from disk, otherwise
//! the argument must name a built-in fixture.

use super::CliError;
use crate::codec::file::load_track;
use crate::codec::PoseTrack;
use crate::fixtures;
use crate::rope::file::load_rope;
use crate::rope::Rope;
use crate::skinning::file::load_model;
use crate::skinning::SkinnedModel;
use crate::softbody::file::load_body;
use crate::softbody::ParticleBody;
use std::path::{Path, PathBuf};

pub const SKELETAL: [&str; 3] = ["arm", "smooth", "walk"];
pub const BODIES: [&str; 2] = ["jello", "bar"];
pub const ROPES: [&str; 4] = ["hanging", "trefoil", "crossing_a", "crossing_b"];

fn builtin_skeletal(name: &str) -> Option<fixtures::SkeletalFixture> {
    match name {
        "arm" => Some(fixtures::arm()),
        "smooth" => Some(fixtures::smooth()),
        "walk" => Some(fixtures::walk()),
        _ => None,
    }
}

fn unknown(what: &str, arg: &str, names: &[&str]) -> CliError {
    CliError::Config(format!("{what} {arg:?} is neither an existing path nor a built-in ({})", names.join(", ")))
}

/// In a fixture directory, `name` inside it; otherwise the path itself.
fn member(path: &Path, name: &str) -> PathBuf {
    if path.is_dir() {
        path.join(name)
    } else {
        path.to_path_buf()
    }
}

pub fn model(arg: &str) -> Result<SkinnedModel, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_model(&member(path, "model.toml"))?);
    }
    builtin_skeletal(arg).map(|f| f.model).ok_or_else(|| unknown("model", arg, &SKELETAL))
}

/// A track plus the model next to it, when there is one.
pub fn track(arg: &str) -> Result<(PoseTrack, Option<SkinnedModel>), CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let track = load_track(&member(path, "track.toml"))?;
        let sibling = if path.is_dir() { path.join("model.toml") } else { path.with_file_name("model.toml") };
        let model = if sibling.exists() { Some(load_model(&sibling)?) } else { None };
        return Ok((track, model));
    }
    builtin_skeletal(arg).map(|f| (f.track, Some(f.model))).ok_or_else(|| unknown("track", arg, &SKELETAL))
}

pub fn body(arg: &str) -> Result<ParticleBody, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_body(path)?);
    }
    match arg {
        "jello" => Ok(fixtures::jello()),
        "bar" => Ok(fixtures::bar()),
        _ => Err(unknown("body", arg, &BODIES)),
    }
}

pub fn rope(arg: &str) -> Result<Rope, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_rope(path)?);
    }
    match arg {
        "hanging" => Ok(fixtures::hanging_rope()),
        "trefoil" => Ok(fixtures::trefoil().rope),
        "crossing_a" => Ok(fixtures::crossing_ropes().0),
        "crossing_b" => Ok(fixtures::crossing_ropes().1),
        _ => Err(unknown("rope", arg, &ROPES)),
    }
}
