//! Scenario runner and verification harness behind the `cgamotion` binary.
//!
//! Every run is a pure function of its scenario and seed: metrics files are
//! byte-identical across executions. Timing goes to stderr only.

pub mod drills;
pub mod run;
pub mod scenario;
pub mod sources;
pub mod verify;

use crate::cga::CgaError;
use crate::codec::file::TrackFileError;
use crate::codec::CodecError;
use crate::format::FormatError;
use crate::net::NetError;
use crate::rope::file::RopeFileError;
use crate::rope::RopeError;
use crate::skinning::file::ModelFileError;
use crate::skinning::SkinError;
use crate::softbody::file::BodyFileError;
use crate::softbody::SoftError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
    #[error("unknown suite {0:?} (expected one of {suites})", suites = verify::SUITES.join(", "))]
    UnknownSuite(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
    #[error(transparent)]
    Cga(#[from] CgaError),
    #[error(transparent)]
    Skin(#[from] SkinError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Soft(#[from] SoftError),
    #[error(transparent)]
    Rope(#[from] RopeError),
}

/// Exit status for command-line usage errors (reported by the argument parser).
pub const EXIT_USAGE: i32 = 2;

impl CliError {
    /// Process exit status. Stable within a major version.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Config(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Format(_) => 5,
            CliError::UnknownSuite(_) => 6,
            CliError::Cga(_) => 10,
            CliError::Skin(_) => 11,
            CliError::Codec(_) => 12,
            CliError::Net(_) => 13,
            CliError::Soft(_) => 14,
            CliError::Rope(_) => 15,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::ChecksFailed { .. } => "checks_failed",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Format(_) => "format",
            CliError::UnknownSuite(_) => "unknown_suite",
            CliError::Cga(_) => "algebra",
            CliError::Skin(_) => "skinning",
            CliError::Codec(_) => "codec",
            CliError::Net(_) => "net",
            CliError::Soft(_) => "softbody",
            CliError::Rope(_) => "rope",
        }
    }

    /// One-line JSON error record for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "category": self.category(), "code": self.exit_code(), "message": self.to_string() }
        })
        .to_string()
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Format(other.to_string()),
        }
    }
}

impl From<ModelFileError> for CliError {
    fn from(e: ModelFileError) -> Self {
        match e {
            ModelFileError::Format(f) => f.into(),
            ModelFileError::Model(m) => m.into(),
        }
    }
}

impl From<TrackFileError> for CliError {
    fn from(e: TrackFileError) -> Self {
        match e {
            TrackFileError::Format(f) => f.into(),
            TrackFileError::Track(t) => t.into(),
        }
    }
}

impl From<BodyFileError> for CliError {
    fn from(e: BodyFileError) -> Self {
        match e {
            BodyFileError::Format(f) => f.into(),
            BodyFileError::Body(b) => b.into(),
        }
    }
}

impl From<RopeFileError> for CliError {
    fn from(e: RopeFileError) -> Self {
        match e {
            RopeFileError::Format(f) => f.into(),
            RopeFileError::Rope(r) => r.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Serializes flat rows as CSV (header from field names) or JSON lines.
pub fn render_rows<T: Serialize>(rows: &[T], format: OutputFormat) -> Result<Vec<u8>, CliError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Format(format!("csv: {e}")))?;
            }
            w.into_inner().map_err(|e| CliError::Format(format!("csv: {e}")))
        }
        OutputFormat::Jsonl => {
            let mut out = Vec::new();
            for r in rows {
                serde_json::to_writer(&mut out, r).map_err(|e| CliError::Format(format!("json: {e}")))?;
                out.push(b'\n');
            }
            Ok(out)
        }
    }
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, bytes).map_err(io_err(path))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Format(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}
