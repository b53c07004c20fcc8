//! Shared helpers for the structured-text (TOML) interchange files.

use crate::cga::{Multivector, BLADES};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("{0}")]
    Invalid(String),
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.to_path_buf(), source })?;
        }
    }
    std::fs::write(path, text).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

/// Coefficient list (storage basis, trailing zeros optional) to multivector.
pub fn multivector_from_list(list: &[f64]) -> Result<Multivector, FormatError> {
    if list.iter().any(|c| !c.is_finite()) {
        return Err(FormatError::Invalid("non-finite multivector coefficient".into()));
    }
    Multivector::from_slice(list).ok_or_else(|| {
        FormatError::Invalid(format!("multivector has {} coefficients, at most {BLADES} allowed", list.len()))
    })
}

/// Storage coefficients with trailing zeros removed.
pub fn multivector_to_list(m: &Multivector) -> Vec<f64> {
    m.coeffs()[..m.trimmed_len()].to_vec()
}
