//! On-disk formats: space specs (JSON), run records (CSV), risk matrices
//! (CSV plus a JSON sidecar), default sets and evaluation reports (JSON) and
//! CPLEX-LP exports.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so reading
//! an artifact back yields bit-identical numbers. JSON artifacts carry a
//! `format_version` field that readers check before decoding the rest.

mod defaults;
mod matrix;
mod report;
mod runs;
mod space;

use std::path::PathBuf;

use serde::Deserialize;

pub use defaults::{read_default_set, write_default_set, DefaultSetFile, StatusRecord};
pub use matrix::{read_matrix, sidecar_path, write_matrix};
pub use report::{read_report, write_cd_csv, write_report, ReportFile};
pub use runs::{parse_runs, read_runs, Direction};
pub use space::{parse_space, read_space, space_to_json};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: line {line}: {message}")]
    Csv { context: String, line: u64, message: String },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
    #[error("{context}: unsupported format_version {found} (this build reads version {expected})")]
    Version { context: String, found: u32, expected: u32 },
    #[error(transparent)]
    Core(#[from] default_miner_core::Error),
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn write_file(path: &std::path::Path, contents: &[u8]) -> Result<(), FormatError> {
    crate::atomic::write_atomic(path, contents).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<u32>,
}

/// Rejects JSON artifacts whose `format_version` differs from this build's.
pub(crate) fn check_version(text: &str, context: &str) -> Result<(), FormatError> {
    let probe: VersionProbe =
        serde_json::from_str(text).map_err(|source| FormatError::Json { context: context.to_string(), source })?;
    match probe.format_version {
        Some(FORMAT_VERSION) => Ok(()),
        Some(found) => Err(FormatError::Version { context: context.to_string(), found, expected: FORMAT_VERSION }),
        None => Err(FormatError::Invalid { context: context.to_string(), message: "missing format_version".into() }),
    }
}

pub(crate) fn to_json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable artifact");
    out.push(b'\n');
    out
}
