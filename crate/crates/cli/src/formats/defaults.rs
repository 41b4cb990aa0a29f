use std::path::Path;

use default_miner_core::{DefaultSet, ExactOutcome, HyperparameterSpace, SolveStatus};
use serde::{Deserialize, Serialize};

use super::{check_version, read_file, to_json_bytes, write_file, FormatError, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusRecord {
    /// `optimal` or `interrupted`.
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    pub nodes: u64,
}

impl From<&ExactOutcome> for StatusRecord {
    fn from(out: &ExactOutcome) -> Self {
        match out.status {
            SolveStatus::Optimal => StatusRecord { state: "optimal".into(), lower_bound: None, gap: None, nodes: out.nodes },
            SolveStatus::Interrupted { lower_bound, gap } => StatusRecord {
                state: "interrupted".into(),
                lower_bound: Some(lower_bound),
                gap: Some(gap),
                nodes: out.nodes,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefaultSetFile {
    pub format_version: u32,
    /// Dimension names, aligned with each configuration's values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<Vec<String>>,
    #[serde(flatten)]
    pub set: DefaultSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<StatusRecord>,
}

impl DefaultSetFile {
    pub fn new(set: DefaultSet, space: Option<&HyperparameterSpace>, status: Option<StatusRecord>) -> Self {
        DefaultSetFile {
            format_version: FORMAT_VERSION,
            dimensions: space.map(|s| s.dimensions().iter().map(|d| d.name.clone()).collect()),
            set,
            status,
        }
    }
}

pub fn write_default_set(path: &Path, file: &DefaultSetFile) -> Result<(), FormatError> {
    write_file(path, &to_json_bytes(file))
}

pub fn read_default_set(path: &Path) -> Result<DefaultSetFile, FormatError> {
    let context = path.display().to_string();
    let text = read_file(path)?;
    check_version(&text, &context)?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { context, source })
}
