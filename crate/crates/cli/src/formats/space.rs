use std::path::Path;

use default_miner_core::{Dimension, DimensionKind, HyperparameterSpace, Scale};
use serde::{Deserialize, Serialize};

use super::{read_file, FormatError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    dimensions: Vec<DimensionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionDoc {
    name: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<Scale>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<String>>,
}

fn invalid(message: String) -> FormatError {
    FormatError::Invalid { context: "space".into(), message }
}

fn dimension(doc: DimensionDoc) -> Result<Dimension, FormatError> {
    let bounds = |doc: &DimensionDoc| -> Result<(f64, f64), FormatError> {
        let low = doc.low.ok_or_else(|| invalid(format!("dimension `{}`: missing `low`", doc.name)))?;
        let high = doc.high.ok_or_else(|| invalid(format!("dimension `{}`: missing `high`", doc.name)))?;
        Ok((low, high))
    };
    let scale = doc.scale.unwrap_or(Scale::Linear);
    match doc.kind.as_str() {
        "continuous" => {
            let (low, high) = bounds(&doc)?;
            Ok(Dimension::continuous(doc.name, low, high, scale))
        }
        "integer" => {
            let (low, high) = bounds(&doc)?;
            Ok(Dimension::integer(doc.name, low, high, scale))
        }
        "categorical" => {
            let levels = doc.levels.ok_or_else(|| invalid(format!("dimension `{}`: missing `levels`", doc.name)))?;
            Ok(Dimension::categorical(doc.name, levels))
        }
        other => Err(invalid(format!("dimension `{}`: unknown kind `{other}`", doc.name))),
    }
}

/// Parses and validates a space spec document.
pub fn parse_space(text: &str) -> Result<HyperparameterSpace, FormatError> {
    let doc: SpaceDoc =
        serde_json::from_str(text).map_err(|source| FormatError::Json { context: "space".into(), source })?;
    let dims = doc.dimensions.into_iter().map(dimension).collect::<Result<Vec<_>, _>>()?;
    Ok(HyperparameterSpace::new(dims)?)
}

pub fn read_space(path: &Path) -> Result<HyperparameterSpace, FormatError> {
    parse_space(&read_file(path)?).map_err(|e| match e {
        FormatError::Json { source, .. } => FormatError::Json { context: path.display().to_string(), source },
        FormatError::Invalid { message, .. } => FormatError::Invalid { context: path.display().to_string(), message },
        other => other,
    })
}

pub fn space_to_json(space: &HyperparameterSpace) -> serde_json::Value {
    let dimensions = space
        .dimensions()
        .iter()
        .map(|d| {
            let (kind, low, high, scale, levels) = match &d.kind {
                DimensionKind::Continuous { low, high, scale } => ("continuous", Some(*low), Some(*high), Some(*scale), None),
                DimensionKind::Integer { low, high, scale } => ("integer", Some(*low), Some(*high), Some(*scale), None),
                DimensionKind::Categorical { levels } => ("categorical", None, None, None, Some(levels.clone())),
            };
            DimensionDoc { name: d.name.clone(), kind: kind.into(), low, high, scale, levels }
        })
        .collect();
    serde_json::to_value(SpaceDoc { dimensions }).expect("space serializes")
}

pub(crate) fn space_from_json(value: serde_json::Value) -> Result<HyperparameterSpace, FormatError> {
    parse_space(&value.to_string())
}
