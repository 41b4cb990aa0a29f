use std::path::{Path, PathBuf};

use default_miner_core::{Configuration, HyperparameterSpace, Provenance, RiskMatrix, Value};
use serde::{Deserialize, Serialize};

use super::space::{space_from_json, space_to_json};
use super::{check_version, read_file, to_json_bytes, write_file, FormatError, FORMAT_VERSION};

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format_version: u32,
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    space: Option<serde_json::Value>,
    configurations: Vec<Configuration>,
}

/// `m.csv` -> `m.configs.json`.
pub fn sidecar_path(matrix_path: &Path) -> PathBuf {
    let stem = matrix_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    matrix_path.with_file_name(format!("{stem}.configs.json"))
}

fn matrix_csv(matrix: &RiskMatrix) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["dataset_id".to_string()];
    header.extend((0..matrix.cols()).map(|m| m.to_string()));
    w.write_record(&header).expect("in-memory write");
    for (k, id) in matrix.dataset_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(matrix.row(k).iter().map(|x| x.to_string()));
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes the matrix CSV and its configuration sidecar.
pub fn write_matrix(path: &Path, matrix: &RiskMatrix, space: Option<&HyperparameterSpace>) -> Result<(), FormatError> {
    let sidecar = Sidecar {
        format_version: FORMAT_VERSION,
        provenance: matrix.provenance(),
        space: space.map(space_to_json),
        configurations: matrix.configurations().to_vec(),
    };
    write_file(path, &matrix_csv(matrix))?;
    write_file(&sidecar_path(path), &to_json_bytes(&sidecar))
}

/// Reads a matrix CSV. The sidecar, when present, supplies configuration
/// values, provenance and the space; without it configurations carry only
/// their column index and provenance is `raw`.
pub fn read_matrix(path: &Path) -> Result<(RiskMatrix, Option<HyperparameterSpace>), FormatError> {
    let context = path.display().to_string();
    let csv_err = |line: u64, message: String| FormatError::Csv { context: context.clone(), line, message };
    let text = read_file(path)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    if headers.get(0) != Some("dataset_id") {
        return Err(csv_err(1, "first column must be `dataset_id`".into()));
    }
    for (m, h) in headers.iter().skip(1).enumerate() {
        if h.parse::<usize>() != Ok(m) {
            return Err(csv_err(1, format!("column {} must be configuration id {m}, found `{h}`", m + 2)));
        }
    }
    let cols = headers.len() - 1;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        ids.push(rec[0].to_string());
        let row = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(m, s)| {
                let x: f64 = s.parse().map_err(|_| csv_err(line, format!("column {}: not a number: `{s}`", m + 2)))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(csv_err(line, format!("column {}: non-finite risk", m + 2)))
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }

    let side = sidecar_path(path);
    let (configurations, provenance, space) = if side.exists() {
        let side_ctx = side.display().to_string();
        let text = read_file(&side)?;
        check_version(&text, &side_ctx)?;
        let car: Sidecar =
            serde_json::from_str(&text).map_err(|source| FormatError::Json { context: side_ctx.clone(), source })?;
        if car.configurations.len() != cols || car.configurations.iter().enumerate().any(|(m, c)| c.id != m) {
            return Err(FormatError::Invalid {
                context: side_ctx,
                message: format!("configurations must list ids 0..{cols} in order"),
            });
        }
        let space = car.space.map(space_from_json).transpose()?;
        if let Some(space) = &space {
            for c in &car.configurations {
                space.validate(&c.values)?;
            }
        }
        (car.configurations, car.provenance, space)
    } else {
        ((0..cols).map(|m| Configuration::new(m, Vec::<Value>::new())).collect(), Provenance::Raw, None)
    };
    Ok((RiskMatrix::new(ids, configurations, rows, provenance)?, space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use default_miner_core::{standardize_per_dataset, Dimension, Scale};

    #[test]
    fn signed_matrix_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let space = HyperparameterSpace::new(vec![Dimension::continuous("x", 0.0, 1.0, Scale::Linear)]).unwrap();
        let raw = RiskMatrix::new(
            vec!["iris".into(), "a,b \"quoted\"".into()],
            (0..3).map(|m| Configuration::new(m, vec![Value::Number(m as f64 / 3.0)])).collect(),
            vec![vec![0.1, 0.7, 1.0 / 3.0], vec![-2.5e-300, 0.2, 1e10]],
            Provenance::Raw,
        )
        .unwrap();
        let mx = standardize_per_dataset(&raw).unwrap();
        write_matrix(&path, &mx, Some(&space)).unwrap();
        assert!(sidecar_path(&path).ends_with("m.configs.json"));
        let (back, back_space) = read_matrix(&path).unwrap();
        assert_eq!(back, mx);
        assert_eq!(back_space, Some(space));
    }

    #[test]
    fn missing_sidecar_falls_back_to_indices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "dataset_id,0,1\nd,0.5,-1\n").unwrap();
        let (mx, space) = read_matrix(&path).unwrap();
        assert_eq!(mx.to_rows(), vec![vec![0.5, -1.0]]);
        assert!(space.is_none());
        assert_eq!(mx.configurations()[1].id, 1);
    }

    #[test]
    fn malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "dataset_id,0,1\nd,0.5,abc\n").unwrap();
        assert_eq!(read_matrix(&path).unwrap_err().to_string(), format!("{}: line 2: column 3: not a number: `abc`", path.display()));
        std::fs::write(&path, "id,0\nd,0.5\n").unwrap();
        assert!(read_matrix(&path).is_err());
        std::fs::write(&path, "dataset_id,0,1\nd,0.5,NaN\n").unwrap();
        assert!(read_matrix(&path).is_err());
        std::fs::write(&path, "dataset_id,0\nd,0.5\n").unwrap();
        std::fs::write(sidecar_path(&path), r#"{"format_version": 2, "provenance": "raw", "configurations": []}"#).unwrap();
        assert!(matches!(read_matrix(&path).unwrap_err(), FormatError::Version { found: 2, .. }));
    }
}
