use std::path::Path;
use std::str::FromStr;

use default_miner_core::{HyperparameterSpace, RunRecord, Value};

use super::{read_file, FormatError};

/// Whether larger measure values are better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Decide from the measure name; see [`Direction::higher_is_better`].
    #[default]
    Auto,
    Higher,
    Lower,
}

const HIGHER_IS_BETTER: &[&str] = &[
    "accuracy", "acc", "auc", "roc_auc", "area_under_roc_curve", "f1", "f_measure", "precision", "recall", "r2",
    "kappa", "balanced_accuracy", "predictive_accuracy",
];

impl Direction {
    pub fn higher_is_better(self, measure: &str) -> bool {
        match self {
            Direction::Higher => true,
            Direction::Lower => false,
            Direction::Auto => HIGHER_IS_BETTER.contains(&measure.to_ascii_lowercase().as_str()),
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Direction::Auto),
            "higher" => Ok(Direction::Higher),
            "lower" => Ok(Direction::Lower),
            other => Err(format!("unknown direction `{other}` (auto|higher|lower)")),
        }
    }
}

/// Parses a runs CSV with header `dataset_id,<dimension names...>,measure,value`.
/// Dimension columns may appear in any order.
pub fn parse_runs(text: &str, space: &HyperparameterSpace, direction: Direction, context: &str) -> Result<Vec<RunRecord>, FormatError> {
    let csv_err = |line: u64, message: String| FormatError::Csv { context: context.to_string(), line, message };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let dataset_col = find("dataset_id").ok_or_else(|| csv_err(1, "missing column `dataset_id`".into()))?;
    let measure_col = find("measure").ok_or_else(|| csv_err(1, "missing column `measure`".into()))?;
    let value_col = find("value").ok_or_else(|| csv_err(1, "missing column `value`".into()))?;
    let dim_cols = space
        .dimensions()
        .iter()
        .map(|d| find(&d.name).ok_or_else(|| csv_err(1, format!("missing column for dimension `{}`", d.name))))
        .collect::<Result<Vec<_>, _>>()?;
    if headers.len() != dim_cols.len() + 3 {
        let known: Vec<&str> = space.dimensions().iter().map(|d| d.name.as_str()).collect();
        let extra: Vec<&str> =
            headers.iter().filter(|h| !known.contains(h) && !["dataset_id", "measure", "value"].contains(h)).collect();
        return Err(csv_err(1, format!("unexpected columns {extra:?}")));
    }

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let mut values = Vec::with_capacity(dim_cols.len());
        for (d, &col) in space.dimensions().iter().zip(&dim_cols) {
            let raw = &row[col];
            let v = if d.is_numeric() {
                Value::Number(raw.parse::<f64>().map_err(|_| csv_err(line, format!("`{}`: not a number: `{raw}`", d.name)))?)
            } else {
                Value::Level(raw.to_string())
            };
            values.push(v);
        }
        space.validate(&values).map_err(|e| csv_err(line, e.to_string()))?;
        let measure = row[measure_col].to_string();
        let raw = &row[value_col];
        let value: f64 = raw.parse().map_err(|_| csv_err(line, format!("value: not a number: `{raw}`")))?;
        if !value.is_finite() {
            return Err(csv_err(line, "value must be finite".into()));
        }
        out.push(RunRecord {
            dataset_id: row[dataset_col].to_string(),
            values,
            higher_is_better: direction.higher_is_better(&measure),
            measure,
            value,
        });
    }
    if out.is_empty() {
        return Err(csv_err(1, "no run records".into()));
    }
    Ok(out)
}

pub fn read_runs(path: &Path, space: &HyperparameterSpace, direction: Direction) -> Result<Vec<RunRecord>, FormatError> {
    parse_runs(&read_file(path)?, space, direction, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use default_miner_core::{ingest_runs, Dimension, Scale};

    fn space() -> HyperparameterSpace {
        HyperparameterSpace::new(vec![
            Dimension::continuous("gamma", 0.5, 8.0, Scale::Log2),
            Dimension::categorical("kernel", ["rbf", "linear"]),
        ])
        .unwrap()
    }

    #[test]
    fn parses_and_ingests() {
        let text = "dataset_id,kernel,gamma,measure,value\n\
                    iris,rbf,1,accuracy,0.9\n\
                    iris,linear,2,accuracy,0.5\n\
                    wine,rbf,1,accuracy,0.1\n\
                    wine,linear,2,accuracy,0.5\n";
        let runs = parse_runs(text, &space(), Direction::Auto, "runs").unwrap();
        assert_eq!(runs.len(), 4);
        assert!(runs[0].higher_is_better);
        assert_eq!(runs[1].values, vec![Value::Number(2.0), Value::Level("linear".into())]);
        let mx = ingest_runs(&runs, &space()).unwrap();
        assert_eq!(mx.to_rows(), vec![vec![-0.9, -0.5], vec![-0.1, -0.5]]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_number = "dataset_id,gamma,kernel,measure,value\niris,1,rbf,auc,0.9\niris,x,rbf,auc,0.3\n";
        let err = parse_runs(bad_number, &space(), Direction::Auto, "runs.csv").unwrap_err();
        assert_eq!(err.to_string(), "runs.csv: line 3: `gamma`: not a number: `x`");

        let out_of_range = "dataset_id,gamma,kernel,measure,value\niris,64,rbf,auc,0.9\n";
        let err = parse_runs(out_of_range, &space(), Direction::Auto, "runs.csv").unwrap_err();
        assert!(err.to_string().starts_with("runs.csv: line 2:"), "{err}");

        let missing = "dataset_id,gamma,measure,value\niris,1,auc,0.9\n";
        assert!(parse_runs(missing, &space(), Direction::Auto, "r").unwrap_err().to_string().contains("kernel"));
        let extra = "dataset_id,gamma,kernel,seed,measure,value\niris,1,rbf,3,auc,0.9\n";
        assert!(parse_runs(extra, &space(), Direction::Auto, "r").unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn direction_rules() {
        assert!(Direction::Auto.higher_is_better("AUC"));
        assert!(!Direction::Auto.higher_is_better("rmse"));
        assert!(Direction::Higher.higher_is_better("rmse"));
        assert!(!Direction::Lower.higher_is_better("auc"));
        assert!("sideways".parse::<Direction>().is_err());
    }
}
