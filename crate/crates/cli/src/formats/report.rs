use std::path::Path;

use default_miner_core::evaluation::EvaluationReport;
use serde::{Deserialize, Serialize};

use super::{check_version, read_file, to_json_bytes, write_file, FormatError, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format_version: u32,
    pub aggregator: String,
    pub seed: u64,
    #[serde(flatten)]
    pub report: EvaluationReport,
}

impl ReportFile {
    pub fn new(report: EvaluationReport, aggregator: String, seed: u64) -> Self {
        ReportFile { format_version: FORMAT_VERSION, aggregator, seed, report }
    }
}

pub fn write_report(path: &Path, file: &ReportFile) -> Result<(), FormatError> {
    write_file(path, &to_json_bytes(file))
}

pub fn read_report(path: &Path) -> Result<ReportFile, FormatError> {
    let context = path.display().to_string();
    let text = read_file(path)?;
    check_version(&text, &context)?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { context, source })
}

/// Plot data for a critical-difference diagram: one row per strategy.
pub fn cd_csv(report: &EvaluationReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["strategy", "average_rank", "critical_difference"]).expect("in-memory write");
    let cd = report.critical_difference.map(|c| c.to_string()).unwrap_or_default();
    for (s, r) in report.strategies.iter().zip(&report.average_ranks) {
        w.write_record([s.label.as_str(), &r.to_string(), &cd]).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_cd_csv(path: &Path, report: &EvaluationReport) -> Result<(), FormatError> {
    write_file(path, &cd_csv(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use default_miner_core::{lodo_evaluate, random_search_baseline, Aggregator, RiskMatrix};

    fn report() -> EvaluationReport {
        let mx = RiskMatrix::from_rows(vec![vec![0.1, 0.5, 0.9], vec![0.9, 0.5, 0.1], vec![-0.3, 0.2, 0.0]]).unwrap();
        let mut s = lodo_evaluate(&mx, &[1, 2], Aggregator::Median).unwrap();
        s.push(random_search_baseline(&mx, 2, 4, 10).unwrap());
        EvaluationReport::new(mx.dataset_ids().to_vec(), s).unwrap()
    }

    #[test]
    fn report_round_trip_and_version_guard() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let file = ReportFile::new(report(), "median".into(), 4);
        write_report(&path, &file).unwrap();
        assert_eq!(read_report(&path).unwrap(), file);

        let text = std::fs::read_to_string(&path).unwrap().replace("\"format_version\": 1", "\"format_version\": 2");
        std::fs::write(&path, text).unwrap();
        let err = read_report(&path).unwrap_err();
        assert!(matches!(err, FormatError::Version { found: 2, expected: 1, .. }), "{err}");
    }

    #[test]
    fn cd_plot_data() {
        let text = String::from_utf8(cd_csv(&report())).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("strategy,average_rank,critical_difference\ndefaults-n1,"));
    }
}
