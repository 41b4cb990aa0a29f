use std::path::Path;
use std::process::{Command, Output};

use default_miner::formats::{
    read_default_set, read_matrix, read_report, space_to_json, write_default_set, write_matrix, DefaultSetFile,
    FormatError,
};
use default_miner::synthetic::{runs_csv, Corpus};
use default_miner_core::{greedy_select, standardize_per_dataset, Aggregator, Provenance, RiskMatrix};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_default-miner")).current_dir(dir).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_corpus(dir: &Path) {
    let corpus = Corpus::shared_region(6, 0.15, 0.02, 21);
    std::fs::write(dir.join("runs.csv"), runs_csv(&corpus.space, &corpus.runs(30, 22))).unwrap();
    std::fs::write(dir.join("space.json"), serde_json::to_vec_pretty(&space_to_json(&corpus.space)).unwrap()).unwrap();
}

fn small_matrix(dir: &Path) {
    let corpus = Corpus::independent_bowls(5, 0.01, 3);
    let mx = standardize_per_dataset(&corpus.grid_matrix(4, 3)).unwrap();
    write_matrix(&dir.join("m.csv"), &mx, Some(&corpus.space)).unwrap();
}

#[test]
fn missing_matrix_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["defaults", "greedy", "--n", "8", "--agg", "median", "--out", "d.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--matrix"), "{}", stderr(&out));
    assert!(stderr(&out).contains("Usage"));
    assert_eq!(bin(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["evaluate", "lodo", "--matrix", "m.csv", "--n", "1,x", "--out", "r"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["--help"]).status.code(), Some(0));
    assert!(!dir.path().join("d.json").exists());
}

#[test]
fn runtime_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["defaults", "greedy", "--matrix", "absent.csv", "--n", "2", "--out", "d.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.csv"));

    std::fs::write(dir.path().join("bad.csv"), "dataset_id,0,1\na,0.1,0.2\nb,0.3,oops\n").unwrap();
    let out = bin(dir.path(), &["defaults", "greedy", "--matrix", "bad.csv", "--n", "1", "--out", "d.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = Command::new(env!("CARGO_BIN_EXE_default-miner"))
        .current_dir(dir.path())
        .env("DEFAULT_MINER_THREADS", "many")
        .args(["stats", "ranks", "--report", "r.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn greedy_happy_path() {
    let dir = tempfile::tempdir().unwrap();
    small_matrix(dir.path());
    let out = bin(dir.path(), &["defaults", "greedy", "--matrix", "m.csv", "--n", "8", "--agg", "median", "--out", "d.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let file = read_default_set(&dir.path().join("d.json")).unwrap();
    assert_eq!(file.set.ordered_indices.len(), 8);
    assert_eq!(file.set.configurations.len(), 8);
    assert_eq!(file.dimensions.as_deref(), Some(&["gamma".to_string(), "cost".to_string()][..]));
    let (mx, _) = read_matrix(&dir.path().join("m.csv")).unwrap();
    assert_eq!(file.set, greedy_select(&mx, 8, Aggregator::Median).unwrap());
}

#[test]
fn exact_and_lp_commands() {
    let dir = tempfile::tempdir().unwrap();
    small_matrix(dir.path());
    let out = bin(dir.path(), &["defaults", "exact", "--matrix", "m.csv", "--n", "3", "--time-limit", "30", "--out", "e.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let file = read_default_set(&dir.path().join("e.json")).unwrap();
    assert_eq!(file.status.unwrap().state, "optimal");
    let (mx, _) = read_matrix(&dir.path().join("m.csv")).unwrap();
    let greedy = greedy_select(&mx, 3, Aggregator::Sum).unwrap();
    assert!(file.set.risk() <= greedy.risk());

    let out = bin(dir.path(), &["defaults", "exact", "--matrix", "m.csv", "--n", "2"]);
    assert!(out.status.success());
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed["format_version"], 1);

    let out = bin(dir.path(), &["defaults", "export-lp", "--matrix", "m.csv", "--n", "2", "--out", "m.lp"]);
    assert!(out.status.success());
    let lp = std::fs::read_to_string(dir.path().join("m.lp")).unwrap();
    assert!(lp.contains("Subject To") && lp.trim_end().ends_with("End"));
}

#[test]
fn exact_size_guard_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![(0..70).map(|m| m as f64).collect::<Vec<_>>(); 2];
    write_matrix(&dir.path().join("wide.csv"), &RiskMatrix::from_rows(rows).unwrap(), None).unwrap();
    let out = bin(dir.path(), &["defaults", "exact", "--matrix", "wide.csv", "--n", "2", "--out", "e.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(dir.path(), &["defaults", "exact", "--matrix", "wide.csv", "--n", "2", "--force", "--out", "e.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn surrogate_evaluate_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path());
    let out = bin(dir.path(), &["surrogate", "build", "--runs", "runs.csv", "--space", "space.json", "--pool", "random:50:3", "--k", "5", "--out", "s.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (mx, space) = read_matrix(&dir.path().join("s.csv")).unwrap();
    assert_eq!((mx.rows(), mx.cols()), (6, 50));
    assert_eq!(mx.provenance(), Provenance::SurrogatePredicted);
    assert_eq!(space.unwrap().len(), 2);

    let out = bin(dir.path(), &[
        "evaluate", "lodo", "--matrix", "s.csv", "--n", "1,2,4", "--agg", "median", "--rs-budgets", "4,8,100",
        "--reps", "20", "--seed", "9", "--out", "r.json", "--cd-csv", "cd.csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("[100]"));
    let report = read_report(&dir.path().join("r.json")).unwrap();
    let labels: Vec<&str> = report.report.strategies.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["defaults-n1", "defaults-n2", "defaults-n4", "rs-b4", "rs-b8"]);
    assert_eq!(report.seed, 9);

    let out = bin(dir.path(), &["stats", "ranks", "--report", "r.json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("friedman chi2"), "{text}");
    assert!(text.contains("critical difference"));
    assert_eq!(text.lines().count(), 1 + 5 + 2);
}

#[test]
fn pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path());
    let out = bin(dir.path(), &[
        "pipeline", "--runs", "runs.csv", "--space", "space.json", "--out-dir", "out", "--pool", "grid:5", "--n", "1,2,4",
        "--solver", "both", "--rs-budgets", "4,8", "--reps", "10",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let o = dir.path().join("out");
    for f in ["matrix.csv", "matrix.configs.json", "defaults-greedy.json", "defaults-exact.json", "report.json", "cd.csv"] {
        assert!(o.join(f).is_file(), "{f}");
    }
    assert_eq!(read_default_set(&o.join("defaults-greedy.json")).unwrap().set.len(), 4);
    let report = read_report(&o.join("report.json")).unwrap();
    assert_eq!(report.report.strategy_count, 3 + 3 + 2);

    let out = bin(dir.path(), &["pipeline", "--runs", "none.csv", "--space", "space.json", "--out-dir", "o2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demo_runs_without_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["demo", "--out-dir", "d", "--datasets", "5", "--runs-per-dataset", "20", "--pool", "grid:4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("d/report.json").is_file());
    assert!(dir.path().join("d/runs.csv").is_file());
}

#[test]
fn default_set_version_guard() {
    let dir = tempfile::tempdir().unwrap();
    let mx = RiskMatrix::from_rows(vec![vec![-0.5, 0.25], vec![0.75, -1e-17]]).unwrap();
    let path = dir.path().join("d.json");
    let file = DefaultSetFile::new(greedy_select(&mx, 2, Aggregator::Mean).unwrap(), None, None);
    write_default_set(&path, &file).unwrap();
    assert_eq!(read_default_set(&path).unwrap(), file);
    let text = std::fs::read_to_string(&path).unwrap().replace("\"format_version\": 1", "\"format_version\": 2");
    std::fs::write(&path, text).unwrap();
    assert!(matches!(read_default_set(&path), Err(FormatError::Version { found: 2, .. })));
}
