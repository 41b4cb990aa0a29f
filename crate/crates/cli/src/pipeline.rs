//! Compositions of the core operations used by the subcommands:
//! runs → surrogate matrix → default sets → evaluation report.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use default_miner_core::evaluation::EvaluationReport;
use default_miner_core::surrogate::{fit_from_runs, DEFAULT_NEIGHBOURS};
use default_miner_core::{
    build_mip, build_surrogate_matrix, grid_candidates, greedy_select, lodo_evaluate, lodo_evaluate_with,
    random_search_baseline, sample_candidates, solve_exact, Aggregator, CandidatePool, ExactOutcome,
    HyperparameterSpace, RiskMatrix, SolveOptions, StrategyResult,
};

use crate::formats::{
    read_runs, read_space, write_cd_csv, write_default_set, write_matrix, write_report, DefaultSetFile, Direction,
    ReportFile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolSpec {
    Random { count: usize, seed: u64 },
    Grid { points: usize },
}

impl PoolSpec {
    pub fn build(&self, space: &HyperparameterSpace) -> Result<CandidatePool> {
        Ok(match *self {
            PoolSpec::Random { count, seed } => sample_candidates(space, count, seed)?,
            PoolSpec::Grid { points } => grid_candidates(space, points)?,
        })
    }
}

impl FromStr for PoolSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<u64>().map_err(|_| format!("invalid pool spec `{s}`"));
        match parts.as_slice() {
            ["random", count] => Ok(PoolSpec::Random { count: num(count)? as usize, seed: 0 }),
            ["random", count, seed] => Ok(PoolSpec::Random { count: num(count)? as usize, seed: num(seed)? }),
            ["grid", g] => Ok(PoolSpec::Grid { points: num(g)? as usize }),
            _ => Err(format!("invalid pool spec `{s}` (random:<M>:<seed> or grid:<g>)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Greedy,
    Exact,
    Both,
}

impl Solver {
    pub fn greedy(self) -> bool {
        matches!(self, Solver::Greedy | Solver::Both)
    }

    pub fn exact(self) -> bool {
        matches!(self, Solver::Exact | Solver::Both)
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "greedy" => Ok(Solver::Greedy),
            "exact" => Ok(Solver::Exact),
            "both" => Ok(Solver::Both),
            other => Err(format!("unknown solver `{other}` (greedy|exact|both)")),
        }
    }
}

/// Parses `1,2,4,8` into a strictly ascending list.
pub fn parse_counts(s: &str) -> Result<Vec<usize>, String> {
    let mut out = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("invalid count `{x}`")))
        .collect::<Result<Vec<_>, _>>()?;
    if out.contains(&0) {
        return Err("counts must be at least 1".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Fits one surrogate per dataset and predicts the whole pool.
pub fn surrogate_matrix(
    runs: &Path,
    space: &HyperparameterSpace,
    pool: PoolSpec,
    k: usize,
    direction: Direction,
) -> Result<RiskMatrix> {
    let records = read_runs(runs, space, direction)?;
    let models = fit_from_runs(&records, space, k)?;
    let pool = pool.build(space)?;
    Ok(build_surrogate_matrix(&models, &pool)?)
}

/// Exact solve with a wall-clock limit. A limit of zero means no limit.
pub fn solve_exact_timed(matrix: &RiskMatrix, n: usize, time_limit: f64, force: bool) -> Result<ExactOutcome> {
    let mip = build_mip(matrix, n)?;
    let start = Instant::now();
    let limit = (time_limit > 0.0).then(|| Duration::from_secs_f64(time_limit));
    let out = solve_exact(&mip, SolveOptions { force, ..Default::default() }, || {
        limit.is_some_and(|l| start.elapsed() >= l)
    })?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EvaluationConfig {
    pub n_values: Vec<usize>,
    pub aggregator: Aggregator,
    pub solver: Solver,
    pub rs_budgets: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub time_limit: f64,
    pub force: bool,
}

/// LODO evaluation of the chosen solvers plus random-search baselines.
/// Budgets larger than the candidate count are skipped and returned.
pub fn evaluate(matrix: &RiskMatrix, cfg: &EvaluationConfig) -> Result<(EvaluationReport, Vec<usize>)> {
    let mut strategies: Vec<StrategyResult> = Vec::new();
    if cfg.solver.greedy() {
        strategies.extend(lodo_evaluate(matrix, &cfg.n_values, cfg.aggregator)?);
    }
    if cfg.solver.exact() {
        let n_values: Vec<usize> = cfg.n_values.iter().copied().filter(|&n| n <= matrix.cols()).collect();
        strategies.extend(lodo_evaluate_with(matrix, &n_values, "exact", |train, n| {
            solve_exact_timed(train, n, cfg.time_limit, cfg.force)
                .map(|o| o.defaults.ordered_indices)
                .map_err(|e| match e.downcast::<default_miner_core::Error>() {
                    Ok(core) => core,
                    Err(other) => default_miner_core::Error::Unsupported(other.to_string()),
                })
        })?);
    }
    let mut skipped = Vec::new();
    for &b in &cfg.rs_budgets {
        if b > matrix.cols() {
            skipped.push(b);
            continue;
        }
        strategies.push(random_search_baseline(matrix, b, cfg.seed, cfg.repetitions)?);
    }
    Ok((EvaluationReport::new(matrix.dataset_ids().to_vec(), strategies)?, skipped))
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub runs: PathBuf,
    pub space: PathBuf,
    pub out_dir: PathBuf,
    pub pool: PoolSpec,
    pub k: usize,
    pub direction: Direction,
    pub evaluation: EvaluationConfig,
}

impl PipelineConfig {
    pub fn new(runs: PathBuf, space: PathBuf, out_dir: PathBuf, pool: PoolSpec, n_values: Vec<usize>) -> Self {
        PipelineConfig {
            runs,
            space,
            out_dir,
            pool,
            k: DEFAULT_NEIGHBOURS,
            direction: Direction::Auto,
            evaluation: EvaluationConfig {
                n_values,
                aggregator: Aggregator::Median,
                solver: Solver::Both,
                rs_budgets: vec![4, 8, 16, 32, 64],
                repetitions: 100,
                seed: 0,
                time_limit: 10.0,
                force: true,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.runs.is_file(), "runs file {} does not exist", self.runs.display());
        ensure!(self.space.is_file(), "space file {} does not exist", self.space.display());
        let n = &self.evaluation.n_values;
        ensure!(!n.is_empty(), "the n list is empty");
        ensure!(n.windows(2).all(|w| w[0] < w[1]), "the n list must be strictly ascending");
        ensure!(self.k >= 1, "--k must be at least 1");
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineArtifacts {
    pub matrix: PathBuf,
    pub default_sets: Vec<PathBuf>,
    pub report: PathBuf,
    pub cd_csv: PathBuf,
    pub skipped_budgets: Vec<usize>,
    pub interrupted: bool,
}

/// Runs → surrogate matrix → default sets of the largest requested size →
/// evaluation report, all written under `out_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineArtifacts> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let space = read_space(&cfg.space)?;
    let matrix = surrogate_matrix(&cfg.runs, &space, cfg.pool, cfg.k, cfg.direction).context("building surrogate matrix")?;
    let eval = &cfg.evaluation;
    let mut art = PipelineArtifacts { matrix: cfg.out_dir.join("matrix.csv"), ..Default::default() };
    write_matrix(&art.matrix, &matrix, Some(&space))?;

    let n = *eval.n_values.last().expect("validated");
    if eval.solver.greedy() {
        let set = greedy_select(&matrix, n, eval.aggregator)?;
        let path = cfg.out_dir.join("defaults-greedy.json");
        write_default_set(&path, &DefaultSetFile::new(set, Some(&space), None))?;
        art.default_sets.push(path);
    }
    if eval.solver.exact() {
        if n > matrix.cols() {
            bail!("n = {n} exceeds the {} pool configurations", matrix.cols());
        }
        let out = solve_exact_timed(&matrix, n, eval.time_limit, eval.force)?;
        art.interrupted |= !out.is_optimal();
        let path = cfg.out_dir.join("defaults-exact.json");
        write_default_set(&path, &DefaultSetFile::new(out.defaults.clone(), Some(&space), Some((&out).into())))?;
        art.default_sets.push(path);
    }

    let (report, skipped) = evaluate(&matrix, eval).context("evaluating")?;
    art.skipped_budgets = skipped;
    art.report = cfg.out_dir.join("report.json");
    art.cd_csv = cfg.out_dir.join("cd.csv");
    write_cd_csv(&art.cd_csv, &report)?;
    write_report(&art.report, &ReportFile::new(report, eval.aggregator.to_string(), eval.seed))?;
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        assert_eq!("random:1000:7".parse::<PoolSpec>().unwrap(), PoolSpec::Random { count: 1000, seed: 7 });
        assert_eq!("grid:16".parse::<PoolSpec>().unwrap(), PoolSpec::Grid { points: 16 });
        assert!("grid".parse::<PoolSpec>().is_err());
        assert!("lattice:4".parse::<PoolSpec>().is_err());
        assert_eq!(parse_counts("8,1,2,4,4").unwrap(), vec![1, 2, 4, 8]);
        assert!(parse_counts("1,0").is_err());
        assert!(parse_counts("1,x").is_err());
        assert_eq!("both".parse::<Solver>().unwrap(), Solver::Both);
    }

    #[test]
    fn timed_exact_without_limit_is_optimal() {
        let mx = RiskMatrix::from_rows(vec![vec![0.0, 0.3, 0.3], vec![0.4, 0.0, 0.5], vec![0.4, 0.5, 0.0]]).unwrap();
        let out = solve_exact_timed(&mx, 2, 0.0, false).unwrap();
        assert_eq!(out.defaults.ordered_indices, vec![1, 2]);
        assert!(out.is_optimal());
    }
}
