//! Argument parsing and subcommand dispatch.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use default_miner_core::surrogate::DEFAULT_NEIGHBOURS;
use default_miner_core::{build_mip, export_lp, greedy_select, Aggregator};

use crate::formats::{
    read_matrix, read_report, read_space, space_to_json, write_cd_csv, write_default_set, write_matrix, write_report,
    DefaultSetFile, Direction, ReportFile,
};
use crate::pipeline::{
    evaluate, parse_counts, run_pipeline, solve_exact_timed, surrogate_matrix, EvaluationConfig, PipelineConfig,
    PoolSpec, Solver,
};
use crate::synthetic::{runs_csv, Corpus};

pub const THREADS_ENV: &str = "DEFAULT_MINER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "default-miner", version, about = "Learn multiple hyperparameter defaults from benchmark runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Surrogate risk matrices.
    #[command(subcommand)]
    Surrogate(SurrogateCommand),
    /// Default-set solvers and exports.
    #[command(subcommand)]
    Defaults(DefaultsCommand),
    /// Held-out evaluation.
    #[command(subcommand)]
    Evaluate(EvaluateCommand),
    /// Rank statistics of a report.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Runs → surrogate matrix → default sets → report.
    Pipeline(PipelineArgs),
    /// Generates a synthetic corpus and runs the pipeline on it.
    Demo(DemoArgs),
}

#[derive(Debug, Subcommand)]
pub enum SurrogateCommand {
    /// Fits per-dataset surrogates and predicts a candidate pool.
    Build {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        space: PathBuf,
        /// random:<M>:<seed> or grid:<g>
        #[arg(long, default_value = "random:1000:0")]
        pool: PoolSpec,
        #[arg(long, default_value_t = DEFAULT_NEIGHBOURS)]
        k: usize,
        /// auto, higher or lower
        #[arg(long, default_value = "auto")]
        direction: Direction,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DefaultsCommand {
    /// Greedy forward selection.
    Greedy {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "median")]
        agg: Aggregator,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimal set under the sum aggregator.
    Exact {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n: usize,
        /// Seconds; 0 disables the limit.
        #[arg(long, default_value_t = 0.0)]
        time_limit: f64,
        /// Skip the instance size guard.
        #[arg(long)]
        force: bool,
        /// Written to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the integer program in CPLEX-LP format.
    ExportLp {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Comma-separated counts, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts(pub Vec<usize>);

impl std::str::FromStr for Counts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_counts(s).map(Counts)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value = "1,2,4,8,16,32")]
    pub n: Counts,
    #[arg(long, default_value = "median")]
    pub agg: Aggregator,
    #[arg(long, default_value = "4,8,16,32,64")]
    pub rs_budgets: Counts,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// greedy, exact or both
    #[arg(long, default_value = "greedy")]
    pub solver: Solver,
    /// Per exact solve, seconds; 0 disables the limit.
    #[arg(long, default_value_t = 0.0)]
    pub time_limit: f64,
    #[arg(long)]
    pub force: bool,
}

impl EvalArgs {
    fn config(&self) -> EvaluationConfig {
        EvaluationConfig {
            n_values: self.n.0.clone(),
            aggregator: self.agg,
            solver: self.solver,
            rs_budgets: self.rs_budgets.0.clone(),
            repetitions: self.reps,
            seed: self.seed,
            time_limit: self.time_limit,
            force: self.force,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum EvaluateCommand {
    /// Leave-one-dataset-out evaluation against random search.
    Lodo {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: PathBuf,
        /// Also write critical-difference plot data.
        #[arg(long)]
        cd_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Prints average ranks, the Friedman statistic and the critical difference.
    Ranks {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        cd_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "random:1000:0")]
    pub pool: PoolSpec,
    #[arg(long, default_value_t = DEFAULT_NEIGHBOURS)]
    pub k: usize,
    #[arg(long, default_value = "auto")]
    pub direction: Direction,
    #[command(flatten)]
    pub eval: EvalArgs,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub datasets: usize,
    #[arg(long, default_value_t = 60)]
    pub runs_per_dataset: usize,
    #[arg(long, default_value = "grid:8")]
    pub pool: PoolSpec,
}

/// Parses `argv`, runs the command and maps the outcome to an exit code:
/// 0 on success, 2 on usage errors, 1 on runtime failures.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads().and_then(|()| dispatch(cli.command)) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse::<usize>().with_context(|| format!("{THREADS_ENV}={v} is not a thread count"))?
        }
        _ => 0,
    };
    if threads > 0 {
        // a pool may already exist when embedded; the cap is then best-effort
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Surrogate(SurrogateCommand::Build { runs, space, pool, k, direction, out }) => {
            let sp = read_space(&space)?;
            let matrix = surrogate_matrix(&runs, &sp, pool, k, direction)?;
            write_matrix(&out, &matrix, Some(&sp))?;
            eprintln!("wrote {} datasets x {} configurations to {}", matrix.rows(), matrix.cols(), out.display());
        }
        Command::Defaults(DefaultsCommand::Greedy { matrix, n, agg, out }) => {
            let (mx, space) = read_matrix(&matrix)?;
            let set = greedy_select(&mx, n, agg)?;
            write_default_set(&out, &DefaultSetFile::new(set, space.as_ref(), None))?;
        }
        Command::Defaults(DefaultsCommand::Exact { matrix, n, time_limit, force, out }) => {
            let (mx, space) = read_matrix(&matrix)?;
            let outcome = solve_exact_timed(&mx, n, time_limit, force)?;
            if !outcome.is_optimal() {
                eprintln!("time limit reached; writing the incumbent");
            }
            let file = DefaultSetFile::new(outcome.defaults.clone(), space.as_ref(), Some((&outcome).into()));
            match out {
                Some(path) => write_default_set(&path, &file)?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    serde_json::to_writer_pretty(&mut stdout, &file)?;
                    writeln!(stdout)?;
                }
            }
        }
        Command::Defaults(DefaultsCommand::ExportLp { matrix, n, out }) => {
            let (mx, _) = read_matrix(&matrix)?;
            let lp = export_lp(&build_mip(&mx, n)?);
            crate::atomic::write_atomic(&out, lp.as_bytes()).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Evaluate(EvaluateCommand::Lodo { matrix, eval, out, cd_csv }) => {
            let (mx, _) = read_matrix(&matrix)?;
            let cfg = eval.config();
            let (report, skipped) = evaluate(&mx, &cfg)?;
            warn_skipped(&skipped);
            if let Some(path) = cd_csv {
                write_cd_csv(&path, &report)?;
            }
            write_report(&out, &ReportFile::new(report, cfg.aggregator.to_string(), cfg.seed))?;
        }
        Command::Stats(StatsCommand::Ranks { report, cd_csv }) => {
            let file = read_report(&report)?;
            print!("{}", rank_summary(&file));
            if let Some(path) = cd_csv {
                write_cd_csv(&path, &file.report)?;
            }
        }
        Command::Pipeline(args) => {
            let mut cfg = PipelineConfig::new(args.runs, args.space, args.out_dir, args.pool, args.eval.n.0.clone());
            cfg.k = args.k;
            cfg.direction = args.direction;
            cfg.evaluation = args.eval.config();
            pipeline_and_report(&cfg)?;
        }
        Command::Demo(args) => demo(&args)?,
    }
    Ok(())
}

fn warn_skipped(skipped: &[usize]) {
    if !skipped.is_empty() {
        eprintln!("skipped random-search budgets {skipped:?}: larger than the candidate pool");
    }
}

fn pipeline_and_report(cfg: &PipelineConfig) -> Result<()> {
    let art = run_pipeline(cfg)?;
    warn_skipped(&art.skipped_budgets);
    if art.interrupted {
        eprintln!("warning: the exact solve hit its time limit; artifacts are not reproducible");
    }
    eprintln!("wrote {}", art.matrix.display());
    for p in art.default_sets.iter().chain([&art.report, &art.cd_csv]) {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

/// Human-readable rank table of a report.
pub fn rank_summary(file: &ReportFile) -> String {
    let r = &file.report;
    let mut out = String::new();
    let width = r.strategies.iter().map(|s| s.label.len()).max().unwrap_or(8).max(8);
    out.push_str(&format!("{:<width$}  average rank\n", "strategy"));
    for (s, rank) in r.strategies.iter().zip(&r.average_ranks) {
        out.push_str(&format!("{:<width$}  {rank:.4}\n", s.label));
    }
    match &r.friedman {
        Some(f) => out.push_str(&format!("friedman chi2 = {:.4}, p = {:.4e}\n", f.statistic, f.p_value)),
        None => out.push_str("friedman: n/a (needs 3 strategies and 2 datasets)\n"),
    }
    match r.critical_difference {
        Some(cd) => out.push_str(&format!("critical difference (alpha 0.05) = {cd:.4}\n")),
        None => out.push_str("critical difference: n/a\n"),
    }
    out
}

fn demo(args: &DemoArgs) -> Result<()> {
    if args.datasets < 2 {
        bail!("--datasets must be at least 2");
    }
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let corpus = Corpus::shared_region(args.datasets, 0.15, 0.02, args.seed);
    let runs_path = args.out_dir.join("runs.csv");
    let space_path = args.out_dir.join("space.json");
    let records = corpus.runs(args.runs_per_dataset, args.seed.wrapping_add(1));
    write_bytes(&runs_path, &runs_csv(&corpus.space, &records))?;
    let mut space_json = serde_json::to_vec_pretty(&space_to_json(&corpus.space))?;
    space_json.push(b'\n');
    write_bytes(&space_path, &space_json)?;
    // sanity check: what we wrote parses back
    read_space(&space_path)?;

    let mut cfg = PipelineConfig::new(runs_path, space_path, args.out_dir.clone(), args.pool, vec![1, 2, 4]);
    cfg.evaluation.rs_budgets = vec![4, 8, 16];
    cfg.evaluation.seed = args.seed;
    cfg.evaluation.time_limit = 0.0;
    pipeline_and_report(&cfg)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    crate::atomic::write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn lists_and_aggregators_parse() {
        let cli = Cli::try_parse_from([
            "default-miner", "evaluate", "lodo", "--matrix", "m.csv", "--n", "4,1,2", "--agg", "q:0.25", "--out", "r.json",
        ])
        .unwrap();
        let Command::Evaluate(EvaluateCommand::Lodo { eval, .. }) = cli.command else { panic!() };
        assert_eq!(eval.n.0, vec![1, 2, 4]);
        assert_eq!(eval.agg.to_string(), "q:0.25");
        assert!(Cli::try_parse_from(["default-miner", "defaults", "greedy", "--n", "3", "--out", "x"]).is_err());
    }
}
