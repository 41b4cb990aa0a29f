//! Learning ordered sets of complementary default hyperparameter
//! configurations from historical performance data.
//!
//! Everything is organised around a [`RiskMatrix`]: one row per dataset, one
//! column per candidate configuration, entries are risks (lower is better).
//! Given a matrix, a default set of size `n` minimises the aggregated
//! per-dataset minimum over its members. Two solvers are provided: an anytime
//! greedy forward selection ([`greedy_select`]) and an exact branch-and-bound
//! over the discretized integer formulation ([`solve_exact`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and wall-clock time limits live in the `default-miner` companion
//! crate. Enable the `parallel` feature to spread candidate scans, surrogate
//! predictions and evaluation folds over a rayon pool; results are identical
//! with or without it.
#![no_std]

extern crate alloc;

mod error;
mod par;

pub mod evaluation;
pub mod exact;
pub mod greedy;
pub mod matrix;
pub mod objective;
pub mod space;
pub mod stats;
pub mod surrogate;

pub use error::{Error, Result};
pub use evaluation::{lodo_evaluate, lodo_evaluate_with, random_search_baseline, StrategyResult};
pub use exact::{
    brute_force_oracle, build_mip, export_lp, precedence_sets, solve_exact, ExactOutcome,
    MipInstance, PrecedenceSets, SolveOptions, SolveStatus,
};
pub use greedy::{greedy_select, DefaultSet, Source};
pub use matrix::{
    ingest_runs, standardize_per_dataset, unit_normalize_per_dataset, Provenance, RiskMatrix,
    RunRecord,
};
pub use objective::{aggregate, marginal_set_risk, set_risk, Aggregator, SetRiskState};
pub use space::{Configuration, Dimension, DimensionKind, HyperparameterSpace, Scale, Value};
pub use stats::{average_ranks, friedman_test, nemenyi_cd, rank_rows};
pub use surrogate::{
    build_surrogate_matrix, config_distance, grid_candidates, sample_candidates, CandidatePool,
    SurrogateModel,
};
