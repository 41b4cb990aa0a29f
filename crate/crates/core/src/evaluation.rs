//! Leave-one-dataset-out evaluation, random-search baselines and the
//! rank-based comparison report.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::greedy::greedy_select;
use crate::matrix::{unit_normalize_per_dataset, RiskMatrix};
use crate::objective::Aggregator;
use crate::stats::{average_ranks, friedman_test, nemenyi_cd, rank_rows};
use crate::{par, Error, Result};

/// Achieved risk of one strategy on every dataset.
///
/// `normalized` rescales each achieved risk by the dataset's range over all
/// candidate configurations: 0 is the best candidate, 1 the worst, 0.5 when
/// every candidate ties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub label: String,
    pub budget: usize,
    pub achieved: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl StrategyResult {
    fn new(label: String, budget: usize, achieved: Vec<f64>, matrix: &RiskMatrix) -> Self {
        let normalized = achieved
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let row = matrix.row(k);
                let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi > lo {
                    ((a - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.5
                }
            })
            .collect();
        StrategyResult { label, budget, achieved, normalized }
    }

    pub fn mean_normalized(&self) -> f64 {
        self.normalized.iter().sum::<f64>() / self.normalized.len().max(1) as f64
    }
}

fn check_lodo(matrix: &RiskMatrix, n_values: &[usize]) -> Result<()> {
    if matrix.rows() < 2 {
        return Err(Error::TooFew { what: "datasets", needed: 2, got: matrix.rows() });
    }
    if let Some(&n) = n_values.iter().find(|&&n| n < 1) {
        return Err(Error::SizeOutOfRange { n, columns: matrix.cols() });
    }
    Ok(())
}

fn best_of(matrix: &RiskMatrix, k: usize, members: &[usize]) -> f64 {
    members.iter().map(|&m| matrix.get(k, m)).fold(f64::INFINITY, f64::min)
}

/// For every held-out dataset, learns greedy defaults on the remaining
/// datasets and scores the held-out row by the best risk among them. One
/// result per entry of `n_values`, labelled `defaults-n<n>`.
pub fn lodo_evaluate(matrix: &RiskMatrix, n_values: &[usize], agg: Aggregator) -> Result<Vec<StrategyResult>> {
    check_lodo(matrix, n_values)?;
    let largest = n_values.iter().copied().max().unwrap_or(0);
    if largest == 0 {
        return Ok(Vec::new());
    }
    // Greedy lists are prefix-closed, so one run per fold serves every n.
    let folds = par::map_range(matrix.rows(), |k| {
        greedy_select(&matrix.without_row(k), largest, agg).map(|d| d.ordered_indices)
    });
    let folds: Vec<Vec<usize>> = folds.into_iter().collect::<Result<_>>()?;
    Ok(n_values
        .iter()
        .map(|&n| {
            let achieved = folds.iter().enumerate().map(|(k, order)| best_of(matrix, k, &order[..n.min(order.len())])).collect();
            StrategyResult::new(format!("defaults-n{n}"), n, achieved, matrix)
        })
        .collect())
}

/// Like [`lodo_evaluate`] with an arbitrary learner mapping a training
/// matrix and a set size to selected column indices.
pub fn lodo_evaluate_with<L>(matrix: &RiskMatrix, n_values: &[usize], label: &str, learner: L) -> Result<Vec<StrategyResult>>
where
    L: Fn(&RiskMatrix, usize) -> Result<Vec<usize>> + Sync + Send,
{
    check_lodo(matrix, n_values)?;
    n_values
        .iter()
        .map(|&n| {
            let achieved = par::map_range(matrix.rows(), |k| {
                learner(&matrix.without_row(k), n).map(|set| best_of(matrix, k, &set))
            });
            let achieved = achieved.into_iter().collect::<Result<Vec<f64>>>()?;
            Ok(StrategyResult::new(format!("{label}-n{n}"), n, achieved, matrix))
        })
        .collect()
}

/// Random search with `budget` distinct draws per dataset, repeated and
/// averaged. Dataset `k` draws from its own ChaCha stream `k` of `seed`, so
/// results do not depend on evaluation order.
pub fn random_search_baseline(matrix: &RiskMatrix, budget: usize, seed: u64, repetitions: usize) -> Result<StrategyResult> {
    if budget < 1 {
        return Err(Error::TooFew { what: "budget", needed: 1, got: budget });
    }
    if budget > matrix.cols() {
        return Err(Error::BudgetTooLarge { budget, columns: matrix.cols() });
    }
    if repetitions < 1 {
        return Err(Error::TooFew { what: "repetitions", needed: 1, got: repetitions });
    }
    let achieved = par::map_range(matrix.rows(), |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let row = matrix.row(k);
        let mut mean = 0.0;
        for rep in 0..repetitions {
            let best = rand::seq::index::sample(&mut rng, row.len(), budget)
                .into_iter()
                .map(|m| row[m])
                .fold(f64::INFINITY, f64::min);
            // running mean keeps repeated identical draws exact
            mean += (best - mean) / (rep + 1) as f64;
        }
        mean
    });
    Ok(StrategyResult::new(format!("rs-b{budget}"), budget, achieved, matrix))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Strategies compared across datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub dataset_ids: Vec<String>,
    pub strategies: Vec<StrategyResult>,
    /// Achieved risks rescaled to [0, 1] across strategies, per dataset
    /// (rows) and strategy (columns).
    pub relative_scores: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
    /// Present for at least 3 strategies.
    pub friedman: Option<FriedmanResult>,
    /// Nemenyi critical difference at alpha = 0.05, for 2 to 10 strategies.
    pub critical_difference: Option<f64>,
    pub datasets: usize,
    pub strategy_count: usize,
}

impl EvaluationReport {
    pub fn new(dataset_ids: Vec<String>, strategies: Vec<StrategyResult>) -> Result<Self> {
        let k = dataset_ids.len();
        if strategies.iter().any(|s| s.achieved.len() != k) {
            return Err(Error::Shape("strategy result length differs from dataset count"));
        }
        let scores: Vec<Vec<f64>> = (0..k).map(|d| strategies.iter().map(|s| s.achieved[d]).collect()).collect();
        let s = strategies.len();
        let friedman = if s >= 3 && k >= 2 {
            let (statistic, p_value) = friedman_test(&rank_rows(&scores, true))?;
            Some(FriedmanResult { statistic, p_value })
        } else {
            None
        };
        Ok(EvaluationReport {
            dataset_ids,
            relative_scores: unit_normalize_per_dataset(&scores),
            average_ranks: if k > 0 { average_ranks(&scores, true) } else { Vec::new() },
            friedman,
            critical_difference: nemenyi_cd(s, k, 0.05).ok(),
            datasets: k,
            strategy_count: s,
            strategies,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_by_three() -> RiskMatrix {
        RiskMatrix::from_rows(vec![vec![0.1, 0.5, 0.9], vec![0.9, 0.5, 0.1]]).unwrap()
    }

    #[test]
    fn lodo_hand_trace() {
        let out = lodo_evaluate(&two_by_three(), &[1], Aggregator::Median).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].achieved, vec![0.9, 0.9]);
        assert_eq!(out[0].normalized, vec![1.0, 1.0]);
        assert_eq!(out[0].label, "defaults-n1");
    }

    #[test]
    fn lodo_full_coverage_hits_row_minimum() {
        let r = two_by_three();
        let out = lodo_evaluate(&r, &[3, 5], Aggregator::Mean).unwrap();
        for s in &out {
            assert_eq!(s.achieved, vec![0.1, 0.1]);
        }
        assert_eq!(lodo_evaluate(&r, &[1, 2, 4, 8, 16, 32], Aggregator::Median).unwrap().len(), 6);
        let single = RiskMatrix::from_rows(vec![vec![0.1, 0.2]]).unwrap();
        assert!(lodo_evaluate(&single, &[1], Aggregator::Median).is_err());
    }

    #[test]
    fn lodo_with_custom_learner() {
        let r = two_by_three();
        let out = lodo_evaluate_with(&r, &[1, 2], "fixed", |_, n| Ok((0..n).collect())).unwrap();
        assert_eq!(out[0].achieved, vec![0.1, 0.9]);
        assert_eq!(out[1].achieved, vec![0.1, 0.5]);
        assert_eq!(out[1].label, "fixed-n2");
    }

    #[test]
    fn random_search_edges() {
        let r = two_by_three();
        let full = random_search_baseline(&r, 3, 99, 7).unwrap();
        assert_eq!(full.achieved, vec![0.1, 0.1]);
        assert_eq!(random_search_baseline(&r, 2, 5, 50).unwrap(), random_search_baseline(&r, 2, 5, 50).unwrap());
        assert_eq!(random_search_baseline(&r, 4, 0, 1).unwrap_err(), Error::BudgetTooLarge { budget: 4, columns: 3 });
        assert!(random_search_baseline(&r, 0, 0, 1).is_err());
        assert!(random_search_baseline(&r, 1, 0, 0).is_err());
    }

    #[test]
    fn report_shapes() {
        let r = two_by_three();
        let mut strategies = lodo_evaluate(&r, &[1, 2], Aggregator::Median).unwrap();
        strategies.push(random_search_baseline(&r, 2, 1, 10).unwrap());
        let report = EvaluationReport::new(r.dataset_ids().to_vec(), strategies).unwrap();
        assert_eq!(report.strategy_count, 3);
        assert_eq!(report.average_ranks.iter().sum::<f64>(), 6.0);
        assert!(report.friedman.is_some());
        assert!(report.critical_difference.is_some());
        assert!(report.relative_scores.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}
