//! Greedy forward selection of an ordered, anytime list of defaults.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::matrix::RiskMatrix;
use crate::objective::{set_risk, Aggregator, SetRiskState};
use crate::space::Configuration;
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Greedy,
    Exact,
    BruteForce,
}

/// An ordered list of default configurations. `prefix_risks[i]` is the set
/// risk of the first `i + 1` members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefaultSet {
    pub ordered_indices: Vec<usize>,
    pub prefix_risks: Vec<f64>,
    pub configurations: Vec<Configuration>,
    pub aggregator: Aggregator,
    pub source: Source,
}

impl DefaultSet {
    /// Resolves configurations and recomputes prefix risks for `indices`.
    pub fn from_indices(matrix: &RiskMatrix, indices: Vec<usize>, aggregator: Aggregator, source: Source) -> Result<Self> {
        let mut prefix_risks = Vec::with_capacity(indices.len());
        for i in 1..=indices.len() {
            prefix_risks.push(set_risk(matrix, &indices[..i], aggregator)?);
        }
        let configurations = indices.iter().map(|&m| matrix.configurations()[m].clone()).collect();
        Ok(DefaultSet { ordered_indices: indices, prefix_risks, configurations, aggregator, source })
    }

    pub fn len(&self) -> usize {
        self.ordered_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered_indices.is_empty()
    }

    /// Set risk of the whole list.
    pub fn risk(&self) -> f64 {
        self.prefix_risks.last().copied().unwrap_or(f64::INFINITY)
    }

    /// The first `n` members as a new default set.
    pub fn prefix(&self, n: usize) -> DefaultSet {
        let n = n.min(self.len());
        DefaultSet {
            ordered_indices: self.ordered_indices[..n].to_vec(),
            prefix_risks: self.prefix_risks[..n].to_vec(),
            configurations: self.configurations[..n].to_vec(),
            aggregator: self.aggregator,
            source: self.source,
        }
    }
}

/// Lowest-index argmin over candidate scores; `None` entries are skipped.
fn argmin(scores: &[Option<f64>]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (m, s) in scores.iter().enumerate() {
        if let Some(v) = *s {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((m, v));
            }
        }
    }
    best
}

/// Picks `n` defaults one at a time, each minimizing the set risk of the
/// selection so far plus itself. Ties go to the lowest column index. If `n`
/// exceeds the number of columns, every column is returned in greedy order.
pub fn greedy_select(matrix: &RiskMatrix, n: usize, agg: Aggregator) -> Result<DefaultSet> {
    if n < 1 {
        return Err(Error::SizeOutOfRange { n, columns: matrix.cols() });
    }
    if matrix.rows() == 0 || matrix.cols() == 0 {
        return Err(Error::Empty);
    }
    let steps = n.min(matrix.cols());
    let mut order = Vec::with_capacity(steps);
    let mut prefix_risks = Vec::with_capacity(steps);

    let column_scores = par::map_range(matrix.cols(), |m| {
        let column: Vec<f64> = matrix.column(m).collect();
        Some(agg.apply(&column))
    });
    let (first, risk) = argmin(&column_scores).expect("at least one column");
    let mut state = SetRiskState::new(matrix, &[first])?;
    order.push(first);
    prefix_risks.push(risk);

    while order.len() < steps {
        let scores = par::map_range(matrix.cols(), |m| {
            if state.contains(m) {
                return None;
            }
            let mut scratch = Vec::with_capacity(matrix.rows());
            state.extended_minima(matrix, m, &mut scratch);
            Some(agg.apply(&scratch))
        });
        let (next, risk) = argmin(&scores).expect("a non-member remains");
        state.push(matrix, next)?;
        order.push(next);
        prefix_risks.push(risk);
    }

    let configurations = order.iter().map(|&m| matrix.configurations()[m].clone()).collect();
    Ok(DefaultSet { ordered_indices: order, prefix_risks, configurations, aggregator: agg, source: Source::Greedy })
}
