use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::binomial;
use super::mip::MipInstance;
use crate::greedy::{greedy_select, DefaultSet, Source};
use crate::objective::{set_risk, Aggregator};
use crate::{Error, Result};

/// Column-count guard for [`solve_exact`] without `force`.
pub const MAX_COLUMNS: usize = 64;
/// Subset-count guard for [`solve_exact`] without `force`.
pub const MAX_SUBSETS: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Skip the size guards.
    pub force: bool,
    /// Nodes between calls to the interrupt callback.
    pub check_every: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { force: false, check_every: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    Optimal,
    /// Interrupted before optimality was proven. `lower_bound` is a valid
    /// bound on the optimum; `gap` is incumbent minus bound.
    Interrupted { lower_bound: f64, gap: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub defaults: DefaultSet,
    pub status: SolveStatus,
    pub nodes: u64,
}

impl ExactOutcome {
    pub fn objective(&self) -> f64 {
        self.defaults.risk()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

struct Search<'a, F> {
    instance: &'a MipInstance,
    k: usize,
    n: usize,
    /// `suffix_min[i * k + d]` = min over columns `>= i` on dataset `d`.
    suffix_min: Vec<f64>,
    /// Row minima of the current partial selection, one block per depth.
    mins: Vec<f64>,
    chosen: Vec<usize>,
    best: f64,
    best_set: Vec<usize>,
    nodes: u64,
    check_every: u64,
    should_stop: F,
    stopped: bool,
}

impl<F: FnMut() -> bool> Search<'_, F> {
    fn dfs(&mut self, col: usize) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(self.check_every) && (self.should_stop)() {
            self.stopped = true;
            return;
        }
        let depth = self.chosen.len();
        let k = self.k;
        let remaining = self.n - depth;
        let cur = depth * k;
        if remaining == 0 {
            let value: f64 = self.mins[cur..cur + k].iter().sum();
            if value < self.best || (value == self.best && self.chosen < self.best_set) {
                self.best = value;
                self.best_set.clone_from(&self.chosen);
            }
            return;
        }
        let m = self.instance.columns();
        if m - col < remaining {
            return;
        }
        let suffix = &self.suffix_min[col * k..(col + 1) * k];
        let bound: f64 = self.mins[cur..cur + k].iter().zip(suffix).map(|(a, b)| a.min(*b)).sum();
        if bound > self.best {
            return;
        }

        // include `col`
        for d in 0..k {
            let v = self.mins[cur + d].min(self.instance.risks.get(d, col));
            self.mins[cur + k + d] = v;
        }
        self.chosen.push(col);
        self.dfs(col + 1);
        self.chosen.pop();

        // exclude `col`
        self.dfs(col + 1);
    }
}

/// Solves the instance to proven optimality by depth-first branch-and-bound
/// over the selection variables.
///
/// Given a selection, the optimal `psi` is the per-dataset best selected
/// column, so only `phi` is branched on, in column order, include first. A
/// node is pruned when the current row minima, lowered by every column not
/// yet decided, already sum above the incumbent. The incumbent starts at the
/// greedy solution. Among optimal sets the lexicographically smallest one is
/// returned, members in ascending order.
///
/// `should_stop` is polled every `options.check_every` nodes; returning
/// `true` ends the search with the incumbent and
/// [`SolveStatus::Interrupted`].
pub fn solve_exact<F: FnMut() -> bool>(instance: &MipInstance, options: SolveOptions, should_stop: F) -> Result<ExactOutcome> {
    let (k, m, n) = (instance.datasets(), instance.columns(), instance.n);
    if n < 1 || n > m {
        return Err(Error::SizeOutOfRange { n, columns: m });
    }
    if !options.force {
        if m > MAX_COLUMNS {
            return Err(Error::TooLarge(format!("M = {m} exceeds {MAX_COLUMNS} columns")));
        }
        let subsets = binomial(m, n);
        if subsets > MAX_SUBSETS {
            return Err(Error::TooLarge(format!("C({m}, {n}) = {subsets} subsets exceeds {MAX_SUBSETS}")));
        }
    }

    let mut suffix_min = vec![f64::INFINITY; (m + 1) * k];
    for col in (0..m).rev() {
        for d in 0..k {
            suffix_min[col * k + d] = suffix_min[(col + 1) * k + d].min(instance.risks.get(d, col));
        }
    }
    let root_bound: f64 = suffix_min[..k].iter().sum();

    let mut start = greedy_select(&instance.risks, n, Aggregator::Sum)?.ordered_indices;
    start.sort_unstable();
    let start_value = set_risk(&instance.risks, &start, Aggregator::Sum)?;

    let mut search = Search {
        instance,
        k,
        n,
        suffix_min,
        mins: vec![f64::INFINITY; (n + 1) * k],
        chosen: Vec::with_capacity(n),
        best: start_value,
        best_set: start,
        nodes: 0,
        check_every: options.check_every.max(1),
        should_stop,
        stopped: false,
    };
    search.dfs(0);

    let status = if search.stopped {
        SolveStatus::Interrupted { lower_bound: root_bound, gap: search.best - root_bound }
    } else {
        SolveStatus::Optimal
    };
    let defaults = DefaultSet::from_indices(&instance.risks, search.best_set, Aggregator::Sum, Source::Exact)?;
    Ok(ExactOutcome { defaults, status, nodes: search.nodes })
}
