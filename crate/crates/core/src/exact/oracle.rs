use alloc::format;
use alloc::vec::Vec;

use super::binomial;
use crate::greedy::{DefaultSet, Source};
use crate::matrix::RiskMatrix;
use crate::objective::{row_minima, Aggregator};
use crate::{Error, Result};

/// Largest number of subsets the oracle will enumerate.
pub const MAX_ORACLE_SUBSETS: u128 = 10_000_000;

/// Exhaustive minimizer of the set risk over all `n`-subsets, for any
/// aggregator. Ties resolve to the lexicographically smallest index set.
pub fn brute_force_oracle(matrix: &RiskMatrix, n: usize, agg: Aggregator) -> Result<DefaultSet> {
    let m = matrix.cols();
    if n < 1 || n > m {
        return Err(Error::SizeOutOfRange { n, columns: m });
    }
    if matrix.rows() == 0 {
        return Err(Error::Empty);
    }
    let subsets = binomial(m, n);
    if subsets > MAX_ORACLE_SUBSETS {
        return Err(Error::TooLarge(format!("C({m}, {n}) = {subsets} subsets exceeds {MAX_ORACLE_SUBSETS}")));
    }

    let mut combo: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let value = agg.apply(&row_minima(matrix, &combo));
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, combo.clone()));
        }
        // next combination in lexicographic order
        let Some(i) = (0..n).rev().find(|&i| combo[i] < m - n + i) else { break };
        combo[i] += 1;
        for j in i + 1..n {
            combo[j] = combo[j - 1] + 1;
        }
    }
    let (_, set) = best.expect("at least one subset");
    DefaultSet::from_indices(matrix, set, agg, Source::BruteForce)
}
