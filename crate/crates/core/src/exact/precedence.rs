use alloc::vec::Vec;

use crate::matrix::RiskMatrix;

/// For every dataset `k` and column `m`, the columns that beat `m` on `k`
/// under the lexicographic order on `(risk, index)`.
///
/// Stored as one sorted permutation per dataset: `Q[k][m]` is the prefix of
/// that permutation before `m`'s position, so memory is O(K·M).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceSets {
    order: Vec<Vec<usize>>,
    rank: Vec<Vec<usize>>,
}

impl PrecedenceSets {
    pub fn rows(&self) -> usize {
        self.order.len()
    }

    pub fn cols(&self) -> usize {
        self.order.first().map_or(0, Vec::len)
    }

    /// Members of `Q[k][m]`, best first.
    pub fn set(&self, k: usize, m: usize) -> &[usize] {
        &self.order[k][..self.rank[k][m]]
    }

    pub fn contains(&self, k: usize, m: usize, s: usize) -> bool {
        self.rank[k][s] < self.rank[k][m]
    }

    /// Columns of dataset `k` from best to worst.
    pub fn order(&self, k: usize) -> &[usize] {
        &self.order[k]
    }

    /// Position of column `m` in dataset `k`'s order (0 = best).
    pub fn rank(&self, k: usize, m: usize) -> usize {
        self.rank[k][m]
    }
}

pub fn precedence_sets(matrix: &RiskMatrix) -> PrecedenceSets {
    let mut order = Vec::with_capacity(matrix.rows());
    let mut rank = Vec::with_capacity(matrix.rows());
    for row in matrix.iter_rows() {
        let mut idx: Vec<usize> = (0..row.len()).collect();
        idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        let mut r = alloc::vec![0; row.len()];
        for (pos, &m) in idx.iter().enumerate() {
            r[m] = pos;
        }
        order.push(idx);
        rank.push(r);
    }
    PrecedenceSets { order, rank }
}
