use alloc::vec;
use alloc::vec::Vec;

use super::precedence::{precedence_sets, PrecedenceSets};
use crate::matrix::RiskMatrix;
use crate::{Error, Result};

/// The integer program for selecting `n` of `M` columns under the sum
/// aggregator.
///
/// Variables: binary `phi[m]` (column selected) and continuous `psi[k][m]`
/// (column `m` is the best selected column on dataset `k`). Objective:
/// `sum_k sum_m R[k][m] * psi[k][m]`. Constraints:
///
/// * cardinality: `sum_m phi[m] = n`
/// * coupling: `psi[k][m] >= phi[m] - sum_{s in Q[k][m]} phi[s]`
/// * nonnegativity: `psi[k][m] >= 0`
/// * row sum: `sum_m psi[k][m] = 1`, which keeps signed risks well posed
#[derive(Debug, Clone, PartialEq)]
pub struct MipInstance {
    pub n: usize,
    pub risks: RiskMatrix,
    pub precedence: PrecedenceSets,
}

pub fn build_mip(matrix: &RiskMatrix, n: usize) -> Result<MipInstance> {
    if n < 1 || n > matrix.cols() {
        return Err(Error::SizeOutOfRange { n, columns: matrix.cols() });
    }
    if matrix.rows() == 0 {
        return Err(Error::Empty);
    }
    Ok(MipInstance { n, risks: matrix.clone(), precedence: precedence_sets(matrix) })
}

impl MipInstance {
    pub fn datasets(&self) -> usize {
        self.risks.rows()
    }

    pub fn columns(&self) -> usize {
        self.risks.cols()
    }

    pub fn binary_variables(&self) -> usize {
        self.columns()
    }

    pub fn continuous_variables(&self) -> usize {
        self.datasets() * self.columns()
    }

    pub fn constraint_count(&self) -> usize {
        let km = self.datasets() * self.columns();
        1 + km + km + self.datasets()
    }

    /// The assignment of `psi` implied by a selection: on each dataset, a 1
    /// at the selected column that is lexicographically best there.
    pub fn reconstruct_psi(&self, selected: &[usize]) -> Vec<Vec<f64>> {
        let mut psi = vec![vec![0.0; self.columns()]; self.datasets()];
        for (k, row) in psi.iter_mut().enumerate() {
            if let Some(&best) = selected.iter().min_by_key(|&&m| self.precedence.rank(k, m)) {
                row[best] = 1.0;
            }
        }
        psi
    }

    pub fn objective(&self, psi: &[Vec<f64>]) -> f64 {
        psi.iter()
            .enumerate()
            .map(|(k, row)| row.iter().enumerate().map(|(m, p)| p * self.risks.get(k, m)).sum::<f64>())
            .sum()
    }

    /// Checks every constraint family for a candidate `(phi, psi)`.
    pub fn is_feasible(&self, phi: &[bool], psi: &[Vec<f64>]) -> bool {
        const TOL: f64 = 1e-12;
        if phi.len() != self.columns() || psi.len() != self.datasets() {
            return false;
        }
        if phi.iter().filter(|&&p| p).count() != self.n {
            return false;
        }
        for (k, row) in psi.iter().enumerate() {
            if row.len() != self.columns() {
                return false;
            }
            if libm::fabs(row.iter().sum::<f64>() - 1.0) > TOL {
                return false;
            }
            for (m, &p) in row.iter().enumerate() {
                if p < -TOL {
                    return false;
                }
                let better = self.precedence.set(k, m).iter().filter(|&&s| phi[s]).count() as f64;
                let rhs = if phi[m] { 1.0 } else { 0.0 } - better;
                if p < rhs - TOL {
                    return false;
                }
            }
        }
        true
    }
}
