//! Set risk: the per-dataset minimum over a set of configurations, collapsed
//! across datasets by an aggregator.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix::RiskMatrix;
use crate::{Error, Result};

/// How per-dataset minima are collapsed into one number. Every kind is
/// coordinate-wise monotone, so adding a configuration to a set never
/// increases its risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregator {
    Mean,
    Sum,
    Median,
    /// Linear interpolation between adjacent order statistics.
    Quantile(f64),
    Min,
    Max,
    /// Median of the Walsh averages `(x_i + x_j) / 2`, `i <= j`.
    HodgesLehmann,
}

impl Aggregator {
    pub const ALL_KINDS: [Aggregator; 7] = [
        Aggregator::Median,
        Aggregator::Mean,
        Aggregator::Sum,
        Aggregator::Min,
        Aggregator::Max,
        Aggregator::Quantile(0.25),
        Aggregator::HodgesLehmann,
    ];

    pub fn quantile(q: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&q) {
            Ok(Aggregator::Quantile(q))
        } else {
            Err(Error::InvalidAggregator(alloc::format!("q:{q}")))
        }
    }

    /// Applies the aggregator to a nonempty slice.
    pub(crate) fn apply(&self, values: &[f64]) -> f64 {
        debug_assert!(!values.is_empty());
        match *self {
            Aggregator::Sum => values.iter().sum(),
            Aggregator::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregator::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregator::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregator::Median => median_of(sorted(values)),
            Aggregator::Quantile(q) => quantile_sorted(&sorted(values), q),
            Aggregator::HodgesLehmann => {
                let n = values.len();
                let mut walsh = Vec::with_capacity(n * (n + 1) / 2);
                for i in 0..n {
                    for j in i..n {
                        walsh.push((values[i] + values[j]) / 2.0);
                    }
                }
                walsh.sort_by(f64::total_cmp);
                median_of(walsh)
            }
        }
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn median_of(sorted: Vec<f64>) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        sorted[lo.min(sorted.len() - 1)]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregator::Mean => f.write_str("mean"),
            Aggregator::Sum => f.write_str("sum"),
            Aggregator::Median => f.write_str("median"),
            Aggregator::Quantile(q) => write!(f, "q:{q}"),
            Aggregator::Min => f.write_str("min"),
            Aggregator::Max => f.write_str("max"),
            Aggregator::HodgesLehmann => f.write_str("hl"),
        }
    }
}

impl FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "mean" => Ok(Aggregator::Mean),
            "sum" => Ok(Aggregator::Sum),
            "median" => Ok(Aggregator::Median),
            "min" => Ok(Aggregator::Min),
            "max" => Ok(Aggregator::Max),
            "hl" | "hodges-lehmann" => Ok(Aggregator::HodgesLehmann),
            _ => {
                let q = s
                    .strip_prefix("q:")
                    .and_then(|x| x.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidAggregator(s.to_string()))?;
                Aggregator::quantile(q)
            }
        }
    }
}

impl Serialize for Aggregator {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Aggregator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn aggregate(values: &[f64], agg: Aggregator) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    Ok(agg.apply(values))
}

fn check_index(matrix: &RiskMatrix, index: usize) -> Result<()> {
    if index < matrix.cols() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, columns: matrix.cols() })
    }
}

/// Per-dataset minima over `members`.
pub(crate) fn row_minima(matrix: &RiskMatrix, members: &[usize]) -> Vec<f64> {
    (0..matrix.rows())
        .map(|k| members.iter().map(|&m| matrix.get(k, m)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Aggregated per-dataset minimum risk of a configuration set.
pub fn set_risk(matrix: &RiskMatrix, members: &[usize], agg: Aggregator) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyMembers);
    }
    members.iter().try_for_each(|&m| check_index(matrix, m))?;
    if matrix.rows() == 0 {
        return Err(Error::Empty);
    }
    Ok(agg.apply(&row_minima(matrix, members)))
}

/// Cached per-dataset minima of a nonempty configuration set.
#[derive(Debug, Clone, PartialEq)]
pub struct SetRiskState {
    members: Vec<usize>,
    per_dataset_min: Vec<f64>,
}

impl SetRiskState {
    pub fn new(matrix: &RiskMatrix, members: &[usize]) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyMembers);
        }
        members.iter().try_for_each(|&m| check_index(matrix, m))?;
        Ok(SetRiskState { members: members.to_vec(), per_dataset_min: row_minima(matrix, members) })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn per_dataset_min(&self) -> &[f64] {
        &self.per_dataset_min
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }

    /// Adds a member, updating the cached minima.
    pub fn push(&mut self, matrix: &RiskMatrix, candidate: usize) -> Result<()> {
        self.check_candidate(matrix, candidate)?;
        for (k, slot) in self.per_dataset_min.iter_mut().enumerate() {
            *slot = slot.min(matrix.get(k, candidate));
        }
        self.members.push(candidate);
        Ok(())
    }

    fn check_candidate(&self, matrix: &RiskMatrix, candidate: usize) -> Result<()> {
        check_index(matrix, candidate)?;
        if self.per_dataset_min.len() != matrix.rows() {
            return Err(Error::Shape("state was built for a different matrix"));
        }
        if self.contains(candidate) {
            return Err(Error::AlreadyMember(candidate));
        }
        Ok(())
    }

    /// Minima of `members ∪ {candidate}` written into `scratch`.
    pub(crate) fn extended_minima(&self, matrix: &RiskMatrix, candidate: usize, scratch: &mut Vec<f64>) {
        scratch.clear();
        scratch.extend(self.per_dataset_min.iter().enumerate().map(|(k, &v)| v.min(matrix.get(k, candidate))));
    }
}

/// Risk of the state's set extended by `candidate`, in O(K) plus the
/// aggregator's cost. Equal to `set_risk` on the union.
pub fn marginal_set_risk(
    state: &SetRiskState,
    matrix: &RiskMatrix,
    candidate: usize,
    agg: Aggregator,
) -> Result<f64> {
    state.check_candidate(matrix, candidate)?;
    let mut scratch = Vec::with_capacity(matrix.rows());
    state.extended_minima(matrix, candidate, &mut scratch);
    aggregate(&scratch, agg)
}
