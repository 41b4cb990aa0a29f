//! The dataset × configuration risk matrix, ingestion from run records, and
//! the two row normalizations.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::space::{Configuration, HyperparameterSpace, Value, ValueKey};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Raw,
    Standardized,
    SurrogatePredicted,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Raw => "raw",
            Provenance::Standardized => "standardized",
            Provenance::SurrogatePredicted => "surrogate-predicted",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// K × M matrix of risks, lower is better. Rows are datasets, columns are
/// configurations; column `m` holds `configurations[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskMatrix {
    dataset_ids: Vec<String>,
    configurations: Vec<Configuration>,
    risks: Vec<f64>,
    provenance: Provenance,
}

impl RiskMatrix {
    pub fn new(
        dataset_ids: Vec<String>,
        configurations: Vec<Configuration>,
        rows: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if rows.len() != dataset_ids.len() {
            return Err(Error::Shape("row count differs from dataset count"));
        }
        let cols = configurations.len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("row length differs from configuration count"));
        }
        let risks: Vec<f64> = rows.into_iter().flatten().collect();
        if risks.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteRisk);
        }
        Ok(RiskMatrix { dataset_ids, configurations, risks, provenance })
    }

    /// Matrix with generated ids (`d0`, `d1`, ...) and configurations that
    /// carry only their column index. Handy for synthetic instances.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let ids = (0..rows.len()).map(|k| alloc::format!("d{k}")).collect();
        let configs = (0..cols).map(|m| Configuration::new(m, vec![Value::Number(m as f64)])).collect();
        Self::new(ids, configs, rows, Provenance::Raw)
    }

    pub fn rows(&self) -> usize {
        self.dataset_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.configurations.len()
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.risks[k * self.cols() + m]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let m = self.cols();
        &self.risks[k * m..(k + 1) * m]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows()).map(move |k| self.row(k))
    }

    pub fn column(&self, m: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows()).map(move |k| self.get(k, m))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }

    pub fn dataset_ids(&self) -> &[String] {
        &self.dataset_ids
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configurations
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// The matrix restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> RiskMatrix {
        let mut risks = Vec::with_capacity(rows.len() * self.cols());
        for &k in rows {
            risks.extend_from_slice(self.row(k));
        }
        RiskMatrix {
            dataset_ids: rows.iter().map(|&k| self.dataset_ids[k].clone()).collect(),
            configurations: self.configurations.clone(),
            risks,
            provenance: self.provenance,
        }
    }

    /// The matrix with row `k` removed.
    pub fn without_row(&self, k: usize) -> RiskMatrix {
        let keep: Vec<usize> = (0..self.rows()).filter(|&r| r != k).collect();
        self.select_rows(&keep)
    }

    pub fn row_min(&self, k: usize) -> f64 {
        self.row(k).iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// One observed run: a configuration evaluated on a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dataset_id: String,
    pub values: Vec<Value>,
    pub measure: String,
    pub value: f64,
    pub higher_is_better: bool,
}

impl RunRecord {
    /// The record's value in the risk convention.
    pub fn risk(&self) -> f64 {
        if self.higher_is_better {
            -self.value
        } else {
            self.value
        }
    }
}

/// Builds a raw matrix from a complete set of run records.
///
/// Datasets and configurations are indexed in first-seen order; repeated
/// observations of a cell are averaged; higher-is-better measures are negated.
pub fn ingest_runs(records: &[RunRecord], space: &HyperparameterSpace) -> Result<RiskMatrix> {
    let first = records.first().ok_or(Error::NoRecords)?;
    let mut dataset_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut dataset_ids: Vec<String> = Vec::new();
    let mut config_index: BTreeMap<Vec<ValueKey>, usize> = BTreeMap::new();
    let mut configurations: Vec<Configuration> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();

    for r in records {
        if r.measure != first.measure {
            return Err(Error::MixedMeasures(first.measure.clone(), r.measure.clone()));
        }
        if !r.value.is_finite() {
            return Err(Error::NonFiniteMeasure(r.dataset_id.clone()));
        }
        space.validate(&r.values)?;
        let k = *dataset_index.entry(r.dataset_id.as_str()).or_insert_with(|| {
            dataset_ids.push(r.dataset_id.clone());
            dataset_ids.len() - 1
        });
        let key: Vec<ValueKey> = r.values.iter().map(Value::key).collect();
        let m = *config_index.entry(key).or_insert_with(|| {
            configurations.push(Configuration::new(configurations.len(), r.values.clone()));
            configurations.len() - 1
        });
        let cell = cells.entry((k, m)).or_insert((0.0, 0));
        cell.0 += r.risk();
        cell.1 += 1;
    }

    let (rows, cols) = (dataset_ids.len(), configurations.len());
    let mut missing = Vec::new();
    let mut out = vec![vec![0.0; cols]; rows];
    for (k, row) in out.iter_mut().enumerate() {
        for (m, slot) in row.iter_mut().enumerate() {
            match cells.get(&(k, m)) {
                Some(&(sum, n)) => *slot = sum / n as f64,
                None => missing.push((dataset_ids[k].clone(), m)),
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing));
    }
    RiskMatrix::new(dataset_ids, configurations, out, Provenance::Raw)
}

/// z-standardizes `values` in place with the population standard deviation.
/// Constant inputs become all zeros.
pub fn standardize_values(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = libm::sqrt(var);
    if std == 0.0 {
        values.iter_mut().for_each(|x| *x = 0.0);
    } else {
        values.iter_mut().for_each(|x| *x = (*x - mean) / std);
    }
}

/// Standardizes every row to mean 0 and population standard deviation 1.
pub fn standardize_per_dataset(matrix: &RiskMatrix) -> Result<RiskMatrix> {
    if matrix.cols() < 2 {
        return Err(Error::TooFew { what: "configurations", needed: 2, got: matrix.cols() });
    }
    let mut out = matrix.clone();
    let m = out.cols();
    for row in out.risks.chunks_mut(m) {
        standardize_values(row);
    }
    out.provenance = Provenance::Standardized;
    Ok(out)
}

/// Maps each row onto [0, 1] via its min and max. Constant rows become 0.5.
pub fn unit_normalize_per_dataset(scores: &[Vec<f64>]) -> Vec<Vec<f64>> {
    scores
        .iter()
        .map(|row| {
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                row.iter().map(|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
            } else {
                vec![0.5; row.len()]
            }
        })
        .collect()
}
