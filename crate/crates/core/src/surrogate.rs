//! Per-dataset surrogate regressors and candidate pools.
//!
//! A surrogate is an inverse-distance-weighted k-nearest-neighbour regressor
//! over configurations encoded onto the unit hypercube (log2 dimensions are
//! encoded after the log transform, categorical dimensions contribute 0 or 1).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{standardize_values, Provenance, RiskMatrix, RunRecord};
use crate::space::{Configuration, Coord, DimensionKind, HyperparameterSpace, Scale, Value};
use crate::{par, Error, Result};

pub const DEFAULT_NEIGHBOURS: usize = 25;
pub const DISTANCE_FLOOR: f64 = 1e-12;

fn encoded_distance(a: &[Coord], b: &[Coord]) -> f64 {
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (Coord::Unit(u), Coord::Unit(v)) => (u - v) * (u - v),
            (Coord::Level(i), Coord::Level(j))
                if i == j => {
                    0.0
                }
            _ => 1.0,
        })
        .sum();
    libm::sqrt(sq)
}

/// Euclidean distance between two configurations in the encoded space; at
/// most `sqrt(D)`.
pub fn config_distance(space: &HyperparameterSpace, a: &Configuration, b: &Configuration) -> Result<f64> {
    space.validate(&a.values)?;
    space.validate(&b.values)?;
    Ok(encoded_distance(&space.encode(&a.values), &space.encode(&b.values)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    pub dataset_id: String,
    space: HyperparameterSpace,
    points: Vec<(Vec<Coord>, f64)>,
    k: usize,
    epsilon: f64,
}

impl SurrogateModel {
    /// Fits a model to `(configuration values, risk)` observations. Risks are
    /// expected to be standardized already. `k` is clamped to the number of
    /// observations.
    pub fn fit(
        dataset_id: impl Into<String>,
        space: &HyperparameterSpace,
        observations: &[(Vec<Value>, f64)],
        k: usize,
    ) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::NoRecords);
        }
        if k < 1 {
            return Err(Error::TooFew { what: "neighbours", needed: 1, got: k });
        }
        let mut points = Vec::with_capacity(observations.len());
        for (values, risk) in observations {
            space.validate(values)?;
            if !risk.is_finite() {
                return Err(Error::NonFiniteRisk);
            }
            points.push((space.encode(values), *risk));
        }
        Ok(SurrogateModel {
            dataset_id: dataset_id.into(),
            space: space.clone(),
            k: k.min(points.len()),
            points,
            epsilon: DISTANCE_FLOOR,
        })
    }

    pub fn space(&self) -> &HyperparameterSpace {
        &self.space
    }

    /// Effective neighbour count.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn training_len(&self) -> usize {
        self.points.len()
    }

    pub fn training_range(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, r)| (lo.min(*r), hi.max(*r)))
    }

    /// Weighted mean of the `k` nearest training risks with weights
    /// `1 / (d + epsilon)`. Neighbours at distance exactly zero take over the
    /// prediction, which is the limit of those weights.
    pub fn predict(&self, values: &[Value]) -> Result<f64> {
        self.space.validate(values)?;
        Ok(self.predict_encoded(&self.space.encode(values)))
    }

    fn predict_encoded(&self, query: &[Coord]) -> f64 {
        let mut dist: Vec<(f64, usize)> =
            self.points.iter().enumerate().map(|(i, (p, _))| (encoded_distance(query, p), i)).collect();
        let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_distance);
            dist.truncate(self.k);
        }
        dist.sort_by(by_distance);

        let exact: Vec<f64> = dist.iter().filter(|(d, _)| *d == 0.0).map(|&(_, i)| self.points[i].1).collect();
        if !exact.is_empty() {
            return exact.iter().sum::<f64>() / exact.len() as f64;
        }
        let (mut num, mut den) = (0.0, 0.0);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(d, i) in &dist {
            let r = self.points[i].1;
            let w = 1.0 / (d + self.epsilon);
            num += w * r;
            den += w;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (num / den).clamp(lo, hi)
    }
}

/// Fits one model per dataset from raw run records.
///
/// Records are grouped by dataset in first-seen order, converted to the risk
/// convention and standardized over each dataset's observed runs.
pub fn fit_from_runs(records: &[RunRecord], space: &HyperparameterSpace, k: usize) -> Result<Vec<SurrogateModel>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let first = &records[0].measure;
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<(Vec<Value>, f64)>> = BTreeMap::new();
    for r in records {
        if &r.measure != first {
            return Err(Error::MixedMeasures(first.clone(), r.measure.clone()));
        }
        if !r.value.is_finite() {
            return Err(Error::NonFiniteMeasure(r.dataset_id.clone()));
        }
        let group = groups.entry(r.dataset_id.as_str()).or_insert_with(|| {
            order.push(r.dataset_id.as_str());
            Vec::new()
        });
        group.push((r.values.clone(), r.risk()));
    }
    order
        .into_iter()
        .map(|id| {
            let mut obs = groups.remove(id).expect("grouped");
            let mut risks: Vec<f64> = obs.iter().map(|(_, r)| *r).collect();
            standardize_values(&mut risks);
            obs.iter_mut().zip(risks).for_each(|(o, r)| o.1 = r);
            SurrogateModel::fit(id, space, &obs, k)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    pub configurations: Vec<Configuration>,
    /// `None` for grid pools.
    pub seed: Option<u64>,
}

impl CandidatePool {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }
}

fn integer_bounds(low: f64, high: f64) -> (i64, i64) {
    (libm::ceil(low) as i64, libm::floor(high) as i64)
}

/// Draws `count` configurations uniformly per dimension (log-uniformly on
/// log2 dimensions), reproducibly from `seed`.
pub fn sample_candidates(space: &HyperparameterSpace, count: usize, seed: u64) -> Result<CandidatePool> {
    if count < 1 {
        return Err(Error::TooFew { what: "candidates", needed: 1, got: count });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut configurations = Vec::with_capacity(count);
    for id in 0..count {
        let values = space
            .dimensions()
            .iter()
            .map(|d| match &d.kind {
                DimensionKind::Continuous { low, high, scale: Scale::Linear } => Value::Number(rng.gen_range(*low..=*high)),
                DimensionKind::Continuous { low, high, scale: Scale::Log2 } => {
                    let e = rng.gen_range(libm::log2(*low)..=libm::log2(*high));
                    Value::Number(libm::exp2(e).clamp(*low, *high))
                }
                DimensionKind::Integer { low, high, scale } => {
                    let (lo, hi) = integer_bounds(*low, *high);
                    let v = match scale {
                        Scale::Linear => rng.gen_range(lo..=hi),
                        Scale::Log2 => {
                            let e = rng.gen_range(libm::log2(*low)..=libm::log2(*high));
                            (libm::round(libm::exp2(e)) as i64).clamp(lo, hi)
                        }
                    };
                    Value::Number(v as f64)
                }
                DimensionKind::Categorical { levels } => Value::Level(levels[rng.gen_range(0..levels.len())].clone()),
            })
            .collect();
        configurations.push(Configuration::new(id, values));
    }
    Ok(CandidatePool { configurations, seed: Some(seed) })
}

fn axis(kind: &DimensionKind, points: usize) -> Vec<Value> {
    let spaced = |low: f64, high: f64, scale: Scale| -> Vec<f64> {
        if points == 1 {
            return alloc::vec![low];
        }
        let (a, b) = match scale {
            Scale::Linear => (low, high),
            Scale::Log2 => (libm::log2(low), libm::log2(high)),
        };
        (0..points)
            .map(|i| {
                if i == 0 {
                    return low;
                }
                if i == points - 1 {
                    return high;
                }
                let t = a + (b - a) * i as f64 / (points - 1) as f64;
                match scale {
                    Scale::Linear => t,
                    Scale::Log2 => libm::exp2(t).clamp(low, high),
                }
            })
            .collect()
    };
    match kind {
        DimensionKind::Continuous { low, high, scale } => spaced(*low, *high, *scale).into_iter().map(Value::Number).collect(),
        DimensionKind::Integer { low, high, scale } => {
            let (lo, hi) = integer_bounds(*low, *high);
            let mut vals: Vec<i64> =
                spaced(*low, *high, *scale).into_iter().map(|x| (libm::round(x) as i64).clamp(lo, hi)).collect();
            vals.dedup();
            vals.into_iter().map(|v| Value::Number(v as f64)).collect()
        }
        DimensionKind::Categorical { levels } => levels.iter().cloned().map(Value::Level).collect(),
    }
}

/// The full Cartesian grid with `points` equally spaced values per numeric
/// dimension (log-spaced on log2 dimensions) and every level of each
/// categorical dimension. The first dimension varies slowest.
pub fn grid_candidates(space: &HyperparameterSpace, points: usize) -> Result<CandidatePool> {
    if points < 1 {
        return Err(Error::TooFew { what: "grid points", needed: 1, got: points });
    }
    let axes: Vec<Vec<Value>> = space.dimensions().iter().map(|d| axis(&d.kind, points)).collect();
    let mut rows: Vec<Vec<Value>> = alloc::vec![Vec::new()];
    for values in &axes {
        let mut next = Vec::with_capacity(rows.len() * values.len());
        for prefix in &rows {
            for v in values {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        rows = next;
    }
    let configurations = rows.into_iter().enumerate().map(|(id, v)| Configuration::new(id, v)).collect();
    Ok(CandidatePool { configurations, seed: None })
}

/// Predicts every (dataset, candidate) cell.
pub fn build_surrogate_matrix(models: &[SurrogateModel], pool: &CandidatePool) -> Result<RiskMatrix> {
    let first = models.first().ok_or(Error::Empty)?;
    if pool.is_empty() {
        return Err(Error::Empty);
    }
    if models.iter().any(|m| m.space != first.space) {
        return Err(Error::SpaceMismatch);
    }
    let mut encoded = Vec::with_capacity(pool.len());
    for c in &pool.configurations {
        first.space.validate(&c.values).map_err(|_| Error::SpaceMismatch)?;
        encoded.push(first.space.encode(&c.values));
    }
    let rows = par::map_range(models.len() * pool.len(), |cell| {
        let (k, m) = (cell / pool.len(), cell % pool.len());
        models[k].predict_encoded(&encoded[m])
    });
    let rows: Vec<Vec<f64>> = rows.chunks(pool.len()).map(<[f64]>::to_vec).collect();
    let configurations = pool.configurations.iter().enumerate().map(|(m, c)| Configuration::new(m, c.values.clone())).collect();
    RiskMatrix::new(
        models.iter().map(|m| m.dataset_id.clone()).collect(),
        configurations,
        rows,
        Provenance::SurrogatePredicted,
    )
}
