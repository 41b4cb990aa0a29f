//! Synthetic benchmark corpora: per-dataset quadratic risk bowls over a
//! two-dimensional SVM-style space. Used by the `demo` subcommand and the
//! acceptance suite.

use default_miner_core::{
    grid_candidates, sample_candidates, CandidatePool, Configuration, Dimension, HyperparameterSpace, Provenance,
    RiskMatrix, RunRecord, Scale, Value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// `gamma` in [2^-15, 2^3] and `cost` in [2^-5, 2^15], both log2.
pub fn svm_space() -> HyperparameterSpace {
    HyperparameterSpace::new(vec![
        Dimension::continuous("gamma", (-15f64).exp2(), 3f64.exp2(), Scale::Log2),
        Dimension::continuous("cost", (-5f64).exp2(), 15f64.exp2(), Scale::Log2),
    ])
    .expect("valid space")
}

/// `risk(u) = offset + sum_i curvature_i * (u_i - center_i)^2` on unit
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Bowl {
    pub center: [f64; 2],
    pub curvature: [f64; 2],
    pub offset: f64,
}

impl Bowl {
    pub fn risk(&self, unit: [f64; 2]) -> f64 {
        self.offset
            + self.curvature[0] * (unit[0] - self.center[0]).powi(2)
            + self.curvature[1] * (unit[1] - self.center[1]).powi(2)
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub space: HyperparameterSpace,
    pub bowls: Vec<Bowl>,
    /// Standard deviation of observation noise.
    pub noise: f64,
}

fn random_bowl(rng: &mut ChaCha8Rng, center: [f64; 2]) -> Bowl {
    Bowl {
        center,
        curvature: [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)],
        offset: rng.gen_range(0.0..0.2),
    }
}

impl Corpus {
    /// Independent bowls with centers uniform on the unit square.
    pub fn independent_bowls(datasets: usize, noise: f64, seed: u64) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bowls = (0..datasets)
            .map(|_| {
                let c = [rng.gen(), rng.gen()];
                random_bowl(&mut rng, c)
            })
            .collect();
        Corpus { space: svm_space(), bowls, noise }
    }

    /// Bowls whose centers scatter around one shared good region.
    pub fn shared_region(datasets: usize, spread: f64, noise: f64, seed: u64) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let common = [rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)];
        let scatter = Normal::new(0.0, spread).expect("finite spread");
        let bowls = (0..datasets)
            .map(|_| {
                let c = [
                    (common[0] + scatter.sample(&mut rng)).clamp(0.0, 1.0),
                    (common[1] + scatter.sample(&mut rng)).clamp(0.0, 1.0),
                ];
                random_bowl(&mut rng, c)
            })
            .collect();
        Corpus { space: svm_space(), bowls, noise }
    }

    fn unit(&self, c: &Configuration) -> [f64; 2] {
        let mut u = [0.0; 2];
        for (i, (d, v)) in self.space.dimensions().iter().zip(&c.values).enumerate() {
            let (low, high, _) = d.numeric_range().expect("numeric");
            let x = v.as_f64().expect("numeric value");
            u[i] = (x.log2() - low.log2()) / (high.log2() - low.log2());
        }
        u
    }

    /// Noisy risks of every pool member on every dataset.
    pub fn matrix(&self, pool: &CandidatePool, seed: u64) -> RiskMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.noise.max(0.0)).expect("finite noise");
        let rows = self
            .bowls
            .iter()
            .map(|b| pool.configurations.iter().map(|c| b.risk(self.unit(c)) + normal.sample(&mut rng)).collect())
            .collect();
        RiskMatrix::new(
            (0..self.bowls.len()).map(|k| format!("synthetic-{k}")).collect(),
            pool.configurations.clone(),
            rows,
            Provenance::Raw,
        )
        .expect("finite synthetic risks")
    }

    pub fn grid_matrix(&self, points: usize, seed: u64) -> RiskMatrix {
        self.matrix(&grid_candidates(&self.space, points).expect("grid"), seed)
    }

    /// `per_dataset` sampled runs per dataset, reported as accuracy
    /// (`1 - risk`, higher is better). Each dataset sees its own random
    /// configurations.
    pub fn runs(&self, per_dataset: usize, seed: u64) -> Vec<RunRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.noise.max(0.0)).expect("finite noise");
        let mut out = Vec::with_capacity(per_dataset * self.bowls.len());
        for (k, b) in self.bowls.iter().enumerate() {
            let pool = sample_candidates(&self.space, per_dataset, rng.gen()).expect("nonempty pool");
            for c in pool.configurations {
                let risk = b.risk(self.unit(&c)) + normal.sample(&mut rng);
                out.push(RunRecord {
                    dataset_id: format!("synthetic-{k}"),
                    values: c.values,
                    measure: "accuracy".into(),
                    value: 1.0 - risk,
                    higher_is_better: true,
                });
            }
        }
        out
    }
}

/// Renders run records as a runs CSV for `space`.
pub fn runs_csv(space: &HyperparameterSpace, records: &[RunRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["dataset_id".to_string()];
    header.extend(space.dimensions().iter().map(|d| d.name.clone()));
    header.push("measure".into());
    header.push("value".into());
    w.write_record(&header).expect("in-memory write");
    for r in records {
        let mut rec = vec![r.dataset_id.clone()];
        rec.extend(r.values.iter().map(Value::to_string));
        rec.push(r.measure.clone());
        rec.push(r.value.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
