use default_miner_core::exact::binomial;
use default_miner_core::stats::chi_squared_sf;
use default_miner_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix_strategy(max_k: usize, max_m: usize) -> impl Strategy<Value = RiskMatrix> {
    (1..=max_k, 1..=max_m).prop_flat_map(|(k, m)| {
        prop::collection::vec(prop::collection::vec(-2.0f64..2.0, m), k)
            .prop_map(|rows| RiskMatrix::from_rows(rows).unwrap())
    })
}

fn agg_strategy() -> impl Strategy<Value = Aggregator> {
    prop_oneof![
        Just(Aggregator::Mean),
        Just(Aggregator::Sum),
        Just(Aggregator::Median),
        Just(Aggregator::Min),
        Just(Aggregator::Max),
        Just(Aggregator::HodgesLehmann),
        (0.0f64..=1.0).prop_map(Aggregator::Quantile),
    ]
}

fn random_matrix(rng: &mut ChaCha8Rng, k: usize, m: usize) -> RiskMatrix {
    RiskMatrix::from_rows((0..k).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect()).unwrap()
}

/// Every n-subset in lexicographic order.
fn subsets(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, n, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #[test]
    fn standardized_rows_have_zero_mean_unit_std(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 2..20), 1..5)) {
        let m = rows[0].len();
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|mut r| { r.resize(m, 0.5); r }).collect();
        let s = standardize_per_dataset(&RiskMatrix::from_rows(rows.clone()).unwrap()).unwrap();
        for (k, raw) in rows.iter().enumerate() {
            let row = s.row(k);
            let spread = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - raw.iter().cloned().fold(f64::INFINITY, f64::min);
            if spread > 1e-6 {
                let mean = row.iter().sum::<f64>() / m as f64;
                let std = (row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m as f64).sqrt();
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((std - 1.0).abs() < 1e-9);
            }
        }
        let again = standardize_per_dataset(&s).unwrap();
        for (a, b) in again.iter_rows().flatten().zip(s.iter_rows().flatten()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_normalize_is_idempotent(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 1..8), 1..5)) {
        let once = unit_normalize_per_dataset(&rows);
        let twice = unit_normalize_per_dataset(&once);
        for (a, b) in once.iter().flatten().zip(twice.iter().flatten()) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(a));
        }
    }

    #[test]
    fn aggregate_is_permutation_invariant(mut v in prop::collection::vec(-3.0f64..3.0, 1..30), agg in agg_strategy(), seed in any::<u64>()) {
        let before = aggregate(&v, agg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..v.len()).rev() {
            let j = rng.gen_range(0..=i);
            v.swap(i, j);
        }
        let after = aggregate(&v, agg).unwrap();
        match agg {
            // floating addition is not associative
            Aggregator::Mean | Aggregator::Sum => prop_assert!((before - after).abs() < 1e-12),
            _ => prop_assert_eq!(before, after),
        }
    }

    #[test]
    fn mean_times_k_is_sum(v in prop::collection::vec(-3.0f64..3.0, 1..40)) {
        let mean = aggregate(&v, Aggregator::Mean).unwrap();
        let sum = aggregate(&v, Aggregator::Sum).unwrap();
        prop_assert!((mean * v.len() as f64 - sum).abs() < 1e-12);
    }

    #[test]
    fn adding_a_configuration_never_hurts(mx in matrix_strategy(6, 8), agg in agg_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = mx.cols();
        let size = rng.gen_range(1..=m);
        let members: Vec<usize> = rand::seq::index::sample(&mut rng, m, size).into_vec();
        let base = set_risk(&mx, &members, agg).unwrap();
        for c in 0..m {
            let mut more = members.clone();
            more.push(c);
            prop_assert!(set_risk(&mx, &more, agg).unwrap() <= base);
        }
    }

    #[test]
    fn greedy_prefix_property(mx in matrix_strategy(6, 10), agg in agg_strategy(), n in 1usize..12) {
        let full = greedy_select(&mx, n, agg).unwrap();
        prop_assert_eq!(full.len(), n.min(mx.cols()));
        for i in 1..full.len() {
            prop_assert!(full.prefix_risks[i] <= full.prefix_risks[i - 1]);
            let shorter = greedy_select(&mx, i, agg).unwrap();
            prop_assert_eq!(&shorter.ordered_indices[..], &full.ordered_indices[..i]);
            prop_assert_eq!(&shorter.prefix_risks[..], &full.prefix_risks[..i]);
        }
        for i in 0..full.len() {
            prop_assert_eq!(full.prefix_risks[i], set_risk(&mx, &full.ordered_indices[..=i], agg).unwrap());
        }
    }

    #[test]
    fn config_distance_is_a_metric(seed in any::<u64>()) {
        let space = HyperparameterSpace::new(vec![
            Dimension::continuous("gamma", (-15f64).exp2(), 8.0, Scale::Log2),
            Dimension::continuous("alpha", 0.0, 1.0, Scale::Linear),
            Dimension::integer("depth", 1.0, 30.0, Scale::Linear),
            Dimension::categorical("kernel", ["rbf", "linear", "poly"]),
        ]).unwrap();
        let pool = sample_candidates(&space, 3, seed).unwrap();
        let [a, b, c] = [&pool.configurations[0], &pool.configurations[1], &pool.configurations[2]];
        let ab = config_distance(&space, a, b).unwrap();
        let ba = config_distance(&space, b, a).unwrap();
        let bc = config_distance(&space, b, c).unwrap();
        let ac = config_distance(&space, a, c).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(config_distance(&space, a, a).unwrap(), 0.0);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!(ab <= 2.0 + 1e-12);
    }
}

#[test]
fn ingestion_sign_flip_roundtrips() {
    let space = HyperparameterSpace::new(vec![Dimension::continuous("x", 0.0, 1.0, Scale::Linear)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut records = Vec::new();
    for d in 0..4 {
        for c in 0..5 {
            records.push(RunRecord {
                dataset_id: format!("d{d}"),
                values: vec![Value::Number(c as f64 / 4.0)],
                measure: "auc".into(),
                value: rng.gen(),
                higher_is_better: true,
            });
        }
    }
    let mx = ingest_runs(&records, &space).unwrap();
    for (i, r) in records.iter().enumerate() {
        assert_eq!(-mx.get(i / 5, i % 5), r.value);
    }
}

#[test]
fn marginal_equals_set_risk_on_union() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..1000 {
        let (k, m) = (rng.gen_range(1..8), rng.gen_range(2..10));
        let mx = random_matrix(&mut rng, k, m);
        let agg = Aggregator::ALL_KINDS[trial % Aggregator::ALL_KINDS.len()];
        let size = rng.gen_range(1..m);
        let idx = rand::seq::index::sample(&mut rng, m, size + 1).into_vec();
        let (members, candidate) = (&idx[..size], idx[size]);
        let state = SetRiskState::new(&mx, members).unwrap();
        let mut union = members.to_vec();
        union.push(candidate);
        assert_eq!(
            marginal_set_risk(&state, &mx, candidate, agg).unwrap(),
            set_risk(&mx, &union, agg).unwrap()
        );
    }
}

#[test]
fn hodges_lehmann_against_pair_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..12);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut walsh = Vec::new();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i..] {
                walsh.push((a + b) / 2.0);
            }
        }
        // median by counting: the smallest value with at least half the mass at or below it
        walsh.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w = walsh.len();
        let expected = if w % 2 == 1 { walsh[w / 2] } else { (walsh[w / 2 - 1] + walsh[w / 2]) / 2.0 };
        assert_eq!(aggregate(&v, Aggregator::HodgesLehmann).unwrap(), expected);
    }
    assert_eq!(aggregate(&[1.0, 2.0, 4.0], Aggregator::HodgesLehmann).unwrap(), 2.25);
}

#[test]
fn greedy_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..300 {
        let (k, m) = (rng.gen_range(1..8), rng.gen_range(1..=12));
        let mx = random_matrix(&mut rng, k, m);
        let agg = Aggregator::ALL_KINDS[trial % Aggregator::ALL_KINDS.len()];
        let g1 = greedy_select(&mx, 1, agg).unwrap();
        let o1 = brute_force_oracle(&mx, 1, agg).unwrap();
        assert_eq!(g1.risk(), o1.risk());
        assert_eq!(g1.ordered_indices, o1.ordered_indices);
        for n in 2..=3.min(m) {
            let g = greedy_select(&mx, n, agg).unwrap();
            let o = brute_force_oracle(&mx, n, agg).unwrap();
            assert!(o.risk() <= g.risk());
        }
    }
}

#[test]
fn oracle_is_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..100 {
        let (k, m) = (rng.gen_range(1..5), rng.gen_range(1..8));
        let mx = random_matrix(&mut rng, k, m);
        let agg = Aggregator::ALL_KINDS[trial % Aggregator::ALL_KINDS.len()];
        let n = rng.gen_range(1..=m);
        let best = subsets(m, n)
            .into_iter()
            .map(|s| (set_risk(&mx, &s, agg).unwrap(), s))
            .fold(None::<(f64, Vec<usize>)>, |acc, (v, s)| match acc {
                Some((b, _)) if b <= v => acc,
                _ => Some((v, s)),
            })
            .unwrap();
        let o = brute_force_oracle(&mx, n, agg).unwrap();
        assert_eq!((o.risk(), o.ordered_indices), best);
    }
}

#[test]
fn exact_matches_oracle_on_unit_and_signed_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for trial in 0..200 {
        let (k, m) = (rng.gen_range(1..=10), rng.gen_range(3..=12));
        let mut mx = random_matrix(&mut rng, k, m);
        if trial % 2 == 1 && m >= 2 {
            mx = standardize_per_dataset(&mx).unwrap();
        }
        for n in 1..=3 {
            let mip = build_mip(&mx, n).unwrap();
            let exact = solve_exact(&mip, SolveOptions::default(), || false).unwrap();
            let oracle = brute_force_oracle(&mx, n, Aggregator::Sum).unwrap();
            assert!(exact.is_optimal());
            assert_eq!(exact.objective(), oracle.risk());
            assert_eq!(exact.defaults.ordered_indices, oracle.ordered_indices);
            assert_eq!(exact.objective(), set_risk(&mx, &exact.defaults.ordered_indices, Aggregator::Sum).unwrap());

            let psi = mip.reconstruct_psi(&exact.defaults.ordered_indices);
            let phi: Vec<bool> = (0..m).map(|c| exact.defaults.ordered_indices.contains(&c)).collect();
            assert!(mip.is_feasible(&phi, &psi));
            for (row, psi_row) in psi.iter().enumerate() {
                let ones: Vec<usize> = (0..m).filter(|&c| psi_row[c] == 1.0).collect();
                assert_eq!(ones.len(), 1);
                assert!(phi[ones[0]]);
                let best = exact.defaults.ordered_indices.iter().map(|&c| mx.get(row, c)).fold(f64::INFINITY, f64::min);
                assert_eq!(mx.get(row, ones[0]), best);
            }
        }
    }
}

#[test]
fn sum_and_mean_share_optimal_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let (k, m) = (rng.gen_range(1..8), rng.gen_range(2..9));
        let mx = random_matrix(&mut rng, k, m);
        let n = rng.gen_range(1..=m);
        let by_sum = brute_force_oracle(&mx, n, Aggregator::Sum).unwrap();
        let by_mean = brute_force_oracle(&mx, n, Aggregator::Mean).unwrap();
        assert_eq!(by_sum.ordered_indices, by_mean.ordered_indices);
    }
}

#[test]
fn exact_is_scheduling_free_and_handles_n_equal_m() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mx = random_matrix(&mut rng, 5, 7);
    let mip = build_mip(&mx, 7).unwrap();
    let out = solve_exact(&mip, SolveOptions::default(), || false).unwrap();
    assert_eq!(out.defaults.ordered_indices, (0..7).collect::<Vec<_>>());
    let row_min_sum: f64 = (0..5).map(|k| mx.row_min(k)).sum();
    assert_eq!(out.objective(), row_min_sum);
    assert_eq!(binomial(7, 7), 1);
}

#[test]
fn surrogate_interpolates_nodes_and_stays_in_range() {
    let space = HyperparameterSpace::new(vec![
        Dimension::continuous("gamma", (-15f64).exp2(), 8.0, Scale::Log2),
        Dimension::continuous("cost", (-5f64).exp2(), 32768.0, Scale::Log2),
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..20 {
        let train = sample_candidates(&space, 40, trial).unwrap();
        let obs: Vec<(Vec<Value>, f64)> =
            train.configurations.iter().map(|c| (c.values.clone(), rng.gen_range(-2.0..2.0))).collect();
        let model = SurrogateModel::fit("d", &space, &obs, 1 + trial as usize % 30).unwrap();
        for (values, risk) in &obs {
            assert!((model.predict(values).unwrap() - risk).abs() <= 1e-9);
        }
        let (lo, hi) = model.training_range();
        for c in sample_candidates(&space, 50, 1000 + trial).unwrap().configurations {
            let p = model.predict(&c.values).unwrap();
            assert!(lo <= p && p <= hi && p.is_finite());
        }
    }
}

#[test]
fn nearest_neighbour_matches_linear_scan() {
    let space = HyperparameterSpace::new(vec![
        Dimension::continuous("a", 0.0, 1.0, Scale::Linear),
        Dimension::continuous("b", 1.0, 1024.0, Scale::Log2),
    ])
    .unwrap();
    let train = sample_candidates(&space, 30, 9).unwrap();
    let obs: Vec<(Vec<Value>, f64)> =
        train.configurations.iter().enumerate().map(|(i, c)| (c.values.clone(), i as f64)).collect();
    let model = SurrogateModel::fit("d", &space, &obs, 1).unwrap();
    for q in sample_candidates(&space, 100, 10).unwrap().configurations {
        let (mut best, mut best_d) = (0, f64::INFINITY);
        for (i, c) in train.configurations.iter().enumerate() {
            let d = config_distance(&space, &q, c).unwrap();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        assert_eq!(model.predict(&q.values).unwrap(), best as f64);
    }
}

#[test]
fn random_search_single_draw_converges_to_row_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mx = random_matrix(&mut rng, 3, 9);
    let reps = 100_000;
    let rs = random_search_baseline(&mx, 1, 42, reps).unwrap();
    for k in 0..3 {
        let row = mx.row(k);
        let mean = row.iter().sum::<f64>() / 9.0;
        let var = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 9.0;
        let se = (var / reps as f64).sqrt();
        assert!((rs.achieved[k] - mean).abs() <= 3.0 * se, "row {k}");
    }
}

#[test]
fn random_search_improves_with_budget_on_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mx = random_matrix(&mut rng, 6, 40);
    let means: Vec<f64> = [1, 4, 16, 40]
        .iter()
        .map(|&b| random_search_baseline(&mx, b, 3, 2000).unwrap().achieved.iter().sum::<f64>())
        .collect();
    assert!(means.windows(2).all(|w| w[1] <= w[0]));
    let exhaustive = random_search_baseline(&mx, 40, 3, 5).unwrap();
    for k in 0..6 {
        assert_eq!(exhaustive.achieved[k], mx.row_min(k));
    }
}

#[test]
fn lodo_improves_monotonically_in_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..30 {
        let mx = random_matrix(&mut rng, 6, 15);
        let agg = Aggregator::ALL_KINDS[trial % Aggregator::ALL_KINDS.len()];
        let out = lodo_evaluate(&mx, &[1, 2, 4, 8, 15], agg).unwrap();
        for w in out.windows(2) {
            for k in 0..6 {
                assert!(w[1].achieved[k] <= w[0].achieved[k]);
            }
        }
        for k in 0..6 {
            assert_eq!(out[4].achieved[k], mx.row_min(k));
        }
    }
}

#[test]
fn rank_rows_sum_to_triangular_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let s = rng.gen_range(2..9);
        // coarse values force ties
        let row: Vec<f64> = (0..s).map(|_| rng.gen_range(0..4) as f64).collect();
        let ranks = default_miner_core::stats::rank_row(&row, true);
        assert_eq!(ranks.iter().sum::<f64>(), (s * (s + 1)) as f64 / 2.0);
    }
}

#[test]
fn friedman_p_value_matches_statrs() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let (k, s) = (rng.gen_range(2..30), rng.gen_range(3..10));
        let scores: Vec<Vec<f64>> = (0..k).map(|_| (0..s).map(|_| rng.gen()).collect()).collect();
        let ranks = rank_rows(&scores, true);
        let (stat, p) = friedman_test(&ranks).unwrap();
        let reference = 1.0 - ChiSquared::new((s - 1) as f64).unwrap().cdf(stat);
        assert!((p - reference).abs() < 1e-9, "stat {stat} df {}: {p} vs {reference}", s - 1);
    }
    for (x, df) in [(0.5, 1.0), (12.0, 5.0), (80.0, 9.0), (3.0, 30.0)] {
        let reference = 1.0 - ChiSquared::new(df).unwrap().cdf(x);
        assert!((chi_squared_sf(x, df) - reference).abs() < 1e-10);
    }
}
