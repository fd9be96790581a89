mod common;

use fraudnet::birank::{birank, birank_direct, BiRankConfig, NormalizedOperator, QueryVector};
use fraudnet::graph::{build_graph, load_graph, save_graph, BipartiteGraph, EdgeRecord, NodeId, PartyKind};
use fraudnet::ml::logistic::fit_logistic;
use fraudnet::ml::metrics::{aupr, auroc, tdl};
use fraudnet::ml::smote::{smote, SmoteConfig};
use fraudnet::ml::split::{stratified_folds, stratified_split};
use fraudnet::ml::LabeledDataset;
use proptest::prelude::*;

fn records() -> impl Strategy<Value = Vec<(u8, u8, f64)>> {
    prop::collection::vec((0u8..12, 0u8..10, 0.1f64..4.0), 1..40)
}

fn graph_of(recs: &[(u8, u8, f64)]) -> BipartiteGraph {
    build_graph(
        recs.iter()
            .map(|&(c, p, w)| EdgeRecord::new(format!("c{c}"), format!("p{p}"), PartyKind::Expert).with_weight(w)),
    )
    .unwrap()
}

fn query_for(g: &BipartiteGraph, mask: &[bool]) -> QueryVector {
    let v: Vec<f64> = (0..g.n_claims()).map(|i| if mask[i % mask.len()] { 1.0 } else { 0.0 }).collect();
    QueryVector::new(v, true).unwrap()
}

fn tight(alpha: f64) -> BiRankConfig {
    BiRankConfig { tolerance: 1e-12, max_iterations: 100_000, ..BiRankConfig::with_alpha(alpha) }
}

fn scored(scores: &[f64], y: &[u8]) -> bool {
    y.contains(&0) && y.contains(&1) && scores.len() == y.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_degrees_and_adjacency_agree(recs in records()) {
        let g = graph_of(&recs);
        let mut by_claim = vec![0.0; g.n_claims()];
        let mut by_party = vec![0.0; g.n_parties()];
        for (i, j, w) in g.edges() {
            prop_assert!(w > 0.0);
            by_claim[i] += w;
            by_party[j] += w;
            prop_assert_eq!(g.weight(i, j), w);
            let (claims, weights) = g.party_claims(j);
            let k = claims.iter().position(|&c| c as usize == i).unwrap();
            prop_assert_eq!(weights[k], w);
        }
        let total: f64 = recs.iter().map(|r| r.2).sum();
        prop_assert!((by_claim.iter().sum::<f64>() - total).abs() < 1e-9);
        for (a, b) in by_claim.iter().zip(g.claim_degrees()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in by_party.iter().zip(g.party_degrees()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn neighborhoods_alternate_kinds(recs in records(), origin in 0usize..12) {
        let g = graph_of(&recs);
        let o = NodeId::claim((origin % g.n_claims()) as u32);
        for k in 1..=4 {
            let n = g.neighborhood(o, k).unwrap();
            prop_assert!(n.members.iter().all(|m| m.is_claim() == (k % 2 == 0)));
            prop_assert!(!n.members.contains(&o));
            let mut sorted = n.members.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), n.members.len());
        }
    }

    #[test]
    fn snapshot_round_trip(recs in records()) {
        let g = graph_of(&recs);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        save_graph(&g, &path).unwrap();
        prop_assert_eq!(load_graph(&path).unwrap(), g);
    }

    #[test]
    fn eigen_identity(recs in records()) {
        let g = graph_of(&recs);
        let op = NormalizedOperator::new(&g).unwrap();
        let root: Vec<f64> = g.claim_degrees().iter().map(|d| d.sqrt()).collect();
        let mut mid = vec![0.0; g.n_parties()];
        op.apply_transpose(&root, &mut mid);
        let mut back = vec![0.0; g.n_claims()];
        op.apply(&mid, &mut back);
        for (a, b) in back.iter().zip(&root) {
            prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
        }
    }

    #[test]
    fn iteration_matches_direct_solve(recs in records(), mask in prop::collection::vec(any::<bool>(), 1..6), alpha in 0.0f64..0.95) {
        let g = graph_of(&recs);
        let q = query_for(&g, &mask);
        let it = birank(&g, &q, &tight(alpha)).unwrap();
        let direct = birank_direct(&g, &q, alpha).unwrap();
        for (a, b) in it.claim_scores.iter().zip(&direct.claim_scores) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        for (a, b) in it.party_scores.iter().zip(&direct.party_scores) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        prop_assert!(it.claim_scores.iter().chain(&it.party_scores).all(|&s| s >= 0.0));
    }

    #[test]
    fn more_prior_mass_never_lowers_scores(recs in records(), mask in prop::collection::vec(any::<bool>(), 1..6), extra in 0usize..12, alpha in 0.05f64..0.95) {
        let g = graph_of(&recs);
        let q = query_for(&g, &mask);
        let mut bumped = q.values().to_vec();
        bumped[extra % g.n_claims()] += 1.0;
        let base = birank_direct(&g, &q, alpha).unwrap();
        let more = birank_direct(&g, &QueryVector::new(bumped, true).unwrap(), alpha).unwrap();
        for (a, b) in base.claim_scores.iter().zip(&more.claim_scores) {
            prop_assert!(b + 1e-12 >= *a);
        }
    }

    #[test]
    fn auroc_is_pair_concordance(scores in prop::collection::vec(0u8..6, 2..60), y in prop::collection::vec(0u8..2, 2..60)) {
        let n = scores.len().min(y.len());
        let (s, y): (Vec<f64>, Vec<u8>) = (scores[..n].iter().map(|&v| v as f64).collect(), y[..n].to_vec());
        prop_assume!(scored(&s, &y));
        let mut twice = 0u64;
        let mut pairs = 0u64;
        for i in 0..n {
            for j in 0..n {
                if y[i] == 1 && y[j] == 0 {
                    pairs += 1;
                    twice += if s[i] > s[j] { 2 } else if s[i] == s[j] { 1 } else { 0 };
                }
            }
        }
        prop_assert_eq!(auroc(&s, &y).unwrap(), twice as f64 / (2 * pairs) as f64);
    }

    #[test]
    fn metrics_ignore_monotone_transforms(scores in prop::collection::vec(-5.0f64..5.0, 2..80), y in prop::collection::vec(0u8..2, 2..80)) {
        let n = scores.len().min(y.len());
        let (s, y) = (&scores[..n], &y[..n]);
        prop_assume!(scored(s, y));
        let t: Vec<f64> = s.iter().map(|v| (2.0 * v).exp() + 3.0).collect();
        prop_assert_eq!(auroc(s, y).unwrap(), auroc(&t, y).unwrap());
        prop_assert_eq!(aupr(s, y).unwrap(), aupr(&t, y).unwrap());
        prop_assert_eq!(tdl(s, y, 0.1).unwrap(), tdl(&t, y, 0.1).unwrap());
        let a = aupr(s, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn splits_are_stratified_partitions(y in prop::collection::vec(0u8..2, 20..200), seed in any::<u64>()) {
        let pos = y.iter().filter(|&&v| v == 1).count();
        prop_assume!(pos >= 5 && y.len() - pos >= 5);
        let (train, test) = stratified_split(&y, 0.3, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        let test_pos = test.iter().filter(|&&i| y[i] == 1).count();
        prop_assert!((test_pos as f64 - 0.3 * pos as f64).abs() <= 1.0);

        let folds = stratified_folds(&y, 5, seed).unwrap();
        let mut seen = vec![0; y.len()];
        for f in &folds {
            for &i in f {
                seen[i] += 1;
            }
            let fp = f.iter().filter(|&&i| y[i] == 1).count();
            prop_assert!(fp >= pos / 5 && fp <= pos.div_ceil(5));
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }
}

fn logistic_data(seed: u64, n: usize) -> LabeledDataset {
    use rand::Rng;
    let mut r = common::rng(seed);
    let mut values = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let a: f64 = r.random_range(-2.0..2.0);
        let b: f64 = r.random_range(-1.0..3.0);
        values.extend([a, b]);
        y.push((r.random::<f64>() < 1.0 / (1.0 + (-(0.8 * a - 0.5 * b)).exp())) as u8);
    }
    LabeledDataset::new((0..n).map(|i| format!("r{i}")).collect(), vec!["a".into(), "b".into()], values, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn logistic_predictions_survive_affine_rescaling(seed in 0u64..1000, scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
        let ds = logistic_data(seed, 300);
        let mut moved = ds.clone();
        for i in 0..ds.n_rows() {
            moved.set(i, 0, ds.get(i, 0) * scale + shift);
        }
        let p = fit_logistic(&ds, &[0, 1]).unwrap().predict_proba(&ds).unwrap();
        let q = fit_logistic(&moved, &[0, 1]).unwrap().predict_proba(&moved).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fitted_mean_equals_base_rate(seed in 0u64..1000) {
        let ds = logistic_data(seed, 250);
        let fit = fit_logistic(&ds, &[0, 1]).unwrap();
        let p = fit.predict_proba(&ds).unwrap();
        let mean_p = p.iter().sum::<f64>() / p.len() as f64;
        prop_assert!((mean_p - ds.class_ratio()).abs() < 1e-9);
    }

    #[test]
    fn smote_rows_lie_on_minority_segments(seed in any::<u64>(), m in 6usize..30, n in 100usize..400) {
        use rand::Rng;
        let mut r = common::rng(seed);
        let rows = m + n;
        let values: Vec<f64> = (0..rows * 3).map(|_| r.random_range(-10.0..10.0)).collect();
        let y: Vec<u8> = (0..rows).map(|i| (i < m) as u8).collect();
        let ds = LabeledDataset::new((0..rows).map(|i| i.to_string()).collect(), vec!["x".into(), "y".into(), "z".into()], values, y).unwrap();
        let out = smote(&ds, &SmoteConfig::default(), seed).unwrap();
        let first = out.data.n_rows() - out.synthetic.len();
        for (k, s) in out.synthetic.iter().enumerate() {
            prop_assert!(ds.y[s.base] == 1 && ds.y[s.neighbor] == 1 && s.base != s.neighbor);
            prop_assert!((0.0..=1.0).contains(&s.gap));
            for j in 0..3 {
                let expect = ds.get(s.base, j) + s.gap * (ds.get(s.neighbor, j) - ds.get(s.base, j));
                prop_assert!((out.data.get(first + k, j) - expect).abs() < 1e-12);
            }
        }
        let pos = out.data.positives() as f64;
        let total = out.data.n_rows() as f64;
        if out.report.synthetic > 0 {
            prop_assert!((pos - 0.15 * total).abs() <= 1.0);
        }
    }
}
