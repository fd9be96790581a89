mod common;

use std::collections::BTreeSet;

use common::{brute_force_cycles, example_network, random_graph, rng};
use fraudnet::motifs::{enumerate_4cycles, enumerate_6cycles, CycleRecord, MotifConfig};

pub fn edge_set(c: &CycleRecord) -> Vec<(u32, u32)> {
    let n = c.claims.len();
    let mut e: Vec<(u32, u32)> =
        (0..n).flat_map(|k| [(c.claims[k], c.parties[k]), (c.claims[(k + 1) % n], c.parties[k])]).collect();
    e.sort_unstable();
    e
}

#[test]
fn example_cycles_match_exhaustive_search() {
    let g = example_network();
    let cfg = MotifConfig::default();
    let four: BTreeSet<_> = enumerate_4cycles(&g, &cfg).cycles.iter().map(edge_set).collect();
    let six: BTreeSet<_> = enumerate_6cycles(&g, &cfg).cycles.iter().map(edge_set).collect();
    assert_eq!(four, brute_force_cycles(&g, 4, usize::MAX));
    assert_eq!(six, brute_force_cycles(&g, 6, usize::MAX));
    assert_eq!((four.len(), six.len()), (1, 1));
}

#[test]
fn random_graphs_match_exhaustive_search() {
    let mut r = rng(404);
    for trial in 0..40 {
        let g = random_graph(&mut r, 60, 0.08, false);
        let cap = if trial % 4 == 0 { 3 } else { usize::MAX };
        let cfg = MotifConfig { degree_cap: cap };
        for (len, got) in [(4, enumerate_4cycles(&g, &cfg)), (6, enumerate_6cycles(&g, &cfg))] {
            let listed: Vec<_> = got.cycles.iter().map(edge_set).collect();
            let unique: BTreeSet<_> = listed.iter().cloned().collect();
            assert_eq!(unique.len(), listed.len(), "trial {trial}: duplicate {len}-cycle");
            assert_eq!(unique, brute_force_cycles(&g, len, cap), "trial {trial}, length {len}");
            assert!(got.cycles.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
