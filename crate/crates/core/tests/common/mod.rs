#![allow(dead_code)]

use std::collections::BTreeSet;

use fraudnet::graph::{build_graph, BipartiteGraph, EdgeRecord, PartyKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE_EDGES: [(&str, &str); 10] = [
    ("C1", "P1"),
    ("C1", "P2"),
    ("C1", "P3"),
    ("C2", "P1"),
    ("C2", "P4"),
    ("C3", "P2"),
    ("C3", "P3"),
    ("C4", "P3"),
    ("C5", "P3"),
    ("C5", "P4"),
];

/// Five claims, four parties; every claim listed in order of first
/// appearance, so `C1` is claim 0.
pub fn example_network() -> BipartiteGraph {
    build_graph(EXAMPLE_EDGES.iter().map(|&(c, p)| EdgeRecord::new(c, p, PartyKind::Garage))).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bipartite graph with up to `max_nodes` nodes in total. Every
/// claim gets at least one edge; parties only exist through edges.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, density: f64, weighted: bool) -> BipartiteGraph {
    let n_c = rng.random_range(1..=max_nodes / 2);
    let n_p = rng.random_range(1..=max_nodes - n_c);
    let mut recs = Vec::new();
    for c in 0..n_c {
        let first = rng.random_range(0..n_p);
        for p in 0..n_p {
            if p == first || rng.random::<f64>() < density {
                let mut r = EdgeRecord::new(format!("c{c}"), format!("p{p}"), PartyKind::Policyholder);
                if weighted {
                    r = r.with_weight(rng.random_range(0.1..5.0));
                }
                recs.push(r);
            }
        }
    }
    build_graph(recs).unwrap()
}

/// Every simple cycle with `len` edges, as its edge set of (claim, party)
/// pairs. Found by exhaustive path search, independent of the library.
pub fn brute_force_cycles(g: &BipartiteGraph, len: usize, degree_cap: usize) -> BTreeSet<Vec<(u32, u32)>> {
    let ok = |p: u32| g.party_claims(p as usize).0.len() <= degree_cap;
    let mut found = BTreeSet::new();
    for start in 0..g.n_claims() as u32 {
        // path alternates claim, party, claim, ...
        let mut path = vec![start];
        walk(g, &ok, len, &mut path, &mut found);
    }
    found
}

fn walk(
    g: &BipartiteGraph,
    ok: &dyn Fn(u32) -> bool,
    len: usize,
    path: &mut Vec<u32>,
    found: &mut BTreeSet<Vec<(u32, u32)>>,
) {
    let depth = path.len() - 1;
    let at_claim = depth % 2 == 0;
    let last = *path.last().unwrap() as usize;
    let next: Vec<u32> = if at_claim { g.claim_parties(last).0.to_vec() } else { g.party_claims(last).0.to_vec() };
    for v in next {
        if at_claim && !ok(v) {
            continue;
        }
        if depth + 1 == len {
            if !at_claim && v == path[0] {
                let mut edges: Vec<(u32, u32)> = Vec::with_capacity(len);
                let mut closed = path.clone();
                closed.push(v);
                for w in closed.windows(2).enumerate() {
                    let (k, pair) = w;
                    edges.push(if k % 2 == 0 { (pair[0], pair[1]) } else { (pair[1], pair[0]) });
                }
                edges.sort_unstable();
                found.insert(edges);
            }
            continue;
        }
        // claims sit at even positions, parties at odd ones
        let same_kind = path.iter().enumerate().filter(|(k, _)| k % 2 == (depth + 1) % 2);
        if same_kind.map(|(_, &x)| x).any(|x| x == v) {
            continue;
        }
        path.push(v);
        walk(g, ok, len, path, found);
        path.pop();
    }
}
