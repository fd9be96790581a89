use criterion::{criterion_group, criterion_main, Criterion};
use fraudnet::birank::{birank, build_query_vector, BiRankConfig, QueryMode};
use fraudnet::motifs::{enumerate_4cycles, MotifConfig};
use fraudnet::synth::{generate, SynthConfig};
use fraudnet::{build_graph, featurize_claims, BipartiteGraph, ClaimLabels, NodeId};
use std::hint::black_box;

fn network() -> (BipartiteGraph, ClaimLabels) {
    let out = generate(&SynthConfig { n_claims: 20_000, n_rings: 30, ..SynthConfig::with_seed(7) }).unwrap();
    let g = build_graph(out.edges).unwrap();
    let labels = ClaimLabels::from_records(&g, &out.labels).unwrap();
    (g, labels)
}

fn kernels(c: &mut Criterion) {
    let (g, labels) = network();
    let q = build_query_vector(&labels, None, QueryMode::BinaryHistoricFraud).unwrap().query;
    let cfg = BiRankConfig::default();
    let mut group = c.benchmark_group("synthetic_20k");
    group.sample_size(10);

    group.bench_function("birank", |b| b.iter(|| birank(black_box(&g), &q, &cfg).unwrap()));

    let scores = birank(&g, &q, &cfg).unwrap();
    let targets: Vec<NodeId> = (0..2000u32).map(NodeId::claim).collect();
    group.bench_function("featurize_2000", |b| {
        b.iter(|| featurize_claims(black_box(&g), &scores, &labels, &targets).unwrap())
    });

    let motif_cfg = MotifConfig::default();
    group.bench_function("four_cycles", |b| b.iter(|| enumerate_4cycles(black_box(&g), &motif_cfg)));
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
