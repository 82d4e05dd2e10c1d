use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dcglearn_core::experiments::fixtures::{CONDUCTOR_G1, TWELVE_NODE_G1};
use dcglearn_core::{all_dsep, d_connected_oracle, io, Dcg, DsepGraph, NodeSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(p: usize, rng: &mut ChaCha8Rng) -> Dcg {
    let mut g = Dcg::empty(p).unwrap();
    for j in 0..p {
        for k in 0..p {
            if j != k && rng.random_bool(0.3) {
                g.add_edge(j, k).unwrap();
            }
        }
    }
    g
}

fn queries(c: &mut Criterion) {
    let g = io::parse_graph(CONDUCTOR_G1).unwrap();
    let q = DsepGraph::new(&g);
    let cond = NodeSet::from_bits(0b00100);
    c.bench_function("reachability/five-node", |b| {
        b.iter(|| q.connected(black_box(0), black_box(3), cond))
    });
    c.bench_function("oracle/five-node", |b| {
        b.iter(|| d_connected_oracle(&g, black_box(0), black_box(3), cond).unwrap())
    });
}

fn full_sets(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_dsep");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [4, 5, 6] {
        let g = random_graph(p, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(p), &g, |b, g| {
            b.iter(|| all_dsep(g).unwrap())
        });
    }
    let g12 = io::parse_graph(TWELVE_NODE_G1).unwrap();
    group.sample_size(10);
    group.bench_function("twelve-node", |b| b.iter(|| all_dsep(&g12).unwrap()));
    group.finish();
}

criterion_group!(benches, queries, full_sets);
criterion_main!(benches);
