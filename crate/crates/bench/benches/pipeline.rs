//! Throughput of the hot paths: one retrofit sweep, a randomized truncated
//! SVD, skip-gram training on sampled walks, ranking metrics, and the
//! shared-map gradient descent.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dynembed::embed::{embed_snapshot, EmbedMethod, SkipgramConfig};
use dynembed::embedding::EmbeddingMatrix;
use dynembed::linkpred::{auc, auprc};
use dynembed::retrofit::{retrofit_sweep, RetrofitConfig};
use dynembed::transform::{fit_homogeneous, GdConfig};
use dynembed_bench::{bench_graph, bench_snapshot};

use nalgebra::DMatrix;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian_phi(rng: &mut ChaCha8Rng, rows: usize, d: usize) -> EmbeddingMatrix {
    let m = DMatrix::from_fn(rows, d, |_, _| rng.random::<f64>() - 0.5);
    EmbeddingMatrix::from_matrix(m).unwrap()
}

fn bench_retrofit_sweep(c: &mut Criterion) {
    let snap = bench_snapshot();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = gaussian_phi(&mut rng, snap.vertex_count(), 32);
    let cfg = RetrofitConfig::default();
    c.bench_function("retrofit_sweep_150v_d32", |b| {
        b.iter(|| retrofit_sweep(black_box(&phi), &phi, &snap, &cfg).unwrap())
    });
}

fn bench_tsvd(c: &mut Criterion) {
    let snap = bench_snapshot();
    c.bench_function("tsvd_embed_150v_d32", |b| {
        b.iter(|| embed_snapshot(black_box(&snap), &EmbedMethod::Tsvd, 32, 7, false).unwrap())
    });
}

fn bench_sgns(c: &mut Criterion) {
    let snap = bench_snapshot();
    let cfg = SkipgramConfig { walks_per_node: 2, walk_length: 20, ..SkipgramConfig::default() };
    c.bench_function("randwalk_sgns_150v_d16", |b| {
        b.iter(|| {
            embed_snapshot(black_box(&snap), &EmbedMethod::RandWalk(cfg.clone()), 16, 7, false)
                .unwrap()
        })
    });
}

fn bench_metrics(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let scores: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
    let labels: Vec<bool> = (0..10_000).map(|_| rng.random::<f64>() < 0.3).collect();
    c.bench_function("auc_10k", |b| b.iter(|| auc(black_box(&scores), &labels).unwrap()));
    c.bench_function("auprc_10k", |b| b.iter(|| auprc(black_box(&scores), &labels).unwrap()));
}

fn bench_transform_gd(c: &mut Criterion) {
    let graph = bench_graph();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phis: Vec<EmbeddingMatrix> = (0..graph.snapshot_count())
        .map(|_| gaussian_phi(&mut rng, graph.vertex_count(), 32))
        .collect();
    let cfg = GdConfig { iterations: 200, ..GdConfig::default() };
    c.bench_function("shared_map_gd_200iter_d32", |b| {
        b.iter(|| fit_homogeneous(black_box(&phis), &cfg).unwrap())
    });
}

criterion_group!(
    benches,
    bench_retrofit_sweep,
    bench_tsvd,
    bench_sgns,
    bench_metrics,
    bench_transform_gd
);
criterion_main!(benches);
