//! Sequential against rayon-backed replicate fan-out on a typical workload:
//! the sum of gen-BFRY node variances plus one forward pass at width 2000.
//! Build with `--no-default-features` to see the sequential-only baseline.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mogp_core::harness::{map_replicates, parallel_enabled};
use mogp_core::network::{forward, sample_network};
use mogp_core::{make_model, ActivationKind, NetworkConfig, RngStream};
use serde_json::json;

fn workload() -> NetworkConfig {
    let m = make_model("generalized_bfry", json!({"eta": 4.0, "alpha": 0.5, "tau": 5.0})).unwrap();
    NetworkConfig {
        d_in: 2,
        d_out: 1,
        widths: vec![2000],
        sigma_v: 1.0,
        sigma_b: 0.0,
        activation: ActivationKind::Relu,
        variance_models: vec![m],
    }
}

fn bench(c: &mut Criterion) {
    let cfg = workload();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).max(2);
    let family = RngStream::new(1, 0);
    let mut group = c.benchmark_group("map_replicates");
    group.sample_size(10);
    let run = |workers: usize| {
        map_replicates(64, workers, family, |_, rng| {
            let real = sample_network(&cfg, rng).unwrap();
            forward(&real, &cfg, &[1.0, -0.5]).unwrap()[1][0]
        })
    };
    group.bench_function(BenchmarkId::new("sequential", 1), |b| b.iter(|| black_box(run(1))));
    let label = if parallel_enabled() { "rayon" } else { "rayon-disabled" };
    group.bench_function(BenchmarkId::new(label, threads), |b| b.iter(|| black_box(run(threads))));
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
