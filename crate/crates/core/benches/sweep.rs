use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use restree::sweep::{sweep, sweep_sequential};
use restree::RunConfig;

fn config() -> RunConfig {
    RunConfig {
        duration: Duration::from_secs(20),
        ..RunConfig::default()
    }
}

fn seed_sweep(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..8).collect();
    let cfg = config();
    let one = |seed: u64| {
        let mut c = cfg.clone();
        c.seed = seed;
        restree::run(&c).expect("mock run").metrics.requests
    };
    let mut group = c.benchmark_group("mock_seed_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| sweep(&seeds, one)));
    group.bench_function("sequential", |b| b.iter(|| sweep_sequential(&seeds, one)));
    group.finish();
}

criterion_group!(benches, seed_sweep);
criterion_main!(benches);
