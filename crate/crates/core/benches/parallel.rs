use std::hint::black_box;

use bfm_core::bench::{bench_dataset, BenchConfig};
use bfm_core::{sample_random, train_bfm, EaConfig, PreparedDataset};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn objective(c: &mut Criterion) {
    let mut group = c.benchmark_group("objective");
    let cfg = BenchConfig {
        bags_per_class: 200,
        ..BenchConfig::default()
    };
    for s in [6, 10] {
        let data = bench_dataset(&cfg, s).unwrap();
        let g = sample_random(s, 0.5, 3).unwrap();
        for parallel in [false, true] {
            let prepared = PreparedDataset::new(&data).with_parallel(parallel);
            let label = if parallel { "parallel" } else { "sequential" };
            group.bench_with_input(BenchmarkId::new(label, s), &prepared, |b, p| {
                b.iter(|| p.total(black_box(&g)).unwrap())
            });
        }
    }
    group.finish();
}

fn training(c: &mut Criterion) {
    let mut group = c.benchmark_group("train_bfm");
    group.sample_size(10);
    let data = bench_dataset(&BenchConfig::default(), 8).unwrap();
    for parallel in [false, true] {
        let ea = EaConfig {
            parallel,
            max_generations: 40,
            ..EaConfig::default()
        };
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_function(label, |b| b.iter(|| train_bfm(black_box(&data), &ea).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, objective, training);
criterion_main!(benches);
