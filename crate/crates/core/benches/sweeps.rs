use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mermin_coa::experiments::{conjecture_search, relation_chain_check};
use mermin_coa::states::sample_indexed;
use mermin_coa::{optimize_mermin, Execution, OptimizationConfig, SamplingMode};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn optimizer(c: &mut Criterion) {
    let state = sample_indexed(SamplingMode::Haar, 1, 0);
    let mut group = c.benchmark_group("optimize_mermin");
    for (name, execution) in MODES {
        let config = OptimizationConfig {
            execution,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| optimize_mermin(black_box(&state), &config).unwrap())
        });
    }
    group.finish();
}

fn conjecture(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjecture_search_64");
    group.sample_size(10);
    for (name, execution) in MODES {
        let config = OptimizationConfig {
            execution,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| conjecture_search(64, SamplingMode::Haar, black_box(7), &config).unwrap())
        });
    }
    group.finish();
}

fn relation_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("relation_chain_2000");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| relation_chain_check(2000, SamplingMode::Haar, black_box(3), execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, optimizer, conjecture, relation_chain);
criterion_main!(benches);
