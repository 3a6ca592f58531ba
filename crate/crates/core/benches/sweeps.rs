//! Sequential versus data-parallel execution of the two heaviest workloads:
//! a dominance sweep against exact tails and a figure's lambda sweep.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use swor_bounds::compare::{figure, FigureId, FigureOptions};
use swor_bounds::par::Execution;
use swor_bounds::verify::dominance_suite_with;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn dominance(c: &mut Criterion) {
    let mut group = c.benchmark_group("dominance_n25");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| dominance_suite_with(&[25], exec))
        });
    }
    group.finish();
}

fn figure_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("figure_fig2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| figure(FigureId::Fig2, &FigureOptions::default(), exec).expect("figure builds"))
        });
    }
    group.finish();
}

criterion_group!(benches, dominance, figure_sweep);
criterion_main!(benches);
