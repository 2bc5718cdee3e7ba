use std::hint::black_box;

use chaoscs::dynamics::{integrate, integrate_batch, SystemKind, BATCH_LANES};
use chaoscs::l1solver::{solve_bp, BpProblem, SolverConfig};
use chaoscs::sensing::build_matrix;
use chaoscs::SequenceKind;
use chaoscs_bench::{gaussian_instance, sequence, short_config};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn rk4(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate");
    for kind in SystemKind::ALL {
        let system = kind.with_default_params();
        let config = short_config(kind, 1.0);
        group.bench_function(BenchmarkId::new("single", kind), |b| {
            b.iter(|| integrate(&system, black_box(&config), 1_000).unwrap())
        });
    }
    let kind = SystemKind::Chua;
    let configs = vec![short_config(kind, 1.0); BATCH_LANES];
    group.bench_function("batch_chua", |b| {
        b.iter(|| integrate_batch(&kind.with_default_params(), black_box(&configs), 1_000).unwrap())
    });
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_bp");
    for k in [5, 20] {
        let (phi, y) = gaussian_instance(100, 50, k, 3);
        let problem = BpProblem::new(&phi, &y).unwrap();
        let config = SolverConfig::default();
        group.bench_function(BenchmarkId::new("N100_M50", k), |b| {
            b.iter(|| solve_bp(black_box(&problem), &config).unwrap())
        });
    }
    group.finish();
}

fn matrices(c: &mut Criterion) {
    let seq = sequence(SequenceKind::IidGaussian, 50 * 100, 4);
    c.bench_function("build_matrix_50x100", |b| {
        b.iter(|| build_matrix(black_box(&seq), 50, 100).unwrap())
    });
    c.bench_function("generate_ar1_5000", |b| {
        b.iter(|| sequence(SequenceKind::ar1(), black_box(5_000), 5))
    });
}

criterion_group!(benches, rk4, solver, matrices);
criterion_main!(benches);
