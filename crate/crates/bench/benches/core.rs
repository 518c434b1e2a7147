use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use omega_bench::{dense_lp, min_chain_support, modular_family};
use omega_core::convexity::{convex_hull, extreme_hull, omega_interior};
use omega_core::lp::Solver;
use omega_core::support::{support_extend, SupportOptions};
use omega_core::Subset;

fn hulls(c: &mut Criterion) {
    let mut group = c.benchmark_group("hulls");
    for m in [7u64, 31, 101] {
        let family = modular_family(m);
        let seed = Subset::from_elements(m as usize, [0, 1]);
        group.bench_with_input(BenchmarkId::new("convex", m), &m, |b, _| b.iter(|| convex_hull(&family, black_box(&seed))));
        group.bench_with_input(BenchmarkId::new("extreme", m), &m, |b, _| b.iter(|| extreme_hull(&family, black_box(&seed))));
        group.bench_with_input(BenchmarkId::new("interior", m), &m, |b, _| b.iter(|| omega_interior(black_box(&family))));
    }
    group.finish();
}

fn simplex(c: &mut Criterion) {
    let mut group = c.benchmark_group("simplex");
    for n in [5usize, 10, 20] {
        let lp = dense_lp(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &lp, |b, lp| b.iter(|| Solver::default().optimize(black_box(lp))));
    }
    group.finish();
}

fn support(c: &mut Criterion) {
    let mut group = c.benchmark_group("support_extend");
    group.sample_size(20);
    for size in [4usize, 8, 12] {
        let inst = min_chain_support(size);
        group.bench_with_input(BenchmarkId::new("min_chain", size), &inst, |b, inst| {
            b.iter(|| support_extend(black_box(inst), &SupportOptions::default()))
        });
    }
    group.finish();
}

criterion_group!(benches, hulls, simplex, support);
criterion_main!(benches);
