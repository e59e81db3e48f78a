use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wickrot::analysis::default_s_grid;
use wickrot::models::{harmonic_oscillator, ModelDescriptor};
use wickrot::verifier::{audit_levels, Tolerances};
use wickrot::Exec;

fn levels(c: &mut Criterion) {
    let desc = ModelDescriptor::oscillator(64);
    let grid = default_s_grid();
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("audit_levels");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| audit_levels(|n| desc.build_at(n), &[32, 48, 64, 96], &grid, &tol, exec).unwrap())
        });
    }
    g.finish();
}

fn map_range(c: &mut Criterion) {
    let m = harmonic_oscillator(128).unwrap();
    let d = m.d.matrix();
    let mut g = c.benchmark_group("map_range");
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| exec.map_range(32, |k| wickrot::linalg::op_norm(&(d * (k as f64 + 1.0).recip()))))
        });
    }
    g.finish();
}

criterion_group!(benches, levels, map_range);
criterion_main!(benches);
