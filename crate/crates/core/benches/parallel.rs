//! Residual sweep and collapse report: rayon path against a plain sequential loop.
//! Build with `--no-default-features` to route the library path through the
//! sequential fallback as well.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kee_core::geometry::{chart_grid, einstein_residual, metric_at, ricci_fd, ChartPoint};
use kee_core::limits::collapse_report;
use kee_core::{make_profile, EinsteinProfile, GaugeChoice, QuadratureConfig, SurfaceIndex, TauSMap};

fn sequential_residual(p: &EinsteinProfile, m: &TauSMap, grid: &[ChartPoint], step: f64) -> f64 {
    grid.iter()
        .map(|pt| {
            let ric = ricci_fd(p, m, pt, step).unwrap();
            let g = metric_at(p, m, pt).unwrap();
            ric.sub(&g.scale(p.lambda())).max_abs()
        })
        .fold(0.0, f64::max)
}

fn residual(c: &mut Criterion) {
    let n = SurfaceIndex::new(2).unwrap();
    let p = make_profile(n, 0.5).unwrap();
    let m = TauSMap::build(&p, GaugeChoice::midpoint(), QuadratureConfig::default()).unwrap();
    let mut group = c.benchmark_group("einstein_residual");
    for radial in [3usize, 6] {
        let grid = chart_grid(2, radial, 5, &[-1.0, 0.0, 1.0, 2.0, 3.0]).unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", grid.len()), &grid, |b, g| {
            b.iter(|| sequential_residual(&p, &m, black_box(g), 1e-3))
        });
        let label = if kee_core::parallel::is_parallel() { "rayon" } else { "fallback" };
        group.bench_with_input(BenchmarkId::new(label, grid.len()), &grid, |b, g| {
            b.iter(|| einstein_residual(&p, &m, black_box(g), 1e-3).unwrap())
        });
    }
    group.finish();
}

fn collapse(c: &mut Criterion) {
    let n = SurfaceIndex::new(1).unwrap();
    let q = QuadratureConfig::default();
    let betas = [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125];
    let mut group = c.benchmark_group("collapse_report");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            for &beta in &betas {
                black_box(collapse_report(n, &[beta], &q).unwrap());
            }
        })
    });
    let label = if kee_core::parallel::is_parallel() { "rayon" } else { "fallback" };
    group.bench_function(label, |b| b.iter(|| collapse_report(n, black_box(&betas), &q).unwrap()));
    group.finish();
}

criterion_group!(benches, residual, collapse);
criterion_main!(benches);
