//! Each kernel on a single-worker pool versus the default pool.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use calabi_core::calabi::*;
use calabi_core::par::Pool;
use calabi_core::radial::*;
use calabi_core::*;

fn pools() -> [(&'static str, Pool); 2] {
    [("1-thread", Pool::new(1)), ("default", Pool::new(0))]
}

fn soliton(n: usize) -> GraphSurface {
    let p = bowl_profile(&WeightFunction::linear(1.0).unwrap(), 0.0, 3.0, 1e-3).unwrap();
    let g = Grid2D::spanning(-1.0, 1.0, n, -1.0, 1.0, n).unwrap();
    profile_to_graph(RadialCurve::Profile(&p), &g).unwrap()
}

fn derivatives(c: &mut Criterion) {
    let mut group = c.benchmark_group("gradient_and_hessian");
    for n in [201, 801] {
        let g = Grid2D::spanning(-1.0, 1.0, n, -1.0, 1.0, n).unwrap();
        let u = g.sample(|x, y| (x * x + 0.5 * y * y).sin());
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &u, |b, u| {
                b.iter(|| pool.install(|| gradient_and_hessian(&g, black_box(u))))
            });
        }
    }
    group.finish();
}

fn residual(c: &mut Criterion) {
    let mut group = c.benchmark_group("pde_residual");
    let w = WeightFunction::linear(1.0).unwrap();
    let s = soliton(401);
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| pde_residual(black_box(&s), &w))));
    }
    group.finish();
}

fn transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_transform");
    let w = WeightFunction::linear(1.0).unwrap();
    let s = soliton(401);
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| forward_transform(black_box(&s), &w).unwrap())));
    }
    group.finish();
}

fn resample(c: &mut Criterion) {
    let mut group = c.benchmark_group("resample_onto");
    group.sample_size(20);
    let w = WeightFunction::linear(1.0).unwrap();
    let pair = forward_transform(&soliton(161), &w).unwrap();
    let target = image_box(&pair, &ResampleOptions::default()).unwrap();
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| resample_onto(black_box(&pair), &target).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, derivatives, residual, transform, resample);
criterion_main!(benches);
