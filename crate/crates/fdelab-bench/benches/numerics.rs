//! Hot-path benchmarks: the nested H quadrature, one implicit FDE solve,
//! and the semilinear Newton solve.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use fdelab_core::elliptic::{solve_semilinear, BarrierSpec};
use fdelab_core::geometry::{eval_h, Profile, RadialField, RadialGrid};
use fdelab_core::newton::NewtonCtl;
use fdelab_core::parabolic::{solve_fde, FdeConfig};
use fdelab_core::quad::QuadCtl;

fn bench_eval_h(c: &mut Criterion) {
    let ctl = QuadCtl::default();
    let flat = Profile::euclidean(3).unwrap();
    let steep = Profile::power_exponential(3.0, 3).unwrap();
    let mut group = c.benchmark_group("eval_h");
    group.bench_function("euclidean_r2", |b| {
        b.iter(|| eval_h(black_box(&flat), black_box(2.0), &ctl).unwrap())
    });
    group.bench_function("power_exponential_r20", |b| {
        b.iter(|| eval_h(black_box(&steep), black_box(20.0), &ctl).unwrap())
    });
    group.finish();
}

fn bench_fde_solve(c: &mut Criterion) {
    let p = Profile::euclidean(3).unwrap();
    let grid = RadialGrid::uniform(1.0, 128).unwrap();
    let cfg = FdeConfig::new(0.5, 0.01, 0.2).unwrap();
    let u0 = RadialField::from_fn(&grid, |r| 0.5 + (1.0 - r * r).max(0.0));
    c.bench_function("fde_solve_128cells_20steps", |b| {
        b.iter(|| solve_fde(black_box(&p), &cfg, &grid, &u0, 0.5).unwrap())
    });
}

fn bench_semilinear(c: &mut Criterion) {
    let p = Profile::hyperbolic(1.0, 3).unwrap();
    let grid = RadialGrid::uniform(0.9, 256).unwrap();
    let spec = BarrierSpec::new(2.0, 1.0, 1.0).unwrap();
    let ctl = NewtonCtl::default();
    c.bench_function("semilinear_dirichlet_256cells", |b| {
        b.iter_batched(
            || (),
            |_| solve_semilinear(black_box(&p), &spec, &grid, 5.0, &ctl).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_eval_h, bench_fde_solve, bench_semilinear);
criterion_main!(benches);
