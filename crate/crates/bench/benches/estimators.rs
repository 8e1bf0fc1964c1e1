use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use warpmean::estimators::default_ordinates;
use warpmean::simulate::{test_function_f, test_function_g};
use warpmean::{
    inverse_se, kernel_smooth, make_bundle, monotonize_bundle, simulate_warps, warp_estimate,
    CurveBundle, WarpSimConfig,
};

fn bundle(m: usize, n: usize, fun: fn(f64) -> f64, noise: f64) -> CurveBundle {
    let warps = simulate_warps(&WarpSimConfig {
        m,
        iterations: 300,
        n,
        ..Default::default()
    })
    .unwrap();
    make_bundle(fun, &warps, n, noise, 1).unwrap()
}

fn bench_inverse_se(c: &mut Criterion) {
    let mut group = c.benchmark_group("inverse_se");
    for &m in &[10, 30, 100] {
        let b = bundle(m, 100, test_function_f, 0.0);
        let ys = default_ordinates(&b);
        group.bench_with_input(BenchmarkId::from_parameter(m), &b, |bench, b| {
            bench.iter(|| inverse_se(black_box(b), &ys).unwrap())
        });
    }
    group.finish();
}

fn bench_warp_estimate(c: &mut Criterion) {
    let b = bundle(30, 100, test_function_f, 0.0);
    let ts = b.common_grid().unwrap().points().to_vec();
    c.bench_function("warp_estimate/m30_n100", |bench| {
        bench.iter(|| warp_estimate(black_box(&b), 0, &ts).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_warps");
    group.sample_size(20);
    for &iterations in &[300, 3000] {
        let config = WarpSimConfig {
            m: 30,
            iterations,
            ..Default::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(iterations),
            &config,
            |bench, cfg| bench.iter(|| simulate_warps(black_box(cfg)).unwrap()),
        );
    }
    group.finish();
}

fn bench_smoothing(c: &mut Criterion) {
    let b = bundle(30, 100, test_function_g, 0.05);
    let curve = &b.curves()[0];
    c.bench_function("kernel_smooth/n100", |bench| {
        bench.iter(|| kernel_smooth(black_box(curve), (0.0, 1.0), 0.03).unwrap())
    });
    c.bench_function("monotonize_bundle/m30_n100", |bench| {
        bench.iter(|| monotonize_bundle(black_box(&b)))
    });
}

criterion_group!(
    benches,
    bench_inverse_se,
    bench_warp_estimate,
    bench_simulate,
    bench_smoothing
);
criterion_main!(benches);
