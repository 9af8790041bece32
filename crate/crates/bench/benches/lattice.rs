use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use doshap_bench::{braid, chain, confounded_braid, linear_game, star};
use doshap_core::estimators::{do_estimator, EstimatorConfig};
use doshap_core::{all_classes, do_shapley_identifiable, exact_values, ValueOracle, WeightScheme};

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_classes");
    for d in [8, 16, 32] {
        group.bench_with_input(BenchmarkId::new("chain", d), &chain(d), |b, g| b.iter(|| all_classes(g)));
    }
    for d in [8, 16, 20] {
        group.bench_with_input(BenchmarkId::new("braid", d), &braid(d), |b, g| b.iter(|| all_classes(g)));
    }
    for d in [8, 12] {
        group.bench_with_input(BenchmarkId::new("star", d), &star(d), |b, g| b.iter(|| all_classes(g)));
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_values");
    for d in [8, 12, 16] {
        let g = braid(d);
        let game = linear_game(&g);
        let inv = all_classes(&g);
        let scheme = WeightScheme::shapley(d);
        group.bench_function(BenchmarkId::new("braid", d), |b| {
            b.iter(|| exact_values(&inv, &ValueOracle::new(&g, &game), &scheme).unwrap())
        });
    }
    group.finish();
}

fn estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("do_estimator");
    let g = braid(12);
    let game = linear_game(&g);
    let r = all_classes(&g).r();
    let scheme = WeightScheme::shapley(12);
    for ratio in [0.1, 0.5, 0.9] {
        let m = ((ratio * r as f64) as usize).max(1);
        group.bench_function(BenchmarkId::new("braid12", format!("{ratio}")), |b| {
            b.iter(|| do_estimator(&ValueOracle::new(&g, &game), &scheme, EstimatorConfig::new(m, 0)).unwrap())
        });
    }
    group.finish();
}

fn identify(c: &mut Criterion) {
    let mut group = c.benchmark_group("identify");
    for d in [6, 12, 24] {
        group.bench_with_input(BenchmarkId::new("confounded_braid", d), &confounded_braid(d), |b, admg| {
            b.iter(|| do_shapley_identifiable(admg))
        });
    }
    group.finish();
}

criterion_group!(benches, enumerate, exact, estimate, identify);
criterion_main!(benches);
