use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::Vector3;
use wulffcap::flows::{sweepout_check, touching_radius, Side, SweepoutOptions};
use wulffcap::integrals::{hk_report, minkowski_residual};
use wulffcap::surface::{discretize, spectra, Resolution};
use wulffcap_bench::{families, perturbed_cap};

fn dual_gauge(c: &mut Criterion) {
    let mut group = c.benchmark_group("dual_gauge");
    let x = Vector3::new(0.3, -0.7, 0.9);
    for (name, f) in families() {
        group.bench_function(BenchmarkId::new("multistart", name), |b| b.iter(|| f.dual_gauge(&x).unwrap()));
        group.bench_function(BenchmarkId::new("fast", name), |b| b.iter(|| f.dual(&x)));
    }
    group.finish();
}

fn discretization(c: &mut Criterion) {
    let mut group = c.benchmark_group("discretize");
    group.sample_size(10);
    let (_, f) = families().pop().unwrap();
    let (_, chart) = perturbed_cap(&f, -0.4);
    for n in [32, 64, 128] {
        group.bench_with_input(BenchmarkId::new("perturbed_p4", n), &n, |b, &n| {
            b.iter(|| {
                let mesh = discretize(&chart, Resolution::square(n)).unwrap();
                spectra(&f, &mesh).unwrap()
            })
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("identities");
    for (name, f) in families() {
        let (params, chart) = perturbed_cap(&f, 0.4);
        let mesh = discretize(&chart, Resolution::square(64)).unwrap();
        let spec = spectra(&f, &mesh).unwrap();
        group.bench_function(BenchmarkId::new("minkowski", name), |b| {
            b.iter(|| minkowski_residual(&f, &params, &mesh, &spec, 2, 1e-7).unwrap())
        });
        group.bench_function(BenchmarkId::new("hk", name), |b| b.iter(|| hk_report(&f, &params, &mesh, &spec, 1e-6).unwrap()));
    }
    group.finish();
}

fn touching(c: &mut Criterion) {
    let mut group = c.benchmark_group("touching");
    group.sample_size(10);
    for (name, f) in families() {
        let (params, chart) = perturbed_cap(&f, 0.0);
        let mesh = discretize(&chart, Resolution::square(64)).unwrap();
        let spec = spectra(&f, &mesh).unwrap();
        let y = Vector3::new(0.1, 0.05, 0.3);
        group.bench_function(BenchmarkId::new("exhaustive", name), |b| {
            b.iter(|| touching_radius(&f, &params, &mesh, &y, Side::Inner).unwrap())
        });
        let options = SweepoutOptions {
            samples: 200,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::new("sweepout_200", name), |b| {
            b.iter(|| sweepout_check(&f, &params, &mesh, &spec, Some(&chart), options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dual_gauge, discretization, identities, touching);
criterion_main!(benches);
