//! Parallel vs sequential scan evaluation.
//!
//! The workload mirrors what `fig3`/`fig4` dispatch per point: response-curve
//! synthesis (closed-form engine, many points) and the master quadrature
//! (few points, heavy per-point cost). `map_ordered` uses the rayon pool
//! when the `parallel` feature is enabled (the default); `map_ordered_seq`
//! is the sequential baseline that the feature-disabled build falls back to.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lateralcp::config::RunConfig;
use lateralcp::exec;
use lateralcp::response::{ResponseEngine, ResponseMethod, ResponseQuery};

fn closed_form_workload(c: &mut Criterion) {
    let cfg = RunConfig::default();
    let engine = ResponseEngine::new(ResponseMethod::AnalyticCp, cfg.build_model().unwrap());
    let kzs: Vec<f64> = (0..4096).map(|i| 0.05 + 10.0 * i as f64 / 4096.0).collect();
    let z_a = cfg.z_a;

    let mut group = c.benchmark_group("closed_form_scan");
    group.bench_with_input(BenchmarkId::new("map_ordered", kzs.len()), &kzs, |b, kzs| {
        b.iter(|| {
            exec::map_ordered(kzs, |&kz| {
                let q = ResponseQuery::new(kz / z_a, z_a).unwrap();
                engine.g(&q).unwrap()
            })
        })
    });
    group.bench_with_input(
        BenchmarkId::new("map_ordered_seq", kzs.len()),
        &kzs,
        |b, kzs| {
            b.iter(|| {
                exec::map_ordered_seq(kzs, |&kz| {
                    let q = ResponseQuery::new(kz / z_a, z_a).unwrap();
                    engine.g(&q).unwrap()
                })
            })
        },
    );
    group.finish();
}

fn quadrature_workload(c: &mut Criterion) {
    let cfg = RunConfig::default();
    let engine = ResponseEngine::new(ResponseMethod::QuadratureExact, cfg.build_model().unwrap())
        .with_tolerances(1e-4, 0.0)
        .unwrap();
    let kzs: Vec<f64> = (0..8).map(|i| 0.5 + i as f64).collect();
    let z_a = cfg.z_a;

    let mut group = c.benchmark_group("quadrature_scan");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("map_ordered", kzs.len()), &kzs, |b, kzs| {
        b.iter(|| {
            exec::map_ordered(kzs, |&kz| {
                let q = ResponseQuery::new(kz / z_a, z_a).unwrap();
                engine.g(&q).unwrap()
            })
        })
    });
    group.bench_with_input(
        BenchmarkId::new("map_ordered_seq", kzs.len()),
        &kzs,
        |b, kzs| {
            b.iter(|| {
                exec::map_ordered_seq(kzs, |&kz| {
                    let q = ResponseQuery::new(kz / z_a, z_a).unwrap();
                    engine.g(&q).unwrap()
                })
            })
        },
    );
    group.finish();
}

criterion_group!(benches, closed_form_workload, quadrature_workload);
criterion_main!(benches);
