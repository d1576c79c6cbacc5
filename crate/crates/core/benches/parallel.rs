use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::f64::consts::PI;
use std::hint::black_box;

use conekit::geom::edge_metric;
use conekit::normal_op::injectivity_scan;
use conekit::par::Exec;
use conekit::spectra::oracle_football_spectrum;
use conekit::tensor::identity_suite;
use conekit::Curvature;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn oracle_spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_spectrum");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::new(name, "1.5pi/30"), &exec, |b, &exec| {
            b.iter(|| oracle_football_spectrum(black_box(1.5 * PI), 30.0, exec).unwrap())
        });
    }
    g.finish();
}

fn injectivity(c: &mut Criterion) {
    let mut g = c.benchmark_group("injectivity_scan");
    let deltas: Vec<f64> = (0..8).map(|i| 0.25 + 0.25 * i as f64).collect();
    let xis = [0.25, 0.5, 1.0, 2.0, 4.0];
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::new(name, "n<=8"), &exec, |b, &exec| {
            b.iter(|| injectivity_scan(black_box(1.2), &deltas, 8, &xis, exec).unwrap())
        });
    }
    g.finish();
}

fn identities(c: &mut Criterion) {
    let mut g = c.benchmark_group("identity_suite");
    g.sample_size(10);
    let chart = edge_metric(Curvature::Hyperbolic, 1.5 * PI).unwrap();
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::new(name, "8 trials"), &exec, |b, &exec| {
            b.iter(|| identity_suite(black_box(&chart), 8, 1, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, oracle_spectrum, injectivity, identities);
criterion_main!(benches);
