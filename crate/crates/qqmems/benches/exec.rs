// Sequential vs parallel execution of the embarrassingly parallel workloads:
// an ACS sweep, TGX multistart, and a certificate grid.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qqmems::acs::{acs_sweep, AcsOptions};
use qqmems::par::{map_indexed, Execution};
use qqmems::purity_mems::{verify_certificate, Theorem};
use qqmems::tgx::{maximize_tgx3, TgxOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn acs(c: &mut Criterion) {
    let mut g = c.benchmark_group("acs_sweep_32");
    g.sample_size(10);
    let purities: Vec<f64> = (0..32).map(|i| 0.21 + 0.78 * i as f64 / 31.0).collect();
    for (name, exec) in MODES {
        let opts = AcsOptions {
            exec,
            ..AcsOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| acs_sweep(black_box(&purities), 1, &mut ChaCha8Rng::seed_from_u64(1), opts).unwrap())
        });
    }
    g.finish();
}

fn tgx(c: &mut Criterion) {
    let mut g = c.benchmark_group("tgx3_multistart");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = TgxOptions {
            exec,
            ..TgxOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| maximize_tgx3(black_box(0.7), opts, &mut ChaCha8Rng::seed_from_u64(2)).unwrap())
        });
    }
    g.finish();
}

fn certificates(c: &mut Criterion) {
    let mut g = c.benchmark_group("certificate_grid_150");
    let points: Vec<(Theorem, f64)> = Theorem::ALL
        .iter()
        .flat_map(|&t| t.domain_grid(50).into_iter().map(move |p| (t, p)))
        .collect();
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                map_indexed(points.len(), exec, |i| {
                    let (t, p) = points[i];
                    verify_certificate(t, p).unwrap().verified
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, acs, tgx, certificates);
criterion_main!(benches);
