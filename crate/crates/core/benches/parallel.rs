//! One-thread pool against the default rayon pool on the data-parallel hot
//! paths. Results are bit-identical either way; only wall time differs.
//! For the fully sequential build run the unit tests with
//! `--no-default-features`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use serde_json::json;
use smoothlab::grid::{random_function, Dim, NormSpec};
use smoothlab::lab;
use smoothlab::ops::{modulus, ModulusGrid};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let default = rayon::ThreadPoolBuilder::new().build().expect("pool");
    let n = default.current_num_threads();
    vec![("1 thread".into(), single), (format!("{n} threads"), default)]
}

fn modulus_sup(c: &mut Criterion) {
    let mut group = c.benchmark_group("modulus sup");
    group.sample_size(10);
    let l2 = NormSpec::lp(2.0).unwrap();
    let l3 = NormSpec::lp(3.0).unwrap();
    let f1 = random_function(1024, Dim::One, 0, 0).unwrap();
    let f2 = random_function(128, Dim::Two, 0, 0).unwrap();
    let grid2 = ModulusGrid { directions: 16, radii: 32 };
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("L3, d=1, N=1024", &name), |b| {
            b.iter(|| pool.install(|| modulus(black_box(&f1), 2, 0.3, &l3, ModulusGrid::default()).unwrap()))
        });
        group.bench_function(BenchmarkId::new("L2, d=2, N=128", &name), |b| {
            b.iter(|| pool.install(|| modulus(black_box(&f2), 2, 0.3, &l2, grid2).unwrap()))
        });
    }
    group.finish();
}

fn registry_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("registry");
    group.sample_size(10);
    let runs = [
        ("jackson-1.4", json!({ "B": {"norm": "lp", "p": 4} })),
        ("cesaro-5.1", json!({ "trials": 40 })),
    ];
    for (name, pool) in pools() {
        for (id, params) in &runs {
            group.bench_function(BenchmarkId::new(*id, &name), |b| {
                b.iter(|| pool.install(|| lab::run_check(id, black_box(params)).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, modulus_sup, registry_checks);
criterion_main!(benches);
