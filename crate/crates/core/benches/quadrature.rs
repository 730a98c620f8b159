use std::hint::black_box;

use agq_core::quantization::{quadrature_matrix, QuadratureGrid};
use agq_core::toeplitz::{bms_experiment, toeplitz_mode_quadrature};
use agq_core::{Execution, FourierFunction, FourierMode, SiegelPoint, C64};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const PATHS: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram");
    let one = SiegelPoint::scalar(C64::new(0.5, 0.7)).unwrap();
    let two = SiegelPoint::diagonal(&[C64::new(0.0, 1.0), C64::new(0.0, 2.0)]).unwrap();
    for (p, k) in [(&one, 16u32), (&two, 2)] {
        for (name, exec) in PATHS {
            let grid = QuadratureGrid::for_level(p, k, 0)
                .unwrap()
                .with_execution(exec);
            group.bench_with_input(
                BenchmarkId::new(name, format!("n{}k{k}", p.dim())),
                &grid,
                |b, grid| b.iter(|| quadrature_matrix(black_box(p), k, grid, None, true).unwrap()),
            );
        }
    }
    group.finish();
}

fn toeplitz_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("toeplitz_quadrature");
    let p = SiegelPoint::scalar(C64::new(1.0, 2.0)).unwrap();
    let m = FourierMode::scalar(2, -1);
    let k = 8;
    for (name, exec) in PATHS {
        let grid = QuadratureGrid::for_level(&p, k, 2)
            .unwrap()
            .with_execution(exec);
        group.bench_function(name, |b| {
            b.iter(|| toeplitz_mode_quadrature(black_box(&p), k, &m, &grid).unwrap())
        });
    }
    group.finish();
}

fn level_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("level_sweep");
    let p = SiegelPoint::scalar(C64::new(0.0, 1.0)).unwrap();
    let f = FourierFunction::cosine(&FourierMode::scalar(1, 0));
    let ks = [8, 16, 32, 64, 128];
    for (name, exec) in PATHS {
        group.bench_function(name, |b| {
            b.iter(|| bms_experiment(black_box(&p), &f, &ks, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gram, toeplitz_quadrature, level_sweep);
criterion_main!(benches);
