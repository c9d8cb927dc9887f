use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dlab_bench::{gaussian_data, parabola_bump, square_grid};
use dlab_core::cascade::{a2_spectrum, make_fn, Normalize, Quadrature};
use dlab_core::fuzzer::resonance_scan;
use dlab_core::lattice::{make_grid, to_physical, GridSpec};
use dlab_core::norms::{besov_norm, z_norm};
use dlab_core::picard::{iterate_a, NlsProblem};
use dlab_core::NormMethod;

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("to_physical");
    for n in [64, 256] {
        let f = parabola_bump(&square_grid(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| to_physical(black_box(f)).unwrap()));
    }
    group.finish();
}

fn norms(c: &mut Criterion) {
    let f = parabola_bump(&square_grid(64));
    c.bench_function("besov 64", |b| b.iter(|| besov_norm(black_box(&f))));
    c.bench_function("z heuristic 64", |b| b.iter(|| z_norm(black_box(&f), NormMethod::PasteHeuristic)));
    c.bench_function("z oracle 64", |b| b.iter(|| z_norm(black_box(&f), NormMethod::ConvexOracle)));
}

fn picard(c: &mut Criterion) {
    let grid = make_grid(GridSpec::new(8.0, 128, 16.0, 1024)).unwrap();
    let p = NlsProblem::new(grid.clone());
    let f = gaussian_data(&grid, 1e-3);
    let mut group = c.benchmark_group("iterate_a");
    group.sample_size(10);
    group.bench_function("n=3", |b| b.iter(|| iterate_a(&p, black_box(&f), 3).unwrap()));
    group.finish();
}

fn cascade(c: &mut Criterion) {
    let data = make_fn(1.0, 512.0, Normalize::Ball, -1.25, 0.25).unwrap();
    let out: Vec<f64> = (-4..=4).map(|k| k as f64 * 0.25).collect();
    c.bench_function("a2 exact phase N=512", |b| {
        b.iter(|| a2_spectrum(&data, black_box(1e-6), Quadrature::ExactPhase, &out).unwrap())
    });
    c.bench_function("resonance 10^5", |b| b.iter(|| resonance_scan(black_box(100_000), 1)));
}

criterion_group!(benches, transforms, norms, picard, cascade);
criterion_main!(benches);
