//! Benchmarks for the exact verification suites and the heavier numerical
//! kernels; the order-200 Ramanujan run doubles as the wall-time budget
//! check behind the release criterion.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ramlab_core::charts::{
    connection_curvature, gauss_manin_matrix, verify_series_solution, Chart, SeriesCheck,
};
use ramlab_core::flows::density_probe;
use ramlab_core::periods::{period_matrices, standard_bases, PolarizedTorus};
use ramlab_core::series::eisenstein_series;
use ramlab_core::symplectic::{cplx, random_siegel, SiegelPoint, SymplecticElement};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("series");
    group.sample_size(10);
    group.bench_function("eisenstein_e2_order_200", |b| {
        b.iter(|| eisenstein_series(black_box(2), black_box(200)).unwrap())
    });
    group.bench_function("verify_ramanujan_order_200", |b| {
        b.iter(|| verify_series_solution(SeriesCheck::Ramanujan, black_box(200)).unwrap())
    });
    group.bench_function("verify_j_relation_order_100", |b| {
        b.iter(|| verify_series_solution(SeriesCheck::JRelation, black_box(100)).unwrap())
    });
    group.finish();
}

fn bench_charts(c: &mut Criterion) {
    let mut group = c.benchmark_group("charts");
    group.sample_size(10);
    group.bench_function("curvature_b_chart", |b| {
        let conn = gauss_manin_matrix(Chart::BChart);
        b.iter(|| connection_curvature(black_box(&conn)))
    });
    group.finish();
}

fn bench_periods(c: &mut Criterion) {
    let mut group = c.benchmark_group("periods");
    group.bench_function("standard_period_matrices_g3", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tau = random_siegel(3, &mut rng);
        let torus = PolarizedTorus::new(tau);
        let basis = standard_bases(&torus).hodge;
        b.iter(|| period_matrices(black_box(&torus), black_box(&basis)))
    });
    group.finish();
}

fn bench_density(c: &mut Criterion) {
    let mut group = c.benchmark_group("density");
    group.sample_size(10);
    group.bench_function("probe_g1_degree2_60_samples", |b| {
        let tau = SiegelPoint::scalar(cplx(0.0, 1.0));
        let delta = SymplecticElement::identity(1);
        b.iter(|| density_probe(black_box(&delta), black_box(&tau), 2, 60, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_series, bench_charts, bench_periods, bench_density);
criterion_main!(benches);
