//! Benchmarks of the hot paths: moment evaluation, operator application,
//! basis construction, projection, and a sharpness row.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use dunkl_ball::dunkl::{multi_indices_up_to, sturm_liouville, SturmLiouvilleForm};
use dunkl_ball::harness::{sharp_ratio, RatioMode};
use dunkl_ball::moments::MomentEngine;
use dunkl_ball::multipoly::Polynomial;
use dunkl_ball::orthobasis::OrthoBasis;
use dunkl_ball::weights::WeightParams;

fn weight_3d() -> WeightParams<f64> {
    WeightParams::new(3, -0.5, vec![0.5, 0.0, 1.5]).unwrap()
}

fn dense_poly(dim: usize, degree: u32) -> Polynomial<f64> {
    Polynomial::from_terms(
        dim,
        multi_indices_up_to(dim, degree)
            .into_iter()
            .enumerate()
            .map(|(i, a)| (a, 1.0 / (i as f64 + 1.0))),
    )
}

fn bench_moments(c: &mut Criterion) {
    let engine = MomentEngine::new(weight_3d());
    let p = dense_poly(3, 8);
    let q = dense_poly(3, 8);
    c.bench_function("inner_product d=3 deg=8", |b| {
        b.iter(|| engine.inner_product(&p, &q, 1))
    });
    c.bench_function("sobolev_inner m=2 d=3 deg=6", |b| {
        let p6 = dense_poly(3, 6);
        b.iter(|| engine.sobolev_inner(&p6, &p6, 2))
    });
}

fn bench_operators(c: &mut Criterion) {
    let w = weight_3d();
    let p = dense_poly(3, 10);
    c.bench_function("sturm_liouville strong d=3 deg=10", |b| {
        b.iter(|| sturm_liouville(&p, &w, SturmLiouvilleForm::Strong))
    });
    c.bench_function("sturm_liouville product d=3 deg=10", |b| {
        b.iter(|| sturm_liouville(&p, &w, SturmLiouvilleForm::Product))
    });
}

fn bench_basis(c: &mut Criterion) {
    c.bench_function("basis build d=3 N=8", |b| {
        b.iter_batched(
            || Arc::new(MomentEngine::new(weight_3d())),
            |engine| OrthoBasis::build(engine, 8).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let basis = OrthoBasis::build(Arc::new(MomentEngine::new(weight_3d())), 10).unwrap();
    let p = dense_poly(3, 10);
    c.bench_function("full projection split d=3 N=10", |b| {
        b.iter(|| basis.component_norms_sq(&p))
    });
}

fn bench_sharpness(c: &mut Criterion) {
    let w = WeightParams::new(2, 0.5, vec![0.5, 0.0]).unwrap();
    c.bench_function("sharp_ratio exact route d=2 n=10", |b| {
        b.iter(|| sharp_ratio(&w, 10, RatioMode::FromPolynomials).unwrap())
    });
}

criterion_group!(
    benches,
    bench_moments,
    bench_operators,
    bench_basis,
    bench_sharpness
);
criterion_main!(benches);
