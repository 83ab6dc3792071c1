use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qfrac_bench::{context, convergent_spec, cubic, multi_order_spec, reduction_params};
use qfrac_core::{
    caputo_q_derivative, check_taylor_identity, closed_form_series, coefficient_residual, gml_eval,
    numeric_residual, q_factorial_power, q_gamma, riemann_q_integral_frac,
    successive_approximation, SumMode,
};

fn scalars(c: &mut Criterion) {
    let ctx = context();
    c.bench_function("q_gamma(7.3)", |b| b.iter(|| q_gamma(&ctx, black_box(7.3))));
    c.bench_function("q_factorial_power(1, 0.3, 1.7)", |b| {
        b.iter(|| q_factorial_power(&ctx, black_box(1.0), black_box(0.3), black_box(1.7)))
    });
}

fn operators(c: &mut Criterion) {
    let ctx = context();
    let f = cubic();
    c.bench_function("fractional integral, a = 0", |b| {
        b.iter(|| riemann_q_integral_frac(&ctx, &f, 0.0, black_box(0.7), 1.0))
    });
    c.bench_function("caputo derivative, alpha = 1.5", |b| {
        b.iter(|| caputo_q_derivative(&ctx, &f, 0.0, black_box(1.5), 1.0))
    });
    let a = 0.5f64.powi(12);
    let points: Vec<f64> = (1..=12).map(|j| a * 0.5f64.powi(-j)).collect();
    c.bench_function("taylor identity, 12 lattice points", |b| {
        b.iter(|| check_taylor_identity(&ctx, &f, a, black_box(2.5), &points))
    });
}

fn series(c: &mut Criterion) {
    let ctx = context();
    let p = reduction_params();
    c.bench_function("gml_eval m = 1", |b| {
        b.iter(|| gml_eval(&ctx, &p, black_box(1.0), SumMode::Adaptive))
    });
    let spec = convergent_spec();
    c.bench_function("closed_form_series k = 40", |b| {
        b.iter(|| closed_form_series(&ctx, &spec, black_box(40)))
    });
    c.bench_function("successive_approximation m = 12", |b| {
        b.iter(|| successive_approximation(&ctx, &spec, black_box(12)))
    });
    let multi = multi_order_spec();
    let s = closed_form_series(&ctx, &multi, 40).unwrap();
    c.bench_function("coefficient_residual, two components", |b| {
        b.iter(|| coefficient_residual(&ctx, black_box(&s), &multi))
    });
    let s = closed_form_series(&ctx, &spec, 120).unwrap();
    c.bench_function("numeric_residual at x = 1", |b| {
        b.iter(|| numeric_residual(&ctx, &s, &spec, black_box(1.0)))
    });
}

criterion_group!(benches, scalars, operators, series);
criterion_main!(benches);
