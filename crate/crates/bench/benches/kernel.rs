use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use logexp::{abel, comp_inverse, compose, exp_s, iterate, oracle_inverse, Coeff, Context};
use logexp_bench::{series, INVERSION_CASES};

fn arithmetic(c: &mut Criterion) {
    let ctx = Context::default();
    let a = series("x + log(x) + 1/x", &ctx);
    let b = series("x^2 - x*log(x) + 3", &ctx);
    c.bench_function("mul", |bn| bn.iter(|| black_box(&a).mul(black_box(&b), &ctx).unwrap()));
    c.bench_function("reciprocal", |bn| bn.iter(|| black_box(&a).reciprocal(&ctx).unwrap()));
    let s = series("1/x + exp(-x)", &ctx);
    c.bench_function("exp", |bn| bn.iter(|| exp_s(black_box(&s), &ctx).unwrap()));
    let f = series("x + 1/x", &ctx);
    let g = series("x^2 + log(x)", &ctx);
    c.bench_function("compose", |bn| bn.iter(|| compose(black_box(&g), black_box(&f), &ctx).unwrap()));
}

fn inversion(c: &mut Criterion) {
    let ctx = Context::default();
    let mut group = c.benchmark_group("inverse");
    group.sample_size(10);
    for text in INVERSION_CASES {
        let f = series(text, &ctx);
        group.bench_with_input(BenchmarkId::new("peeling", text), &f, |bn, f| bn.iter(|| comp_inverse(f, &ctx).unwrap()));
        group.bench_with_input(BenchmarkId::new("oracle", text), &f, |bn, f| bn.iter(|| oracle_inverse(f, &ctx).unwrap()));
    }
    group.finish();
}

fn conjugacy(c: &mut Criterion) {
    let ctx = Context::float();
    let mut group = c.benchmark_group("conjugacy");
    group.sample_size(10);
    let sq = series("x^2", &ctx);
    group.bench_function("abel x^2", |bn| bn.iter(|| abel(black_box(&sq), &ctx).unwrap()));
    let f = series("x + 1/x", &ctx);
    group.bench_function("half iterate x + 1/x", |bn| bn.iter(|| iterate(black_box(&f), &Coeff::ratio(1, 2), &ctx).unwrap()));
    group.finish();
}

criterion_group!(benches, arithmetic, inversion, conjugacy);
criterion_main!(benches);
