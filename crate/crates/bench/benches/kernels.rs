use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use superproj::cech::{cech_cohomology, default_window, TransitionSheaf};
use superproj::expr::parse_on;
use superproj::tangent::super_gradient_rank;
use superproj::{super_exp, super_log};

fn cech(c: &mut Criterion) {
    let mut g = c.benchmark_group("cech");
    for (m, w) in [(3, "1+(p1*p2+p1*p3+p2*p3)*w^-1"), (3, "w^-2 + 4*w^2*p1*p2"), (4, "w^-1 + w^-2*p1*p2*p3*p4")] {
        let s = TransitionSheaf::new(parse_on(w, 1, m).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::new(format!("m{m}"), w), &s, |b, s| b.iter(|| cech_cohomology(s, default_window(s)).unwrap()));
    }
    g.finish();
}

fn gradient_rank(c: &mut Criterion) {
    let mut g = c.benchmark_group("gradient_rank");
    for (n, m) in [(1, 4), (2, 3), (3, 4)] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{n}|{m}")), &(n, m), |b, &(n, m)| b.iter(|| super_gradient_rank(n, m)));
    }
    g.finish();
}

fn exp_log(c: &mut Criterion) {
    let f = parse_on("z*t1*t2 + 3*t1*t3 + z^2*t2*t3*t4*t1 - t3*t4", 1, 4).unwrap();
    let g = super_exp(&f).unwrap();
    c.bench_function("super_exp", |b| b.iter(|| super_exp(black_box(&f)).unwrap()));
    c.bench_function("super_log", |b| b.iter(|| super_log(black_box(&g)).unwrap()));
}

fn parser(c: &mut Criterion) {
    let text = "1/2*w^-3*p1*p2 - 4*w^2*(p1 + p3)*(p2 - 7/3*p4) + (w^-1 + 2)^3*p1*p2*p3*p4";
    c.bench_function("parse_on", |b| b.iter(|| parse_on(black_box(text), 1, 4).unwrap()));
}

criterion_group!(benches, cech, gradient_rank, exp_log, parser);
criterion_main!(benches);
