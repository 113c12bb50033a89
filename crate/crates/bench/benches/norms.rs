use std::hint::black_box;

use assocnorm::*;
use assocnorm_bench::{custom, linear, zigzag};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn windows(c: &mut Criterion) {
    let mut g = c.benchmark_group("window");
    let lin = linear(2.0);
    let cus = custom(2.0);
    g.bench_function("power solve", |b| b.iter(|| solve_window(lin.pair(), black_box(3.7), 1e-12)));
    g.bench_function("custom solve", |b| b.iter(|| cus.window(black_box(3.7))));
    g.bench_function("grid N=8", |b| b.iter(|| build_eta_grid(&lin, black_box(8))));
    g.finish();
}

fn norms(c: &mut Criterion) {
    let sol = linear(2.0);
    let quad = QuadratureSpec::default();
    let grid = build_eta_grid(&sol, 8).unwrap();
    let f = zigzag();
    let mut g = c.benchmark_group("norm");
    g.bench_function("sobolev", |b| b.iter(|| sobolev_norm(&f, sol.pair(), &quad)));
    g.bench_function("strong", |b| b.iter(|| strong_norm(&f, &sol, &quad)));
    g.bench_function("weak", |b| b.iter(|| weak_norm(&f, &sol, &quad)));
    g.bench_function("block", |b| b.iter(|| block_norm(&f, &grid, &quad)));
    for factor in [1.0, 100.0] {
        let q = quad.tightened(factor);
        g.bench_with_input(BenchmarkId::new("weak tightened", factor), &q, |b, q| b.iter(|| weak_norm(&f, &sol, q)));
    }
    g.finish();
}

fn constructions(c: &mut Criterion) {
    let sol = linear(2.0);
    let quad = QuadratureSpec::default();
    let one = HalfLineFunction::new("one", |_| 1.0);
    let mut g = c.benchmark_group("construction");
    g.sample_size(20);
    for n in [16usize, 256] {
        g.bench_with_input(BenchmarkId::new("oscillator weak norm", n), &n, |b, &n| {
            b.iter(|| {
                let (osc, _) = oscillator_with_blocks(&one, 1.0, 2.0, n, &sol, DensityMode::Normalized).unwrap();
                weak_norm(&osc, &sol, &quad)
            })
        });
    }
    let grid = build_eta_grid(&sol, 8).unwrap();
    let f = HalfLineFunction::hat(1.0, 1.5, 2.5, 1.0).unwrap();
    g.bench_function("J family and estimate", |b| {
        b.iter(|| {
            let family = j_family(&f, &grid, &quad).unwrap();
            estimate_j(&f, &family, &sol, &quad)
        })
    });
    g.finish();
}

criterion_group!(benches, windows, norms, constructions);
criterion_main!(benches);
