use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vhshift_bench::datum;
use vhshift_core::graphs::{level_graph, LevelSide};
use vhshift_core::spectral::{deviation_series, ramanujan_check, DEFAULT_EXACT_LIMIT, DEFAULT_TOL};
use vhshift_core::subshift::{build_xd, Direction};

fn level_graphs(c: &mut Criterion) {
    let d = datum(3);
    let mut g = c.benchmark_group("level_graph_q3");
    for n in [3, 5, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| level_graph(black_box(&d), LevelSide::A, n).unwrap())
        });
    }
    g.finish();
}

fn ramanujan(c: &mut Criterion) {
    let d = datum(3);
    let mut g = c.benchmark_group("ramanujan_check_q3");
    g.sample_size(10);
    for n in [3, 4, 5] {
        let graph = level_graph(&d, LevelSide::A, n).unwrap();
        g.bench_with_input(
            BenchmarkId::from_parameter(graph.n_vertices()),
            &graph,
            |b, graph| b.iter(|| ramanujan_check(black_box(graph), DEFAULT_TOL).unwrap()),
        );
    }
    g.finish();
}

fn mixing(c: &mut Criterion) {
    let x = build_xd(&datum(3)).unwrap();
    let mut g = c.benchmark_group("deviation_series_q3");
    g.sample_size(10);
    for k in [1, 2] {
        let t = x
            .transition_graph(Direction::Horizontal, k)
            .unwrap()
            .matrix();
        g.bench_with_input(BenchmarkId::from_parameter(k), &t, |b, t| {
            b.iter(|| deviation_series(black_box(t), 20, DEFAULT_EXACT_LIMIT).unwrap())
        });
    }
    g.finish();
}

fn patterns(c: &mut Criterion) {
    let x = build_xd(&datum(3)).unwrap();
    c.bench_function("pattern_count_q3_3x3", |b| {
        b.iter(|| x.pattern_count(black_box(3), 3).unwrap())
    });
}

criterion_group!(benches, level_graphs, ramanujan, mixing, patterns);
criterion_main!(benches);
