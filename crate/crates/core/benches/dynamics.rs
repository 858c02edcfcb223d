//! Sequential against rayon-backed construction on one mid-sized game.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gamedyn_core::dynamics::{build_dynamics, DynamicsKind};
use gamedyn_core::gen::{self, GameShape};
use gamedyn_core::relations::transitive_closure;
use gamedyn_core::strategy::ProfileSpace;
use gamedyn_core::{Game, Limits};

fn bench_game() -> Game {
    let shape = GameShape {
        max_players: 5,
        max_vertices: 8,
        max_terminals: 2,
        max_out_degree: 3,
        acyclic: false,
    };
    // the largest profile space among a few seeds, so the run is not trivial
    (0..40)
        .map(|s| gen::random_game(&mut gen::rng(s), &shape))
        .max_by_key(|g| ProfileSpace::new(g).count())
        .unwrap()
}

fn modes() -> [(&'static str, Limits); 2] {
    [("sequential", Limits::sequential()), ("parallel", Limits::default())]
}

fn construction(c: &mut Criterion) {
    let g = bench_game();
    let mut group = c.benchmark_group("build_dynamics");
    group.sample_size(10);
    for kind in [DynamicsKind::PC, DynamicsKind::BPC] {
        for (mode, limits) in modes() {
            group.bench_with_input(BenchmarkId::new(mode, kind), &kind, |b, &kind| {
                b.iter(|| build_dynamics(black_box(&g), kind, &limits).unwrap())
            });
        }
    }
    group.finish();
}

fn closure(c: &mut Criterion) {
    let g = bench_game();
    let dg = build_dynamics(&g, DynamicsKind::P1, &Limits::default()).unwrap();
    let mut group = c.benchmark_group("transitive_closure");
    group.sample_size(10);
    for (mode, limits) in modes() {
        group.bench_function(mode, |b| {
            b.iter(|| transitive_closure(black_box(dg.graph()), limits.parallel))
        });
    }
    group.finish();
}

criterion_group!(benches, construction, closure);
criterion_main!(benches);
