// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use choquet_core::builtin::{ball_set, random_function};
use choquet_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn content(c: &mut Criterion) {
    let mut group = c.benchmark_group("dyadic_content");
    for level in [-6, -8, -10] {
        let grid = Grid::unit(2, 0, level).unwrap();
        let disk = ball_set(&grid).unwrap();
        group.bench_with_input(BenchmarkId::new("disk", level), &disk, |b, s| {
            b.iter(|| dyadic_content(black_box(s), 1.0).unwrap())
        });
    }
    group.finish();
}

fn accumulator(c: &mut Criterion) {
    let grid = Grid::unit(2, 0, -8).unwrap();
    let disk = ball_set(&grid).unwrap();
    let codes: Vec<u64> = disk.cells().iter().map(|&i| grid.morton(i)).collect();
    c.bench_function("accumulator/disk-8", |b| {
        b.iter(|| {
            let mut acc = ContentAccumulator::new(&grid, 1.0).unwrap();
            for &code in &codes {
                acc.insert(code);
            }
            black_box(acc.value())
        })
    });
}

fn integral(c: &mut Criterion) {
    let grid = Grid::unit(2, 0, -7).unwrap();
    let f = random_function(&grid, 1, Some(64)).unwrap();
    c.bench_function("choquet_integral/random-7", |b| {
        b.iter(|| choquet_integral_root(black_box(&f), 1.5).unwrap())
    });
}

fn averages(c: &mut Criterion) {
    let grid = Grid::unit(2, 0, -7).unwrap();
    let f = random_function(&grid, 2, None).unwrap();
    c.bench_function("ball_average/r=1/8", |b| {
        b.iter(|| ball_average(black_box(&f), &[0.5, 0.5], 0.125, 1.0).unwrap())
    });
}

criterion_group!(benches, content, accumulator, integral, averages);
criterion_main!(benches);
