use std::hint::black_box;

use blockwatch_bench::{blocky_scene, full_frame, scene};
use blockwatch_core::gradient::{kirsch_gradient, sobel_gradient};
use blockwatch_core::seba::{BinMask, DirectionHistogram};
use blockwatch_core::{frame_blockiness, BlockinessConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn gradients(c: &mut Criterion) {
    let frame = scene(352, 288);
    c.bench_function("kirsch_cif", |b| b.iter(|| kirsch_gradient(black_box(&frame))));
    c.bench_function("sobel_cif", |b| b.iter(|| sobel_gradient(black_box(&frame))));
}

fn histograms(c: &mut Criterion) {
    let frame = scene(1920, 1080);
    let field = sobel_gradient(&frame);
    let region = full_frame(&frame);
    let mask = BinMask::axis_aligned();
    let mut group = c.benchmark_group("direction_histogram_1080p");
    group.sample_size(20);
    group.bench_function("full", |b| {
        b.iter(|| DirectionHistogram::accumulate(black_box(&field), region).unwrap())
    });
    group.bench_function("reduced", |b| {
        b.iter(|| DirectionHistogram::accumulate_reduced(black_box(&field), region, &mask).unwrap())
    });
    group.finish();
}

fn blockiness(c: &mut Criterion) {
    let frame = blocky_scene(352, 288);
    let cfg = BlockinessConfig::default();
    c.bench_function("blockiness_cif", |b| {
        b.iter(|| frame_blockiness(black_box(&frame), &cfg).unwrap())
    });
}

criterion_group!(benches, gradients, histograms, blockiness);
criterion_main!(benches);
