use criterion::{black_box, criterion_group, criterion_main, Criterion};
use glitch_bench::{pulse_pair, unit_net};
use glitch_core::funcspace::compact_open_distance_within;
use glitch_core::{compact_open_distance, epsilon_components, integrate, ArbiterParams, InputPair, PulseShape};

fn distances(c: &mut Criterion) {
    let (f, g) = pulse_pair();
    c.bench_function("compact_open_distance R=20", |b| {
        b.iter(|| compact_open_distance(black_box(&f), black_box(&g), 20).unwrap())
    });
    c.bench_function("compact_open_distance_within early exit", |b| {
        b.iter(|| compact_open_distance_within(black_box(&f), black_box(&g), 20, 0.01).unwrap())
    });
}

fn latch(c: &mut Criterion) {
    let shape = PulseShape::default();
    let params = ArbiterParams::default();
    let input = InputPair::new(0.5, 0.5 + 1e-6).unwrap();
    c.bench_function("integrate 40000 steps", |b| {
        b.iter(|| integrate(black_box(&input), &shape, &params).unwrap())
    });
}

fn components(c: &mut Criterion) {
    let net = unit_net(32);
    let mut group = c.benchmark_group("epsilon_components");
    group.sample_size(10);
    group.bench_function("64 signals", |b| {
        b.iter(|| epsilon_components(black_box(&net.signals), 0.16, 20).unwrap())
    });
    group.finish();
}

criterion_group!(benches, distances, latch, components);
criterion_main!(benches);
