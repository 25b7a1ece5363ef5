use criterion::{criterion_group, criterion_main, Criterion};
use melonet_bench::synthetic_melody;
use melonet_core::community::detect_communities;
use melonet_core::metrics::full_report;
use melonet_core::score::{parse_mel_text, write_mel};
use melonet_core::smallworld::small_world_sigma;
use melonet_core::build_network;
use std::hint::black_box;

fn bench_pipeline(c: &mut Criterion) {
    let events = synthetic_melody(2_000, 42);
    let text = write_mel(&events);
    let net = build_network(&events, "synthetic").unwrap();

    c.bench_function("parse_mel_2000_events", |b| {
        b.iter(|| parse_mel_text(black_box(&text)).unwrap())
    });
    c.bench_function("build_network_2000_events", |b| {
        b.iter(|| build_network(black_box(&events), "synthetic").unwrap())
    });
    c.bench_function("full_report", |b| {
        b.iter(|| full_report(black_box(&net), 0.8).unwrap())
    });
    c.bench_function("detect_communities", |b| {
        b.iter(|| detect_communities(black_box(&net), 1.0, 0).unwrap())
    });
    c.bench_function("small_world_sigma_ensemble_20", |b| {
        b.iter(|| small_world_sigma(black_box(&net), 20, 7).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
