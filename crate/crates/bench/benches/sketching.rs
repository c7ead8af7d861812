use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use skis::maximizer::greedy;
use skis::oracle::estimate_influence;
use skis::{
    DiffusionModel, GrowthPolicy, NodeId, RngStream, SampleKind, Sampler, Sketch, SketchKind,
};
use skis_bench::workload;

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    group.throughput(Throughput::Elements(1));
    for model in [DiffusionModel::IC, DiffusionModel::LT] {
        let (graph, gamma) = workload(10_000, model);
        for kind in [SampleKind::IIS, SampleKind::RIS] {
            let mut sampler = Sampler::new(&graph, &gamma);
            let mut rng = RngStream::new(1, 0);
            group.bench_function(
                BenchmarkId::new(format!("{model:?}"), format!("{kind:?}")),
                |b| b.iter(|| black_box(sampler.sample(kind, &mut rng).unwrap())),
            );
        }
    }
    group.finish();
}

fn building(c: &mut Criterion) {
    let (graph, gamma) = workload(10_000, DiffusionModel::IC);
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    for kind in [SketchKind::SKIS, SketchKind::RIS] {
        group.bench_function(
            BenchmarkId::new("total_entries_5n", kind.to_string()),
            |b| {
                b.iter(|| {
                    let policy = GrowthPolicy::TotalSize(5 * graph.node_count());
                    black_box(Sketch::build(&graph, &gamma, kind, policy, 3, 1).unwrap())
                })
            },
        );
    }
    group.finish();
}

fn querying(c: &mut Criterion) {
    let (graph, gamma) = workload(10_000, DiffusionModel::IC);
    let policy = GrowthPolicy::TotalSize(20 * graph.node_count());
    let sketch = Sketch::build(&graph, &gamma, SketchKind::SKIS, policy, 5, 1).unwrap();
    let seeds: Vec<NodeId> = (0..100).map(|i| i * 97).collect();
    c.bench_function("estimate/100_seeds", |b| {
        b.iter(|| black_box(estimate_influence(&sketch, black_box(&seeds)).unwrap()))
    });
    let mut group = c.benchmark_group("greedy");
    group.sample_size(10);
    for k in [10, 50] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| black_box(greedy(&sketch, k).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sampling, building, querying);
criterion_main!(benches);
