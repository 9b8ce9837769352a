use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use glassbench::embedding::{place_cube, validate_embedding, YieldOptions};
use glassbench::lattice::{build_lattice, LatticeSpec};
use glassbench::sampler::{sample_sa, SamplerConfig, SamplerKind};
use glassbench::topology::{apply_defects, build_chimera, build_pegasus, sample_defect_mask};
use glassbench_bench::{chimera, cube_instance, embedded, pegasus};

fn topology(c: &mut Criterion) {
    let mut g = c.benchmark_group("topology");
    g.bench_function("chimera_16", |b| b.iter(|| build_chimera(black_box(16), 16, 4).unwrap()));
    g.bench_function("pegasus_16", |b| b.iter(|| build_pegasus(black_box(16)).unwrap()));
    g.finish();
}

fn embedding(c: &mut Criterion) {
    let mut g = c.benchmark_group("embedding");
    g.sample_size(10);
    for (name, graph, defects) in [("chimera", chimera(), 7), ("pegasus", pegasus(), 130)] {
        let mask = sample_defect_mask(&graph, defects, 0, 1).unwrap();
        let working = apply_defects(&graph, &mask).unwrap();
        let spec = LatticeSpec::cube(6).unwrap();
        g.bench_function(BenchmarkId::new("place_cube_L6", name), |b| {
            b.iter(|| place_cube(spec, &working, &YieldOptions::default()).unwrap())
        });
        let (_, emb, _) = embedded(&graph, 6, 0);
        let logical = build_lattice(spec);
        g.bench_function(BenchmarkId::new("validate_L6", name), |b| {
            b.iter(|| validate_embedding(&emb, &graph, &logical))
        });
    }
    g.finish();
}

fn annealing(c: &mut Criterion) {
    let mut g = c.benchmark_group("annealing");
    g.sample_size(10);
    let config = |kind| SamplerConfig {
        kind,
        effort: 64,
        reads: 20,
        seed: 7,
        ..SamplerConfig::default()
    };
    let instance = cube_instance(6, 3);
    g.bench_function("logical_L6", |b| b.iter(|| sample_sa(&instance, &config(SamplerKind::SaLogical)).unwrap()));
    for (name, graph) in [("chimera", chimera()), ("pegasus", pegasus())] {
        let (_, _, problem) = embedded(&graph, 6, 3);
        g.bench_function(BenchmarkId::new("physical_L6", name), |b| {
            b.iter(|| sample_sa(&problem, &config(SamplerKind::SaPhysical)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, topology, embedding, annealing);
criterion_main!(benches);
