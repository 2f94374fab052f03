use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isocap::capacity::{capacity, capacity_p2_oracle};
use isocap::geometry::{gen_model, mesh_disk, mesh_to_graph, ModelSpec};
use isocap::isocap::{isocap_exact, IsocapOptions};
use isocap::spectral::{sobolev_constant, SobolevOptions};
use isocap::{IsocapMode, SobolevMode, VertexSet, WeightedGraph};

fn grid(side: usize) -> WeightedGraph {
    gen_model(&ModelSpec::Grid2d { rows: side, cols: side }, None).unwrap()
}

fn capacities(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity");
    for side in [5, 10, 20] {
        let g = grid(side);
        let n = g.n();
        let a = VertexSet::new(&g, 0..side).unwrap();
        let b = VertexSet::new(&g, n - side..n).unwrap();
        for p in [1.5, 2.0, 3.0] {
            group.bench_with_input(BenchmarkId::new(format!("p={p}"), n), &g, |bench, g| {
                bench.iter(|| capacity(g, &a, &b, p, 1e-8).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("linear", n), &g, |bench, g| {
            bench.iter(|| capacity_p2_oracle(g, &a, &b).unwrap())
        });
    }
    group.finish();
}

fn quotients(c: &mut Criterion) {
    let mut group = c.benchmark_group("sobolev");
    group.sample_size(10);
    let opts = SobolevOptions {
        starts: 4,
        seed: 1,
        ..SobolevOptions::default()
    };
    for side in [4, 8] {
        let g = grid(side);
        for (p, alpha) in [(2.0, 1.0), (3.0, 1.0), (1.5, 2.0)] {
            let id = BenchmarkId::new(format!("p={p},alpha={alpha}"), g.n());
            group.bench_with_input(id, &g, |bench, g| {
                bench.iter(|| sobolev_constant(g, p, alpha, SobolevMode::Steklov, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("isocap_exact");
    group.sample_size(10);
    for n in [6, 8, 10] {
        let g = gen_model(&ModelSpec::Cycle { n }, None).unwrap();
        group.bench_with_input(BenchmarkId::new("cycle", n), &g, |bench, g| {
            bench.iter(|| isocap_exact(g, 2.0, 1.0, IsocapMode::Steklov, &IsocapOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn meshes(c: &mut Criterion) {
    let mut group = c.benchmark_group("mesh");
    for level in [2, 4] {
        let mesh = mesh_disk(level);
        group.bench_with_input(BenchmarkId::new("disk", level), &mesh, |bench, mesh| {
            bench.iter(|| mesh_to_graph(mesh).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, capacities, quotients, enumeration, meshes);
criterion_main!(benches);
