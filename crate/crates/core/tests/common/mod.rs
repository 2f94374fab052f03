#![allow(dead_code)]

use isocap::geometry::RandomGraphSpec;
use isocap::{VertexFunction, WeightedGraph};
use proptest::prelude::*;

/// Connected graph with random conductances and measures.
pub fn graph(n: usize, seed: u64) -> WeightedGraph {
    let spec = RandomGraphSpec {
        random_measures: true,
        ..RandomGraphSpec::gnp(n, 0.6)
    };
    spec.sample(seed, 0).expect("dense draws connect")
}

pub fn graph_with_boundary(n: usize, k: usize, seed: u64) -> WeightedGraph {
    let spec = RandomGraphSpec {
        random_measures: true,
        boundary_size: Some(k.min(n)),
        ..RandomGraphSpec::gnp(n, 0.6)
    };
    spec.sample(seed, 0).expect("dense draws connect")
}

/// A graph on `lo..=hi` vertices with a function on it.
pub fn graph_and_values(lo: usize, hi: usize) -> impl Strategy<Value = (WeightedGraph, Vec<f64>)> {
    (lo..=hi, any::<u64>()).prop_flat_map(|(n, seed)| {
        (Just(graph(n, seed)), prop::collection::vec(-2.0..2.0f64, n))
    })
}

pub fn vf(values: Vec<f64>) -> VertexFunction {
    VertexFunction::new(values).unwrap()
}

/// Same graph with vertex `v` renamed `perm[v]`.
pub fn relabel(g: &WeightedGraph, perm: &[usize]) -> WeightedGraph {
    let mut mu = vec![0.0; g.n()];
    for v in 0..g.n() {
        mu[perm[v]] = g.mu()[v];
    }
    WeightedGraph::new(
        g.n(),
        g.edges().iter().map(|e| (perm[e.x], perm[e.y], e.w)),
        mu,
        g.boundary().iter().zip(g.nu()).map(|(&v, &a)| (perm[v], a)),
    )
    .unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
