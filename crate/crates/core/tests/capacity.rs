mod common;

use common::{graph, rel};
use isocap::capacity::{capacity, capacity_p2_oracle, path_capacity_closed_form, truncation_invariance_check};
use isocap::{VertexSet, WeightedGraph};
use proptest::prelude::*;

/// A graph with a code per vertex: 0 free, 1 in `A`, 2 in `B`, with both sets nonempty.
fn instance() -> impl Strategy<Value = (WeightedGraph, Vec<usize>, Vec<usize>)> {
    (3usize..=9, any::<u64>()).prop_flat_map(|(n, seed)| {
        (Just(graph(n, seed)), prop::collection::vec(0u8..3, n - 2), 0..n, 0..n - 1).prop_map(
            |(g, mut codes, i, j)| {
                codes.insert(i.min(codes.len()), 1);
                codes.insert(j.min(codes.len()), 2);
                let a = (0..g.n()).filter(|&v| codes[v] == 1).collect();
                let b = (0..g.n()).filter(|&v| codes[v] == 2).collect();
                (g, a, b)
            },
        )
    })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0), 1.2..4.0f64]
}

fn cap(g: &WeightedGraph, a: &[usize], b: &[usize], p: f64) -> f64 {
    let a = VertexSet::new(g, a.iter().copied()).unwrap();
    let b = VertexSet::new(g, b.iter().copied()).unwrap();
    capacity(g, &a, &b, p, 1e-10).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric((g, a, b) in instance(), p in exponent()) {
        let ab = cap(&g, &a, &b, p);
        let ba = cap(&g, &b, &a, p);
        prop_assert!(rel(ab, ba) <= 1e-7, "{} vs {}", ab, ba);
    }

    #[test]
    fn monotone_in_either_set((g, a, b) in instance(), p in exponent()) {
        let base = cap(&g, &a, &b, p);
        let free: Vec<usize> = (0..g.n()).filter(|v| !a.contains(v) && !b.contains(v)).collect();
        prop_assume!(!free.is_empty());
        let mut bigger_a = a.clone();
        bigger_a.push(free[0]);
        let mut bigger_b = b.clone();
        bigger_b.push(free[free.len() - 1]);
        prop_assert!(cap(&g, &bigger_a, &b, p) >= base * (1.0 - 1e-7));
        prop_assert!(cap(&g, &a, &bigger_b, p) >= base * (1.0 - 1e-7));
    }

    #[test]
    fn scales_with_weights((g, a, b) in instance(), p in exponent(), s in 0.1..10.0f64) {
        let scaled = g.scale_weights(s).unwrap();
        let lhs = cap(&scaled, &a, &b, p);
        let rhs = s * cap(&g, &a, &b, p);
        prop_assert!(rel(lhs, rhs) <= 1e-7, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn linear_scaling_is_tight((g, a, b) in instance(), s in 0.1..10.0f64) {
        let sa = VertexSet::new(&g, a).unwrap();
        let sb = VertexSet::new(&g, b).unwrap();
        let lhs = capacity_p2_oracle(&g.scale_weights(s).unwrap(), &sa, &sb).unwrap().value;
        let rhs = s * capacity_p2_oracle(&g, &sa, &sb).unwrap().value;
        prop_assert!(rel(lhs, rhs) <= 1e-10);
    }

    #[test]
    fn quadratic_case_matches_linear_solve((g, a, b) in instance()) {
        let sa = VertexSet::new(&g, a.iter().copied()).unwrap();
        let sb = VertexSet::new(&g, b.iter().copied()).unwrap();
        let linear = capacity_p2_oracle(&g, &sa, &sb).unwrap().value;
        let descent = cap(&g, &a, &b, 2.0);
        prop_assert!(rel(descent, linear) <= 1e-8, "{} vs {}", descent, linear);
    }

    #[test]
    fn series_law(weights in prop::collection::vec(0.05..20.0f64, 1..12), p in exponent()) {
        let n = weights.len() + 1;
        let g = WeightedGraph::new(
            n,
            weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)),
            vec![1.0; n],
            [(0, 1.0), (n - 1, 1.0)],
        ).unwrap();
        let closed = path_capacity_closed_form(&weights, p).unwrap();
        let solved = cap(&g, &[0], &[n - 1], p);
        prop_assert!(rel(solved, closed) <= 1e-7, "{} vs {}", solved, closed);
    }

    #[test]
    fn box_constraint_is_inactive((g, a, b) in instance(), p in exponent()) {
        let sa = VertexSet::new(&g, a).unwrap();
        let sb = VertexSet::new(&g, b).unwrap();
        let r = truncation_invariance_check(&g, &sa, &sb, p).unwrap();
        prop_assert!(r.relative_gap <= 1e-6, "gap {}", r.relative_gap);
    }
}
