mod common;

use common::graph;
use isocap::geometry::{graph_from_json, graph_to_json, load_graph, mesh_disk, mesh_to_graph, save_graph, RandomGraphSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_exact(n in 2usize..=12, seed in any::<u64>(), k in 0usize..=4) {
        let spec = RandomGraphSpec {
            random_measures: true,
            boundary_size: Some(k.min(n)),
            ..RandomGraphSpec::gnp(n, 0.5)
        };
        let g = spec.sample(seed, 3).unwrap();
        let text = graph_to_json(&g);
        let back = graph_from_json(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(graph_to_json(&back), text);
    }

    #[test]
    fn sampling_is_reproducible(n in 2usize..=12, seed in any::<u64>(), index in any::<u64>()) {
        let spec = RandomGraphSpec::gnp(n, 0.4);
        prop_assert_eq!(spec.sample(seed, index).unwrap(), spec.sample(seed, index).unwrap());
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let g = graph(7, 11);
    save_graph(&g, &path).unwrap();
    assert_eq!(load_graph(&path).unwrap(), g);
}

#[test]
fn disk_masses_match_the_geometry() {
    for level in 0..4 {
        let mesh = mesh_disk(level);
        let mg = mesh_to_graph(&mesh).unwrap();
        let area: f64 = mg.graph.mu().iter().sum();
        assert!((area - mesh.total_area()).abs() <= 1e-12 * area);
        let perimeter: f64 = mg.graph.nu().iter().sum();
        let polygon = mesh.boundary_loop().len() as f64 * 2.0 * (std::f64::consts::PI / mesh.boundary_loop().len() as f64).sin();
        assert!((perimeter - polygon).abs() <= 1e-12 * polygon);
        assert_eq!(mg.clamped, 0);
    }
}
