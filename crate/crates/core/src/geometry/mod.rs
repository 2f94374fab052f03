//! Model geometries, triangle meshes and graph files.

mod generators;
mod io;
mod mesh;

pub use generators::{gen_model, ModelSpec, RandomGraphSpec};
pub use io::{graph_from_json, graph_to_json, load_graph, save_graph};
pub use mesh::{mesh_disk, mesh_to_graph, parse_off, read_off, MeshGraph, MeshSpec};
