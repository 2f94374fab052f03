use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_path_to_error::Segment;

use crate::error::{Error, Result};
use crate::fmt::to_json_string;
use crate::graph::WeightedGraph;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    mu: Vec<f64>,
    boundary: Vec<usize>,
    nu: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct GraphFileOut<'a> {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    mu: &'a [f64],
    boundary: &'a [usize],
    nu: NuMap<'a>,
}

/// Boundary areas keyed by vertex, written in vertex order.
struct NuMap<'a>(&'a [usize], &'a [f64]);

impl Serialize for NuMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (v, nu) in self.0.iter().zip(self.1) {
            map.serialize_entry(&v.to_string(), nu)?;
        }
        map.end()
    }
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses a graph from its JSON form and validates it.
///
/// Errors carry a JSON pointer to the offending field, e.g. `/edges/3/2`
/// for a bad weight on the fourth edge.
pub fn graph_from_json(text: &str) -> Result<WeightedGraph> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: GraphFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        let inner = e.into_inner();
        schema(pointer, inner.to_string())
    })?;

    if file.mu.len() != file.n {
        return Err(schema("/mu", format!("expected {} entries, found {}", file.n, file.mu.len())));
    }
    for (k, &(x, y, w)) in file.edges.iter().enumerate() {
        if x >= file.n {
            return Err(schema(format!("/edges/{k}/0"), format!("vertex {x} out of range")));
        }
        if y >= file.n {
            return Err(schema(format!("/edges/{k}/1"), format!("vertex {y} out of range")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(schema(format!("/edges/{k}/2"), format!("weight {w} is not positive")));
        }
    }
    for (v, &m) in file.mu.iter().enumerate() {
        if !(m.is_finite() && m > 0.0) {
            return Err(schema(format!("/mu/{v}"), format!("volume {m} is not positive")));
        }
    }
    let mut nu_of = HashMap::with_capacity(file.nu.len());
    for (key, &value) in &file.nu {
        let v: usize = key
            .parse()
            .map_err(|_| schema(format!("/nu/{key}"), "key is not a vertex index"))?;
        if !file.boundary.contains(&v) {
            return Err(schema(format!("/nu/{key}"), format!("vertex {v} is not on the boundary")));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(schema(format!("/nu/{key}"), format!("area {value} is not positive")));
        }
        nu_of.insert(v, value);
    }
    let mut nu = Vec::with_capacity(file.boundary.len());
    for (k, &v) in file.boundary.iter().enumerate() {
        if v >= file.n {
            return Err(schema(format!("/boundary/{k}"), format!("vertex {v} out of range")));
        }
        let value = nu_of
            .get(&v)
            .ok_or_else(|| schema("/nu", format!("missing entry for boundary vertex {v}")))?;
        nu.push((v, *value));
    }
    WeightedGraph::new(file.n, file.edges, file.mu, nu)
}

/// JSON form of a graph, floats at 17 significant digits.
pub fn graph_to_json(g: &WeightedGraph) -> String {
    let out = GraphFileOut {
        n: g.n(),
        edges: g.edges().iter().map(|e| (e.x, e.y, e.w)).collect(),
        mu: g.mu(),
        boundary: g.boundary(),
        nu: NuMap(g.boundary(), g.nu()),
    };
    to_json_string(&out).expect("graph file serializes")
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    graph_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut text = graph_to_json(g);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_model, RandomGraphSpec};

    fn pointer(text: &str) -> String {
        match graph_from_json(text) {
            Err(Error::Schema { pointer, .. }) => pointer,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let spec = RandomGraphSpec {
            random_measures: true,
            ..RandomGraphSpec::gnp(9, 0.5)
        };
        let g = spec.sample(3, 0).unwrap();
        assert_eq!(graph_from_json(&graph_to_json(&g)).unwrap(), g);
        let g = gen_model(&"grid2d:3x4".parse().unwrap(), None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        save_graph(&g, &path).unwrap();
        assert_eq!(load_graph(&path).unwrap(), g);
    }

    #[test]
    fn schema_errors() {
        let ok = r#"{"n":2,"edges":[[0,1,1.0]],"mu":[1,1],"boundary":[0,1],"nu":{"0":1,"1":1}}"#;
        assert!(graph_from_json(ok).is_ok());
        let neg = r#"{"n":3,"edges":[[0,1,1.0],[1,2,-2]],"mu":[1,1,1],"boundary":[0],"nu":{"0":1}}"#;
        assert_eq!(pointer(neg), "/edges/1/2");
        let missing = r#"{"n":2,"edges":[[0,1,1.0]],"mu":[1,1],"boundary":[0,1],"nu":{"0":1}}"#;
        assert_eq!(pointer(missing), "/nu");
        let extra = r#"{"n":2,"edges":[[0,1,1.0]],"mu":[1,1],"boundary":[],"nu":{},"color":3}"#;
        assert!(matches!(graph_from_json(extra), Err(Error::Schema { .. })));
        let typed = r#"{"n":2,"edges":[[0,1,"x"]],"mu":[1,1],"boundary":[],"nu":{}}"#;
        assert_eq!(pointer(typed), "/edges/0/2");
        let short = r#"{"n":2,"edges":[[0,1,1]],"mu":[1],"boundary":[],"nu":{}}"#;
        assert_eq!(pointer(short), "/mu");
    }
}
