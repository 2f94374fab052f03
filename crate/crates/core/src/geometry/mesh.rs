use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;

/// Triangle mesh with its boundary loop.
///
/// Planar inputs carry `z = 0`. Boundary vertices are listed loop by loop in
/// triangle orientation order; a closed surface has an empty loop.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshSpec {
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
    boundary_loop: Vec<usize>,
}

impl MeshSpec {
    /// Validates the triangulation and extracts the boundary loop.
    ///
    /// Rejects out-of-range indices, repeated corners, edges shared by more
    /// than two triangles, and pinched boundary vertices.
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return invalid("mesh has a non-finite coordinate");
        }
        // directed half-edges per undirected edge
        let mut uses: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return invalid(format!("triangle {t} references a vertex out of range"));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return invalid(format!("triangle {t} repeats a vertex"));
            }
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                uses.entry((a.min(b), a.max(b))).or_default().push((a, b));
            }
        }
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for (&(a, b), half) in &uses {
            match half.len() {
                1 => {
                    let (from, to) = half[0];
                    if next.insert(from, to).is_some() {
                        return invalid(format!("boundary is pinched at vertex {from}"));
                    }
                }
                2 => {
                    if half[0] == half[1] {
                        return invalid(format!("edge ({a}, {b}) has inconsistent orientation"));
                    }
                }
                _ => return invalid(format!("edge ({a}, {b}) is shared by more than two triangles")),
            }
        }
        let mut boundary_loop = Vec::with_capacity(next.len());
        let mut seen = vec![false; n];
        for &start in next.keys() {
            if seen[start] {
                continue;
            }
            let mut v = start;
            loop {
                seen[v] = true;
                boundary_loop.push(v);
                v = match next.get(&v) {
                    Some(&w) => w,
                    None => return invalid(format!("boundary loop breaks at vertex {v}")),
                };
                if v == start {
                    break;
                }
                if seen[v] {
                    return invalid(format!("boundary is pinched at vertex {v}"));
                }
            }
        }
        Ok(Self {
            vertices,
            triangles,
            boundary_loop,
        })
    }

    /// Planar mesh from 2D coordinates.
    pub fn planar(vertices: &[[f64; 2]], triangles: Vec<[usize; 3]>) -> Result<Self> {
        Self::new(vertices.iter().map(|&[x, y]| [x, y, 0.0]).collect(), triangles)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_loop(&self) -> &[usize] {
        &self.boundary_loop
    }

    /// Edges used by exactly one triangle.
    fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| triangle_area(&self.vertices, t))
            .sum()
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross_norm(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    dot(c, c).sqrt()
}

fn triangle_area(v: &[[f64; 3]], t: &[usize; 3]) -> f64 {
    0.5 * cross_norm(sub(v[t[1]], v[t[0]]), sub(v[t[2]], v[t[0]]))
}

/// Triangulated unit disk.
///
/// Level 0 is a fan of six triangles around the origin. Each further level
/// splits every triangle into four through its edge midpoints and pushes new
/// boundary midpoints out to the unit circle.
pub fn mesh_disk(level: u32) -> MeshSpec {
    let mut vertices = vec![[0.0, 0.0, 0.0]];
    for k in 0..6 {
        let t = PI * k as f64 / 3.0;
        vertices.push([t.cos(), t.sin(), 0.0]);
    }
    let mut triangles: Vec<[usize; 3]> = (0..6).map(|k| [0, k + 1, (k + 1) % 6 + 1]).collect();
    for _ in 0..level {
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.0];
                if count[&key] == 1 {
                    let r = m[0].hypot(m[1]);
                    m = [m[0] / r, m[1] / r, 0.0];
                }
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut refined = Vec::with_capacity(4 * triangles.len());
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = refined;
    }
    MeshSpec::new(vertices, triangles).expect("disk refinement keeps a manifold mesh")
}

/// Graph built from a mesh together with how many weights were clamped.
#[derive(Clone, Debug)]
pub struct MeshGraph {
    pub graph: WeightedGraph,
    /// Edges whose cotangent weight fell below the floor and was raised to it.
    pub clamped: usize,
}

/// Smallest conductance a mesh edge may carry.
const WEIGHT_FLOOR: f64 = 1e-12;

/// Cotangent-weight graph of a mesh.
///
/// Edge weight `(cot a + cot b) / 2` over the opposite angles, vertex volume
/// one third of the incident triangle areas, boundary area half the length
/// of the incident boundary edges. With `p = 2` the graph energy of a
/// piecewise linear function is its Dirichlet energy on the mesh; for other
/// exponents the graph is only a qualitative analog of the continuum problem.
pub fn mesh_to_graph(mesh: &MeshSpec) -> Result<MeshGraph> {
    let v = &mesh.vertices;
    let n = v.len();
    let scale = v
        .iter()
        .flat_map(|p| p.iter().map(|c| c.abs()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut mu = vec![0.0; n];
    for (index, t) in mesh.triangles.iter().enumerate() {
        let area = triangle_area(v, t);
        if !(area > 1e-14 * scale * scale) {
            return Err(Error::DegenerateTriangle { index });
        }
        for k in 0..3 {
            let (o, a, b) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (ea, eb) = (sub(v[a], v[o]), sub(v[b], v[o]));
            let cot = dot(ea, eb) / cross_norm(ea, eb);
            *weights.entry((a.min(b), a.max(b))).or_default() += 0.5 * cot;
            mu[o] += area / 3.0;
        }
    }
    let mut clamped = 0;
    let edges: Vec<(usize, usize, f64)> = weights
        .into_iter()
        .map(|((a, b), w)| {
            if w < WEIGHT_FLOOR {
                clamped += 1;
                (a, b, WEIGHT_FLOOR)
            } else {
                (a, b, w)
            }
        })
        .collect();
    let mut nu: BTreeMap<usize, f64> = BTreeMap::new();
    for (a, b) in mesh.boundary_edges() {
        let half = 0.5 * dot(sub(v[a], v[b]), sub(v[a], v[b])).sqrt();
        *nu.entry(a).or_default() += half;
        *nu.entry(b).or_default() += half;
    }
    let graph = WeightedGraph::new(n, edges, mu, nu)?;
    Ok(MeshGraph { graph, clamped })
}

/// Reads an OFF file.
pub fn read_off(path: impl AsRef<Path>) -> Result<MeshSpec> {
    parse_off(&std::fs::read_to_string(path)?)
}

/// Parses OFF text: header, counts, vertex lines, then faces given as
/// `k i0 .. ik-1`. Polygons with more than three corners are fanned.
pub fn parse_off(text: &str) -> Result<MeshSpec> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let bad = |what: &str| Error::InvalidInput(format!("OFF: {what}"));
    match tokens.next() {
        Some("OFF") => {}
        _ => return Err(bad("missing OFF header")),
    }
    let mut int = |what: &str| -> Result<usize> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(&format!("expected {what}")))
    };
    let nv = int("vertex count")?;
    let nf = int("face count")?;
    let _ne = int("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let mut c = [0.0; 3];
        for x in &mut c {
            *x = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad(&format!("bad coordinate for vertex {i}")))?;
        }
        vertices.push(c);
    }
    let mut triangles = Vec::with_capacity(nf);
    for f in 0..nf {
        let k: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(&format!("bad corner count for face {f}")))?;
        if k < 3 {
            return Err(bad(&format!("face {f} has fewer than three corners")));
        }
        let idx: Vec<usize> = (0..k)
            .map(|_| tokens.next().and_then(|t| t.parse().ok()))
            .collect::<Option<_>>()
            .ok_or_else(|| bad(&format!("bad index in face {f}")))?;
        for j in 1..k - 1 {
            triangles.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    MeshSpec::new(vertices, triangles)
}
