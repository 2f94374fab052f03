//! Weighted graphs with a volume measure on vertices and an area measure on
//! a boundary subset, plus the edge-sum p-Dirichlet energy.
//!
//! The energy counts every undirected edge once:
//!
//! ```text
//! E_p(u) = sum over edges (x, y, w) of  w * |u(x) - u(y)|^p
//! ```
//!
//! There is no factor 1/2 and no double sum over ordered pairs. Capacities,
//! Sobolev constants and eigenvalues elsewhere in the crate all inherit this
//! normalization.

use std::collections::VecDeque;
use std::ops::Index;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// An undirected edge with positive conductance. Always stored with `x < y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub w: f64,
}

/// Which vertex measure a quotient or set size refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    /// `nu`, carried by boundary vertices only.
    Boundary,
    /// `mu`, carried by every vertex.
    Volume,
}

/// Connected weighted graph with vertex volumes and a weighted boundary.
///
/// Immutable once built; every constructor validates the invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    mu: Vec<f64>,
    boundary: Vec<usize>,
    nu: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds and validates a graph.
    ///
    /// `edges` may list endpoints in either order. `boundary` pairs each
    /// boundary vertex with its area weight.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        mu: Vec<f64>,
        boundary: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if mu.len() != n {
            return Err(Error::InvalidGraph(format!(
                "mu has {} entries, expected {n}",
                mu.len()
            )));
        }
        if let Some((v, m)) = mu.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidGraph(format!("mu[{v}] = {m} is not positive")));
        }

        let mut list = Vec::new();
        for (x, y, w) in edges {
            if x >= n || y >= n {
                return Err(Error::InvalidGraph(format!("edge ({x}, {y}) out of range")));
            }
            if x == y {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {x}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({x}, {y}) has non-positive weight {w}"
                )));
            }
            let (x, y) = if x < y { (x, y) } else { (y, x) };
            list.push(Edge { x, y, w });
        }
        let mut sorted: Vec<(usize, usize)> = list.iter().map(|e| (e.x, e.y)).collect();
        sorted.sort_unstable();
        if let Some(pair) = sorted.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                pair[0].0, pair[0].1
            )));
        }

        let mut bnd: Vec<(usize, f64)> = boundary.into_iter().collect();
        bnd.sort_by_key(|&(v, _)| v);
        for (i, &(v, a)) in bnd.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidGraph(format!("boundary vertex {v} out of range")));
            }
            if i > 0 && bnd[i - 1].0 == v {
                return Err(Error::InvalidGraph(format!("boundary vertex {v} listed twice")));
            }
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidGraph(format!("nu[{v}] = {a} is not positive")));
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        for e in &list {
            adjacency[e.x].push((e.y, e.w));
            adjacency[e.y].push((e.x, e.w));
        }
        let graph = Self {
            n,
            edges: list,
            mu,
            boundary: bnd.iter().map(|b| b.0).collect(),
            nu: bnd.iter().map(|b| b.1).collect(),
            adjacency,
        };
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// Unit conductances, unit volumes and unit boundary areas.
    pub fn unit(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        boundary: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        Self::new(
            n,
            edges.into_iter().map(|(x, y)| (x, y, 1.0)),
            vec![1.0; n],
            boundary.into_iter().map(|v| (v, 1.0)),
        )
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.n
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Sorted boundary vertices.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Boundary areas, aligned with [`Self::boundary`].
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }

    pub fn boundary_area(&self, v: usize) -> Option<f64> {
        self.boundary.binary_search(&v).ok().map(|i| self.nu[i])
    }

    /// Vertices not on the boundary, ascending.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_boundary(v)).collect()
    }

    /// Per-vertex weights of `measure`; zero off its support.
    pub fn measure_weights(&self, measure: Measure) -> Vec<f64> {
        match measure {
            Measure::Volume => self.mu.clone(),
            Measure::Boundary => {
                let mut out = vec![0.0; self.n];
                for (&v, &a) in self.boundary.iter().zip(&self.nu) {
                    out[v] = a;
                }
                out
            }
        }
    }

    /// Vertices carrying positive mass under `measure`.
    pub fn support(&self, measure: Measure) -> Vec<usize> {
        match measure {
            Measure::Volume => (0..self.n).collect(),
            Measure::Boundary => self.boundary.clone(),
        }
    }

    /// Same graph with every conductance multiplied by `s`.
    pub fn scale_weights(&self, s: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.edges.iter().map(|e| (e.x, e.y, e.w * s)),
            self.mu.clone(),
            self.boundary.iter().copied().zip(self.nu.iter().copied()),
        )
    }

    /// Same graph with `measure` multiplied by `s`.
    pub fn scale_measure(&self, measure: Measure, s: f64) -> Result<Self> {
        let (mu, nu) = match measure {
            Measure::Volume => (self.mu.iter().map(|m| m * s).collect(), self.nu.clone()),
            Measure::Boundary => (self.mu.clone(), self.nu.iter().map(|a| a * s).collect()),
        };
        Self::new(
            self.n,
            self.edges.iter().map(|e| (e.x, e.y, e.w)),
            mu,
            self.boundary.iter().copied().zip(nu),
        )
    }

    /// Same edges and volumes with a new boundary.
    pub fn with_boundary(&self, boundary: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        Self::new(
            self.n,
            self.edges.iter().map(|e| (e.x, e.y, e.w)),
            self.mu.clone(),
            boundary,
        )
    }
}

/// One finite real value per vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VertexFunction(Vec<f64>);

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("vertex function has non-finite value at {i}"));
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub(crate) fn check_on(&self, g: &WeightedGraph) -> Result<()> {
        if self.0.len() != g.n() {
            return invalid(format!(
                "vertex function has {} values, graph has {} vertices",
                self.0.len(),
                g.n()
            ));
        }
        Ok(())
    }
}

impl Index<usize> for VertexFunction {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.0[v]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    BoundarySubset,
    Any,
}

/// Sorted, duplicate-free set of vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<usize>,
    kind: SetKind,
}

/// Serialized as its member list.
impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

impl VertexSet {
    pub fn new(g: &WeightedGraph, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&v) = members.iter().find(|&&v| v >= g.n()) {
            return invalid(format!("vertex {v} out of range"));
        }
        let kind = if !members.is_empty() && members.iter().all(|&v| g.is_boundary(v)) {
            SetKind::BoundarySubset
        } else {
            SetKind::Any
        };
        Ok(Self { members, kind })
    }

    /// Fails unless every member is a boundary vertex.
    pub fn boundary_subset(
        g: &WeightedGraph,
        members: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let set = Self::new(g, members)?;
        if let Some(&v) = set.members.iter().find(|&&v| !g.is_boundary(v)) {
            return invalid(format!("vertex {v} is not on the boundary"));
        }
        Ok(Self {
            kind: SetKind::BoundarySubset,
            ..set
        })
    }

    pub(crate) fn from_sorted(members: Vec<usize>, kind: SetKind) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self { members, kind }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.members.iter().any(|&v| other.contains(v))
    }

    /// Total mass of the set under `measure`.
    pub fn measure(&self, g: &WeightedGraph, measure: Measure) -> f64 {
        match measure {
            Measure::Volume => self.members.iter().map(|&v| g.mu()[v]).sum(),
            Measure::Boundary => self.members.iter().filter_map(|&v| g.boundary_area(v)).sum(),
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return invalid(format!("exponent p = {p} must exceed 1"));
    }
    Ok(())
}

/// `w * |d|^p` summed over edges, no validation.
pub(crate) fn energy_raw(g: &WeightedGraph, u: &[f64], p: f64) -> f64 {
    g.edges()
        .iter()
        .map(|e| e.w * (u[e.x] - u[e.y]).abs().powf(p))
        .sum()
}

pub(crate) fn gradient_raw(g: &WeightedGraph, u: &[f64], p: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for e in g.edges() {
        let d = u[e.x] - u[e.y];
        let flux = if d == 0.0 {
            0.0
        } else {
            p * e.w * d.abs().powf(p - 2.0) * d
        };
        out[e.x] += flux;
        out[e.y] -= flux;
    }
}

/// Edge-sum p-Dirichlet energy.
pub fn p_energy(g: &WeightedGraph, u: &VertexFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    u.check_on(g)?;
    Ok(energy_raw(g, u.values(), p))
}

/// First variation of [`p_energy`]. For `1 < p < 2` the summand is taken
/// as zero on edges with equal endpoint values.
pub fn p_energy_gradient(g: &WeightedGraph, u: &VertexFunction, p: f64) -> Result<VertexFunction> {
    check_exponent(p)?;
    u.check_on(g)?;
    let mut out = vec![0.0; g.n()];
    gradient_raw(g, u.values(), p, &mut out);
    Ok(VertexFunction(out))
}

/// Max over vertices of |analytic gradient - central difference with step h|.
pub fn finite_difference_check(g: &WeightedGraph, u: &VertexFunction, p: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return invalid(format!("step h = {h} must be positive"));
    }
    let grad = p_energy_gradient(g, u, p)?;
    let mut probe = u.values().to_vec();
    let mut worst: f64 = 0.0;
    for v in 0..g.n() {
        let base = probe[v];
        probe[v] = base + h;
        let up = energy_raw(g, &probe, p);
        probe[v] = base - h;
        let down = energy_raw(g, &probe, p);
        probe[v] = base;
        worst = worst.max((grad[v] - (up - down) / (2.0 * h)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path3() -> WeightedGraph {
        WeightedGraph::unit(3, [(0, 1), (1, 2)], [0, 2]).unwrap()
    }

    fn vf(v: &[f64]) -> VertexFunction {
        VertexFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn energy_examples() {
        let edge = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        assert_eq!(p_energy(&edge, &vf(&[1.0, 0.0]), 2.0).unwrap(), 1.0);
        assert_eq!(p_energy(&path3(), &vf(&[1.0, 0.5, 0.0]), 2.0).unwrap(), 0.5);
        assert_relative_eq!(p_energy(&path3(), &vf(&[1.0, 0.5, 0.0]), 3.0).unwrap(), 0.25);
    }

    #[test]
    fn gradient_examples() {
        let edge = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        let g = p_energy_gradient(&edge, &vf(&[1.0, 0.0]), 2.0).unwrap();
        assert_eq!(g.values(), &[2.0, -2.0]);
        let g = p_energy_gradient(&path3(), &vf(&[1.0, 0.5, 0.0]), 3.0).unwrap();
        assert_relative_eq!(g[0], 0.75);
        assert_eq!(g[1], 0.0);
        assert_relative_eq!(g[2], -0.75);
        for p in [1.3, 2.0, 3.5] {
            let g = p_energy_gradient(&path3(), &VertexFunction::constant(3, 4.2), p).unwrap();
            assert!(g.values().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn finite_differences_on_edge() {
        let edge = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        let dev = finite_difference_check(&edge, &vf(&[1.0, 0.0]), 3.0, 1e-5).unwrap();
        assert!(dev < 1e-6, "{dev}");
        let dev = finite_difference_check(&path3(), &VertexFunction::constant(3, 1.0), 2.0, 1e-5).unwrap();
        assert!(dev < 1e-10);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(WeightedGraph::unit(3, [(0, 1)], [0]).is_err());
        assert!(WeightedGraph::unit(2, [(0, 0), (0, 1)], [0]).is_err());
        assert!(WeightedGraph::unit(2, [(0, 1), (1, 0)], [0]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, -1.0)], vec![1.0; 2], []).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 1.0)], vec![1.0, 0.0], []).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 1.0)], vec![1.0; 2], [(1, 0.0)]).is_err());
        // empty boundary is allowed
        assert!(WeightedGraph::unit(2, [(0, 1)], []).is_ok());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(p_energy(&path3(), &vf(&[1.0, 0.0]), 2.0).is_err());
        assert!(p_energy(&path3(), &vf(&[1.0, 0.0, 0.0]), 1.0).is_err());
        assert!(VertexFunction::new(vec![f64::NAN]).is_err());
        assert!(VertexSet::boundary_subset(&path3(), [1]).is_err());
    }
}
