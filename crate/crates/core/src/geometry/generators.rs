use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::rng;

/// Named model family with its size parameters.
///
/// Text form is `family[:params]`: `edge`, `edge:<w>`, `path:<n>`,
/// `cycle:<n>`, `star:<n>`, `grid2d:<rows>x<cols>`, `complete:<n>`,
/// `random_gnp:<n>,<p_edge>`.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Edge { w: f64 },
    Path { n: usize },
    Cycle { n: usize },
    Star { n: usize },
    Grid2d { rows: usize, cols: usize },
    Complete { n: usize },
    RandomGnp { n: usize, p_edge: f64 },
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let count = |min: usize| -> Result<usize> {
            let n: usize = params
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("`{s}`: expected a vertex count")))?;
            if n < min {
                return invalid(format!("`{s}`: needs at least {min} vertices"));
            }
            Ok(n)
        };
        match family.trim() {
            "edge" => {
                let w = if params.is_empty() {
                    1.0
                } else {
                    params
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("`{s}`: expected an edge weight")))?
                };
                Ok(Self::Edge { w })
            }
            "path" => Ok(Self::Path { n: count(2)? }),
            "cycle" => Ok(Self::Cycle { n: count(3)? }),
            "star" => Ok(Self::Star { n: count(2)? }),
            "complete" => Ok(Self::Complete { n: count(2)? }),
            "grid2d" => {
                let (r, c) = params
                    .split_once('x')
                    .ok_or_else(|| Error::InvalidInput(format!("`{s}`: expected <rows>x<cols>")))?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidInput(format!("`{s}`: bad grid size")))
                };
                let (rows, cols) = (parse(r)?, parse(c)?);
                if rows * cols < 2 {
                    return invalid(format!("`{s}`: grid needs at least two vertices"));
                }
                Ok(Self::Grid2d { rows, cols })
            }
            "random_gnp" => {
                let (n, pe) = params
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidInput(format!("`{s}`: expected <n>,<p_edge>")))?;
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("`{s}`: bad vertex count")))?;
                let p_edge: f64 = pe
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("`{s}`: bad edge probability")))?;
                if n < 2 || !(p_edge > 0.0 && p_edge <= 1.0) {
                    return invalid(format!("`{s}`: need n >= 2 and 0 < p_edge <= 1"));
                }
                Ok(Self::RandomGnp { n, p_edge })
            }
            other => invalid(format!("unknown model family `{other}`")),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Edge { w } => write!(f, "edge:{w}"),
            Self::Path { n } => write!(f, "path:{n}"),
            Self::Cycle { n } => write!(f, "cycle:{n}"),
            Self::Star { n } => write!(f, "star:{n}"),
            Self::Grid2d { rows, cols } => write!(f, "grid2d:{rows}x{cols}"),
            Self::Complete { n } => write!(f, "complete:{n}"),
            Self::RandomGnp { n, p_edge } => write!(f, "random_gnp:{n},{p_edge}"),
        }
    }
}

/// Builds a model graph with unit volumes and unit boundary areas.
///
/// Boundaries: both ends of `edge` and `path`, every vertex of `cycle` and
/// `complete`, the leaves of `star`, the outer ring of `grid2d`. The random
/// family needs `seed`; see [`RandomGraphSpec`] for what it draws.
pub fn gen_model(spec: &ModelSpec, seed: Option<u64>) -> Result<WeightedGraph> {
    match *spec {
        ModelSpec::Edge { w } => WeightedGraph::new(2, [(0, 1, w)], vec![1.0; 2], [(0, 1.0), (1, 1.0)]),
        ModelSpec::Path { n } => WeightedGraph::unit(n, (1..n).map(|i| (i - 1, i)), [0, n - 1]),
        ModelSpec::Cycle { n } => WeightedGraph::unit(n, (0..n).map(|i| (i, (i + 1) % n)), 0..n),
        ModelSpec::Star { n } => WeightedGraph::unit(n, (1..n).map(|i| (0, i)), 1..n),
        ModelSpec::Complete { n } => {
            WeightedGraph::unit(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))), 0..n)
        }
        ModelSpec::Grid2d { rows, cols } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            let ring = (0..rows * cols).filter(|&v| {
                let (r, c) = (v / cols, v % cols);
                r == 0 || c == 0 || r + 1 == rows || c + 1 == cols
            });
            WeightedGraph::unit(rows * cols, edges, ring)
        }
        ModelSpec::RandomGnp { n, p_edge } => {
            let seed = seed.ok_or_else(|| Error::InvalidInput("random_gnp requires a seed".into()))?;
            RandomGraphSpec::gnp(n, p_edge).sample(seed, 0)
        }
    }
}

/// Connected Erdős–Rényi graph with random conductances.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomGraphSpec {
    pub n: usize,
    pub p_edge: f64,
    /// Conductances are uniform on `[lo, hi)`.
    pub weight_range: (f64, f64),
    /// Draw `mu` and `nu` uniformly from `weight_range` instead of all ones.
    pub random_measures: bool,
    /// Exact boundary size; `None` draws each vertex with probability 1/2
    /// and tops up to two boundary vertices.
    pub boundary_size: Option<usize>,
    /// Resampling attempts before giving up on connectivity.
    pub max_tries: usize,
}

impl RandomGraphSpec {
    pub fn gnp(n: usize, p_edge: f64) -> Self {
        Self {
            n,
            p_edge,
            weight_range: (0.5, 2.0),
            random_measures: false,
            boundary_size: None,
            max_tries: 100,
        }
    }

    /// Draw number `index` of the stream seeded by `seed`.
    pub fn sample(&self, seed: u64, index: u64) -> Result<WeightedGraph> {
        let n = self.n;
        if n < 2 {
            return invalid("random graph needs at least two vertices");
        }
        if let Some(k) = self.boundary_size {
            if k > n {
                return invalid(format!("boundary size {k} exceeds {n} vertices"));
            }
        }
        let mut rng = rng::stream(seed, "random-graph", index);
        let (lo, hi) = self.weight_range;
        for _ in 0..self.max_tries.max(1) {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(self.p_edge) {
                        edges.push((i, j, rng.random_range(lo..hi)));
                    }
                }
            }
            let mu: Vec<f64> = (0..n)
                .map(|_| if self.random_measures { rng.random_range(lo..hi) } else { 1.0 })
                .collect();
            let mut boundary: Vec<usize> = match self.boundary_size {
                Some(k) => rand::seq::index::sample(&mut rng, n, k).into_vec(),
                None => (0..n).filter(|_| rng.random_bool(0.5)).collect(),
            };
            while self.boundary_size.is_none() && boundary.len() < 2 {
                let v = rng.random_range(0..n);
                if !boundary.contains(&v) {
                    boundary.push(v);
                }
            }
            boundary.sort_unstable();
            let nu: Vec<(usize, f64)> = boundary
                .iter()
                .map(|&v| (v, if self.random_measures { rng.random_range(lo..hi) } else { 1.0 }))
                .collect();
            match WeightedGraph::new(n, edges, mu, nu) {
                Ok(g) => return Ok(g),
                Err(Error::InvalidGraph(msg)) if msg.contains("not connected") => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidGraph(format!(
            "no connected draw in {} attempts (n = {n}, p_edge = {})",
            self.max_tries, self.p_edge
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let g = gen_model(&"path:3".parse().unwrap(), None).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.boundary(), &[0, 2]);
        let g = gen_model(&"grid2d:3x3".parse().unwrap(), None).unwrap();
        assert_eq!((g.n(), g.edges().len(), g.boundary().len()), (9, 12, 8));
        assert!(!g.is_boundary(4));
        let g = gen_model(&"star:5".parse().unwrap(), None).unwrap();
        assert_eq!(g.boundary(), &[1, 2, 3, 4]);
        let g = gen_model(&"complete:4".parse().unwrap(), None).unwrap();
        assert_eq!(g.edges().len(), 6);
        let g = gen_model(&"edge:2.5".parse().unwrap(), None).unwrap();
        assert_eq!(g.edges()[0].w, 2.5);
    }

    #[test]
    fn random_is_reproducible() {
        let spec: ModelSpec = "random_gnp:10,0.4".parse().unwrap();
        let a = gen_model(&spec, Some(7)).unwrap();
        let b = gen_model(&spec, Some(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.boundary().len() >= 2);
        assert!(gen_model(&spec, None).is_err());
        assert_ne!(a, gen_model(&spec, Some(8)).unwrap());
    }

    #[test]
    fn parse_round_trip_and_errors() {
        for s in ["path:4", "grid2d:2x5", "random_gnp:6,0.5", "cycle:5"] {
            assert_eq!(s.parse::<ModelSpec>().unwrap().to_string(), s);
        }
        assert!("path:1".parse::<ModelSpec>().is_err());
        assert!("blob:3".parse::<ModelSpec>().is_err());
        assert!("random_gnp:5,1.5".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn sparse_draws_give_up() {
        let spec = RandomGraphSpec {
            max_tries: 3,
            ..RandomGraphSpec::gnp(30, 0.01)
        };
        assert!(spec.sample(1, 0).is_err());
    }
}
