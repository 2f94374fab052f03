//! Isocapacitary constants.
//!
//! * Steklov: `min Cap_p(A, B) / min(nu(A), nu(B))^(1/alpha)` over disjoint
//!   nonempty boundary sets.
//! * Neumann: the same over disjoint nonempty vertex sets with `mu`.
//! * Dirichlet: `min Cap_p(F, boundary) / mu(F)^(1/alpha)` over nonempty
//!   interior sets `F`.
//!
//! On a finite graph the infimum runs over finitely many pairs and is
//! attained, so exact mode is plain enumeration. Unordered pairs are visited
//! once each; the reported certificate puts the lighter set first.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{capacity_p2_oracle, capacity_with, CapacityOptions};
use crate::error::{invalid, Error, Result};
use crate::graph::{check_exponent, Measure, SetKind, VertexFunction, VertexSet, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IsocapMode {
    Steklov,
    Neumann,
    Dirichlet,
}

impl IsocapMode {
    fn measure(self) -> Measure {
        match self {
            Self::Steklov => Measure::Boundary,
            Self::Neumann | Self::Dirichlet => Measure::Volume,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsocapSearch {
    ExactEnumeration,
    LevelSetHeuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsocapResult {
    pub value: f64,
    /// Lighter set of the minimizing pair (`F` in Dirichlet mode).
    pub cert_a: VertexSet,
    /// Heavier set (the whole boundary in Dirichlet mode).
    pub cert_b: VertexSet,
    pub search: IsocapSearch,
    pub kind: IsocapMode,
    pub pairs_evaluated: u64,
    pub alpha: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsocapOptions {
    /// Largest number of pair evaluations exact mode will attempt.
    pub budget: u64,
    /// KKT tolerance for the nonlinear capacity solves.
    pub capacity_tol: f64,
}

impl Default for IsocapOptions {
    fn default() -> Self {
        Self {
            budget: 250_000,
            capacity_tol: 1e-8,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return invalid(format!("alpha = {alpha} must be positive"));
    }
    Ok(())
}

/// Candidate vertices for the sets of `mode`.
fn pool(g: &WeightedGraph, mode: IsocapMode) -> Result<Vec<usize>> {
    match mode {
        IsocapMode::Steklov => {
            if g.boundary().len() < 2 {
                return Err(Error::Precondition("steklov mode needs at least two boundary vertices".into()));
            }
            Ok(g.boundary().to_vec())
        }
        IsocapMode::Neumann => {
            if g.n() < 2 {
                return Err(Error::Precondition("neumann mode needs at least two vertices".into()));
            }
            Ok((0..g.n()).collect())
        }
        IsocapMode::Dirichlet => {
            let interior = g.interior();
            if g.boundary().is_empty() || interior.is_empty() {
                return Err(Error::Precondition(
                    "dirichlet mode needs a nonempty boundary and at least one interior vertex".into(),
                ));
            }
            Ok(interior)
        }
    }
}

/// Number of admissible evaluations for a pool of size `k`.
pub fn admissible_count(k: usize, mode: IsocapMode) -> u128 {
    let k = k as u32;
    match mode {
        IsocapMode::Dirichlet => 2u128.saturating_pow(k) - 1,
        _ => {
            let three = 3u128.saturating_pow(k);
            let two = 2u128.saturating_pow(k + 1);
            (three + 1).saturating_sub(two) / 2
        }
    }
}

struct Evaluator<'a> {
    g: &'a WeightedGraph,
    p: f64,
    alpha: f64,
    mode: IsocapMode,
    opts: CapacityOptions,
}

impl Evaluator<'_> {
    fn capacity(&self, a: &VertexSet, b: &VertexSet) -> Result<f64> {
        let r = if self.p == 2.0 {
            capacity_p2_oracle(self.g, a, b)?
        } else {
            capacity_with(self.g, a, b, self.p, &self.opts)?
        };
        Ok(r.value)
    }

    /// Ratio of an admissible pair, certificate ordered lighter-first.
    fn ratio(&self, a: Vec<usize>, b: Vec<usize>) -> Result<(f64, VertexSet, VertexSet)> {
        let kind = if self.mode == IsocapMode::Steklov {
            SetKind::BoundarySubset
        } else {
            SetKind::Any
        };
        let measure = self.mode.measure();
        let a = VertexSet::from_sorted(a, kind);
        let b = VertexSet::from_sorted(b, if self.mode == IsocapMode::Dirichlet { SetKind::BoundarySubset } else { kind });
        let cap = self.capacity(&a, &b)?;
        if self.mode == IsocapMode::Dirichlet {
            let vol = a.measure(self.g, measure);
            return Ok((cap / vol.powf(1.0 / self.alpha), a, b));
        }
        let (ma, mb) = (a.measure(self.g, measure), b.measure(self.g, measure));
        let value = cap / ma.min(mb).powf(1.0 / self.alpha);
        if mb < ma {
            Ok((value, b, a))
        } else {
            Ok((value, a, b))
        }
    }
}

/// Decodes a base-3 assignment of the pool into `(A, B)`; `None` unless the
/// pair is admissible and canonical (lowest assigned vertex lies in `A`).
fn decode_pair(code: u64, pool: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = code;
    for &v in pool {
        match c % 3 {
            1 => a.push(v),
            2 => {
                if a.is_empty() {
                    return None;
                }
                b.push(v)
            }
            _ => {}
        }
        c /= 3;
    }
    (!a.is_empty() && !b.is_empty()).then_some((a, b))
}

fn decode_subset(code: u64, pool: &[usize]) -> Vec<usize> {
    pool.iter()
        .enumerate()
        .filter(|(i, _)| code >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

fn better(x: &(f64, u64), y: &(f64, u64)) -> bool {
    x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).is_lt()
}

/// Exact constant by enumerating every admissible pair.
pub fn isocap_exact(g: &WeightedGraph, p: f64, alpha: f64, mode: IsocapMode, opts: &IsocapOptions) -> Result<IsocapResult> {
    check_exponent(p)?;
    check_alpha(alpha)?;
    let pool = pool(g, mode)?;
    let needed = admissible_count(pool.len(), mode);
    if needed > u128::from(opts.budget) {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.budget,
        });
    }
    let eval = Evaluator {
        g,
        p,
        alpha,
        mode,
        opts: CapacityOptions::with_tol(opts.capacity_tol),
    };
    let boundary = g.boundary().to_vec();
    let codes: u64 = match mode {
        IsocapMode::Dirichlet => 1u64 << pool.len(),
        _ => 3u64.pow(pool.len() as u32),
    };
    let decode = |code: u64| -> Option<(Vec<usize>, Vec<usize>)> {
        match mode {
            IsocapMode::Dirichlet => (code != 0).then(|| (decode_subset(code, &pool), boundary.clone())),
            _ => decode_pair(code, &pool),
        }
    };

    let best = (0..codes)
        .into_par_iter()
        .filter_map(|code| decode(code).map(|pair| (code, pair)))
        .map(|(code, (a, b))| eval.ratio(a, b).map(|(v, _, _)| (v, code)))
        .try_reduce_with(|x, y| Ok(if better(&y, &x) { y } else { x }))
        .ok_or_else(|| Error::Precondition("no admissible pair".into()))??;

    let (a, b) = decode(best.1).expect("winning code decodes");
    let (value, cert_a, cert_b) = eval.ratio(a, b)?;
    Ok(IsocapResult {
        value,
        cert_a,
        cert_b,
        search: IsocapSearch::ExactEnumeration,
        kind: mode,
        pairs_evaluated: needed as u64,
        alpha,
        p,
    })
}

/// Upper bound from super/sub-level sets of `seed`.
///
/// With the distinct seed values on the pool sorted ascending (thinned to at
/// most `thresholds` quantile levels), every pair of levels `s < t` gives the
/// candidate `A = {seed >= t}`, `B = {seed <= s}`. Dirichlet mode sweeps
/// `F = {seed >= t}` against the boundary.
pub fn isocap_heuristic(
    g: &WeightedGraph,
    p: f64,
    alpha: f64,
    mode: IsocapMode,
    seed: &VertexFunction,
    thresholds: usize,
    opts: &IsocapOptions,
) -> Result<IsocapResult> {
    check_exponent(p)?;
    check_alpha(alpha)?;
    seed.check_on(g)?;
    if thresholds < 2 && mode != IsocapMode::Dirichlet {
        return invalid("level-set sweep needs at least two thresholds");
    }
    let pool = pool(g, mode)?;
    let mut levels: Vec<f64> = pool.iter().map(|&v| seed[v]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let needed_levels = if mode == IsocapMode::Dirichlet { 1 } else { 2 };
    if levels.len() < needed_levels {
        return invalid("seed function is constant on the admissible vertices");
    }
    if levels.len() > thresholds.max(1) {
        let m = levels.len();
        let k = thresholds.max(1);
        let mut picked: Vec<f64> = (0..k)
            .map(|i| levels[if k == 1 { m - 1 } else { i * (m - 1) / (k - 1) }])
            .collect();
        picked.dedup();
        levels = picked;
    }

    let eval = Evaluator {
        g,
        p,
        alpha,
        mode,
        opts: CapacityOptions::with_tol(opts.capacity_tol),
    };
    let upper = |t: f64| -> Vec<usize> { pool.iter().copied().filter(|&v| seed[v] >= t).collect() };
    let lower = |s: f64| -> Vec<usize> { pool.iter().copied().filter(|&v| seed[v] <= s).collect() };
    let candidates: Vec<(Vec<usize>, Vec<usize>)> = match mode {
        IsocapMode::Dirichlet => levels.iter().map(|&t| (upper(t), g.boundary().to_vec())).collect(),
        _ => {
            let mut c = Vec::new();
            for (i, &t) in levels.iter().enumerate() {
                for &s in &levels[..i] {
                    let (a, b) = (upper(t), lower(s));
                    // canonical order: lowest vertex first
                    if a[0] < b[0] {
                        c.push((a, b));
                    } else {
                        c.push((b, a));
                    }
                }
            }
            c
        }
    };
    let evaluated = candidates.len() as u64;
    let scored: Vec<(f64, VertexSet, VertexSet)> = candidates
        .into_par_iter()
        .map(|(a, b)| eval.ratio(a, b))
        .collect::<Result<_>>()?;
    let (value, cert_a, cert_b) = scored
        .into_iter()
        .reduce(|x, y| if y.0.total_cmp(&x.0).is_lt() { y } else { x })
        .ok_or_else(|| Error::Precondition("no admissible level-set pair".into()))?;
    Ok(IsocapResult {
        value,
        cert_a,
        cert_b,
        search: IsocapSearch::LevelSetHeuristic,
        kind: mode,
        pairs_evaluated: evaluated,
        alpha,
        p,
    })
}
