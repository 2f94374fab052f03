use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::inequalities::{
    hardy_check, layer_cake_check, prop_capacity_levels_check, LevelProfile, MonotoneProfile,
};
use crate::error::Result;
use crate::geometry::RandomGraphSpec;
use crate::graph::{VertexFunction, WeightedGraph};
use crate::rng;

/// Outcome of a randomized run of one checker.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    /// Individual comparisons made (draws times parameter combinations).
    pub cases: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` for upper-bound checks, `rhs / lhs` for the
    /// layer-cake check; at most 1 (plus tolerance) when nothing failed.
    pub worst_ratio: f64,
    /// Description of the first few failing cases.
    pub failures: Vec<String>,
}

const KEPT_FAILURES: usize = 10;

fn summarize(suite: &str, outcomes: Vec<(bool, f64, String)>) -> SuiteSummary {
    let mut failures = Vec::new();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for (ok, ratio, label) in &outcomes {
        worst = worst.max(*ratio);
        if !ok {
            violations += 1;
            if failures.len() < KEPT_FAILURES {
                failures.push(label.clone());
            }
        }
    }
    SuiteSummary {
        suite: suite.into(),
        cases: outcomes.len(),
        violations,
        worst_ratio: worst,
        failures,
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Nonincreasing step profile with one to eight steps; the last step is
/// zero about a quarter of the time.
pub fn random_level_profile(rng: &mut impl Rng) -> LevelProfile {
    let m = rng.random_range(1..=8);
    let mut t = 0.0;
    let breakpoints: Vec<f64> = (0..m)
        .map(|_| {
            t += rng.random_range(0.05..1.0);
            t
        })
        .collect();
    let mut values: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..3.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    if rng.random_bool(0.25) {
        values[m - 1] = 0.0;
    }
    LevelProfile::monotone(breakpoints, values).expect("valid by construction")
}

/// Piecewise linear nondecreasing profile from the origin with one to
/// eight cells; about a fifth of the slopes are zero.
pub fn random_monotone_profile(rng: &mut impl Rng) -> MonotoneProfile {
    let m = rng.random_range(1..=8);
    let mut grid = vec![0.0];
    let mut values = vec![0.0];
    for _ in 0..m {
        let dx = rng.random_range(0.05..1.0);
        let slope = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..3.0) };
        grid.push(grid.last().unwrap() + dx);
        values.push(values.last().unwrap() + slope * dx);
    }
    MonotoneProfile::new(grid, values).expect("valid by construction")
}

/// Layer-cake comparison on `draws` random profiles for every `(p, alpha)`.
pub fn layer_cake_suite(seed: u64, draws: usize, ps: &[f64], alphas: &[f64]) -> Result<SuiteSummary> {
    let outcomes = (0..draws)
        .into_par_iter()
        .map(|i| {
            let prof = random_level_profile(&mut rng::stream(seed, "layer-cake", i as u64));
            let mut out = Vec::new();
            for &p in ps {
                for &alpha in alphas {
                    let r = layer_cake_check(&prof, p, alpha)?;
                    out.push((r.ok, ratio(r.rhs, r.lhs), format!("draw {i}, p = {p}, alpha = {alpha}: {r:?}")));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("layer-cake", outcomes.into_iter().flatten().collect()))
}

/// Hardy comparison on `draws` random profiles for every `p`.
pub fn hardy_suite(seed: u64, draws: usize, ps: &[f64]) -> Result<SuiteSummary> {
    let outcomes = (0..draws)
        .into_par_iter()
        .map(|i| {
            let prof = random_monotone_profile(&mut rng::stream(seed, "hardy", i as u64));
            ps.iter()
                .map(|&p| {
                    let r = hardy_check(&prof, p)?;
                    Ok((r.ok, ratio(r.lhs, r.rhs), format!("draw {i}, p = {p}: {r:?}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("hardy", outcomes.into_iter().flatten().collect()))
}

/// Random connected graph on 3 to `max_n` vertices with random measures,
/// and a function with values in `[-1, 1]` taking both signs.
pub fn random_graph_and_function(seed: u64, index: u64, max_n: usize) -> Result<(WeightedGraph, VertexFunction)> {
    let mut r = rng::stream(seed, "levels-instance", index);
    let n = r.random_range(3..=max_n.max(3));
    let spec = RandomGraphSpec {
        random_measures: true,
        ..RandomGraphSpec::gnp(n, 0.5)
    };
    let g = spec.sample(rng::derive_seed(seed, "levels-graph", index), 0)?;
    let mut u: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let lo = r.random_range(0..n);
    let hi = (lo + r.random_range(1..n)) % n;
    u[lo] = -u[lo].abs();
    u[hi] = u[hi].abs().max(0.1);
    Ok((g, VertexFunction::new(u)?))
}

/// Capacity level-set comparison on `draws` random graph/function pairs
/// with at most `max_n` vertices, for every `p`.
pub fn levels_suite(seed: u64, draws: usize, max_n: usize, ps: &[f64]) -> Result<SuiteSummary> {
    let outcomes = (0..draws)
        .into_par_iter()
        .map(|i| {
            let (g, u) = random_graph_and_function(seed, i as u64, max_n)?;
            ps.iter()
                .map(|&p| {
                    let r = prop_capacity_levels_check(&g, &u, p)?;
                    Ok((r.ok, r.ratio, format!("draw {i}, n = {}, p = {p}: {r:?}", g.n())))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("capacity-levels", outcomes.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_repeat() {
        let a = layer_cake_suite(1, 20, &[1.5, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((a.cases, a.violations), (80, 0));
        assert_eq!(a, layer_cake_suite(1, 20, &[1.5, 2.0], &[1.0, 2.0]).unwrap());
        let h = hardy_suite(1, 20, &[2.0, 3.0]).unwrap();
        assert_eq!((h.cases, h.violations), (40, 0));
        let l = levels_suite(1, 4, 6, &[2.0]).unwrap();
        assert_eq!(l.violations, 0);
        assert!(l.worst_ratio > 0.0 && l.worst_ratio <= 1.0);
    }
}
