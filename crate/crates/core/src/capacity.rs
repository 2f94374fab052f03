//! p-capacity between disjoint vertex sets.
//!
//! `Cap_p(A, B)` is the least edge-sum p-energy of a potential that equals 1
//! on `A` and 0 on `B`. Clamping a potential into `[0, 1]` never raises the
//! energy, so the minimum over the one-sided class `{u >= 1 on A, u <= 0 on
//! B}` equals the minimum over the box class `{u = 1 on A, u = 0 on B,
//! 0 <= u <= 1}`. The solver works on the box class; the one-sided variant is
//! kept for [`truncation_invariance_check`].
//!
//! The minimizer is unique on the free vertices: the energy is strictly
//! convex in every edge difference for `p > 1`, and on a connected graph
//! pinning `A` and `B` leaves no constant direction.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{check_exponent, energy_raw, gradient_raw, VertexFunction, VertexSet, WeightedGraph};
use crate::linalg::solve_spd_triplets;

/// How a capacity value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMode {
    Optimizer,
    LinearP2,
    ClosedFormPath,
    /// Degenerate sets: `+inf` for overlapping sets, `0` when one is empty.
    Convention,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub value: f64,
    /// Minimizing potential. `None` only in [`CapacityMode::Convention`].
    pub potential: Option<VertexFunction>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub mode: CapacityMode,
}

impl CapacityResult {
    fn convention(value: f64) -> Self {
        Self {
            value,
            potential: None,
            iterations: 0,
            kkt_residual: 0.0,
            mode: CapacityMode::Convention,
        }
    }

    /// Whether the KKT residual met `tol`.
    pub fn converged(&self, tol: f64) -> bool {
        self.kkt_residual <= tol
    }
}

/// Solver knobs. The defaults are what [`capacity`] uses.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityOptions {
    /// Relative KKT tolerance on the unsmoothed problem.
    pub tol: f64,
    /// First smoothing radius for `1 < p < 2`.
    pub eps_start: f64,
    /// Last smoothing radius before the unsmoothed polish.
    pub eps_end: f64,
    /// Ratio between consecutive smoothing radii.
    pub eps_ratio: f64,
    /// Newton iterations allowed per continuation stage.
    pub max_iterations: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            eps_start: 1e-2,
            eps_end: 1e-8,
            eps_ratio: 0.1,
            max_iterations: 200,
        }
    }
}

impl CapacityOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// `Cap_p(A, B)` by projected Newton descent over the box class.
pub fn capacity(g: &WeightedGraph, a: &VertexSet, b: &VertexSet, p: f64, tol: f64) -> Result<CapacityResult> {
    capacity_with(g, a, b, p, &CapacityOptions::with_tol(tol))
}

pub fn capacity_with(
    g: &WeightedGraph,
    a: &VertexSet,
    b: &VertexSet,
    p: f64,
    opts: &CapacityOptions,
) -> Result<CapacityResult> {
    check_exponent(p)?;
    if !(opts.tol > 0.0) {
        return invalid(format!("tolerance {} must be positive", opts.tol));
    }
    if let Some(conv) = convention(g, a, b)? {
        return Ok(conv);
    }
    let n = g.n();
    let mut lo = vec![0.0; n];
    let mut hi = vec![1.0; n];
    for &v in a.members() {
        lo[v] = 1.0;
    }
    for &v in b.members() {
        hi[v] = 0.0;
    }
    let x0 = if p == 2.0 {
        (0..n).map(|v| if a.contains(v) { 1.0 } else if b.contains(v) { 0.0 } else { 0.5 }).collect()
    } else {
        harmonic_potential(g, a, b)?
    };
    let sol = minimize_bounded(g, p, &lo, &hi, x0, opts);
    let mut u = sol.x;
    // the box keeps every iterate in [0, 1]; rounding aside
    u.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
    Ok(CapacityResult {
        value: energy_raw(g, &u, p),
        potential: Some(VertexFunction::from_raw(u)),
        iterations: sol.iterations,
        kkt_residual: sol.residual,
        mode: CapacityMode::Optimizer,
    })
}

fn convention(g: &WeightedGraph, a: &VertexSet, b: &VertexSet) -> Result<Option<CapacityResult>> {
    for set in [a, b] {
        if let Some(&v) = set.members().last() {
            if v >= g.n() {
                return invalid(format!("vertex {v} out of range"));
            }
        }
    }
    if a.is_empty() || b.is_empty() {
        return Ok(Some(CapacityResult::convention(0.0)));
    }
    if a.intersects(b) {
        return Ok(Some(CapacityResult::convention(f64::INFINITY)));
    }
    Ok(None)
}

/// Harmonic (p = 2) potential with `1` on `A` and `0` on `B`.
fn harmonic_potential(g: &WeightedGraph, a: &VertexSet, b: &VertexSet) -> Result<Vec<f64>> {
    let n = g.n();
    let mut index = vec![usize::MAX; n];
    let free: Vec<usize> = (0..n).filter(|&v| !a.contains(v) && !b.contains(v)).collect();
    for (k, &v) in free.iter().enumerate() {
        index[v] = k;
    }
    let mut u: Vec<f64> = (0..n).map(|v| if a.contains(v) { 1.0 } else { 0.0 }).collect();
    if free.is_empty() {
        return Ok(u);
    }
    let mut triplets = Vec::with_capacity(4 * g.edges().len());
    let mut rhs = vec![0.0; free.len()];
    for e in g.edges() {
        let (i, j) = (index[e.x], index[e.y]);
        if i != usize::MAX {
            triplets.push((i, i, e.w));
        }
        if j != usize::MAX {
            triplets.push((j, j, e.w));
        }
        match (i != usize::MAX, j != usize::MAX) {
            (true, true) => {
                triplets.push((i, j, -e.w));
                triplets.push((j, i, -e.w));
            }
            (true, false) => rhs[i] += e.w * u[e.y],
            (false, true) => rhs[j] += e.w * u[e.x],
            (false, false) => {}
        }
    }
    let x = solve_spd_triplets(free.len(), &triplets, &rhs)
        .ok_or_else(|| Error::Numerical("reduced Laplacian is not positive definite".into()))?;
    for (k, &v) in free.iter().enumerate() {
        u[v] = x[k];
    }
    Ok(u)
}

/// Exact `Cap_2(A, B)` from the harmonic potential on the free vertices.
pub fn capacity_p2_oracle(g: &WeightedGraph, a: &VertexSet, b: &VertexSet) -> Result<CapacityResult> {
    if let Some(conv) = convention(g, a, b)? {
        return Ok(conv);
    }
    let u = harmonic_potential(g, a, b)?;
    let value = g.edges().iter().map(|e| e.w * (u[e.x] - u[e.y]).powi(2)).sum();
    let mut grad = vec![0.0; g.n()];
    gradient_raw(g, &u, 2.0, &mut grad);
    let free_res = (0..g.n())
        .filter(|&v| !a.contains(v) && !b.contains(v))
        .map(|v| grad[v].abs())
        .fold(0.0, f64::max);
    Ok(CapacityResult {
        value,
        kkt_residual: free_res / (2.0 * f64::sqrt(value)),
        potential: Some(VertexFunction::from_raw(u)),
        iterations: 1,
        mode: CapacityMode::LinearP2,
    })
}

/// Series law for a path with the given edge conductances:
/// `(sum_i w_i^(-1/(p-1)))^(1-p)`.
pub fn path_capacity_closed_form(weights: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    if weights.is_empty() {
        return invalid("path needs at least one edge");
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return invalid(format!("path weight {w} is not positive"));
    }
    let resistance: f64 = weights.iter().map(|w| w.powf(-1.0 / (p - 1.0))).sum();
    Ok(resistance.powf(1.0 - p))
}

/// Capacity over the box class and over the one-sided class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationReport {
    pub clamped: f64,
    pub one_sided: f64,
    pub relative_gap: f64,
}

/// Solves once with the `[0, 1]` box and once with only `u >= 1` on `A`,
/// `u <= 0` on `B`, from a different starting point.
pub fn truncation_invariance_check(
    g: &WeightedGraph,
    a: &VertexSet,
    b: &VertexSet,
    p: f64,
) -> Result<TruncationReport> {
    let opts = CapacityOptions::default();
    let clamped = capacity_with(g, a, b, p, &opts)?;
    if clamped.mode == CapacityMode::Convention {
        return Ok(TruncationReport {
            clamped: clamped.value,
            one_sided: clamped.value,
            relative_gap: 0.0,
        });
    }
    let n = g.n();
    let mut lo = vec![f64::NEG_INFINITY; n];
    let mut hi = vec![f64::INFINITY; n];
    let mut x0 = vec![0.5; n];
    for &v in a.members() {
        lo[v] = 1.0;
        x0[v] = 1.0;
    }
    for &v in b.members() {
        hi[v] = 0.0;
        x0[v] = 0.0;
    }
    let sol = minimize_bounded(g, p, &lo, &hi, x0, &opts);
    let one_sided = energy_raw(g, &sol.x, p);
    let scale = clamped.value.abs().max(one_sided.abs()).max(f64::MIN_POSITIVE);
    Ok(TruncationReport {
        clamped: clamped.value,
        one_sided,
        relative_gap: (clamped.value - one_sided).abs() / scale,
    })
}

struct Solution {
    x: Vec<f64>,
    iterations: usize,
    residual: f64,
}

/// Edge energy `w * ((d^2 + eps^2)^(p/2) - eps^p)`; the plain `w |d|^p` at eps = 0.
struct Smoothed<'a> {
    g: &'a WeightedGraph,
    p: f64,
    eps: f64,
    /// Radius used in the Hessian weights so they stay finite and positive.
    eps_hess: f64,
}

impl Smoothed<'_> {
    fn energy(&self, x: &[f64]) -> f64 {
        if self.eps == 0.0 {
            return energy_raw(self.g, x, self.p);
        }
        let (p, e2, ep) = (self.p, self.eps * self.eps, self.eps.powf(self.p));
        self.g
            .edges()
            .iter()
            .map(|e| {
                let d = x[e.x] - x[e.y];
                e.w * ((d * d + e2).powf(0.5 * p) - ep)
            })
            .sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        if self.eps == 0.0 {
            return gradient_raw(self.g, x, self.p, out);
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        let e2 = self.eps * self.eps;
        for e in self.g.edges() {
            let d = x[e.x] - x[e.y];
            let flux = self.p * e.w * (d * d + e2).powf(0.5 * self.p - 1.0) * d;
            out[e.x] += flux;
            out[e.y] -= flux;
        }
    }

    /// Second derivative of the edge term in the difference `d`.
    fn curvature(&self, d: f64, w: f64) -> f64 {
        let p = self.p;
        if p == 2.0 {
            return 2.0 * w;
        }
        let e2 = self.eps_hess * self.eps_hess;
        let s = d * d + e2;
        p * w * s.powf(0.5 * p - 2.0) * ((p - 1.0) * d * d + e2)
    }
}

/// Projected gradient norm over movable coordinates.
fn projected_residual(x: &[f64], grad: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        if lo[i] == hi[i] {
            continue;
        }
        let gi = grad[i];
        let blocked = (x[i] <= lo[i] && gi > 0.0) || (x[i] >= hi[i] && gi < 0.0);
        if !blocked {
            worst = worst.max(gi.abs());
        }
    }
    worst
}

fn relative_residual(g: &WeightedGraph, p: f64, x: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut grad = vec![0.0; x.len()];
    gradient_raw(g, x, p, &mut grad);
    let energy = energy_raw(g, x, p);
    let scale = p * energy.powf((p - 1.0) / p);
    let r = projected_residual(x, &grad, lo, hi);
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Minimizes the p-energy subject to `lo <= x <= hi` (coordinates with
/// `lo == hi` are pinned). Projected Newton with an Armijo search along the
/// projection arc; `1 < p < 2` runs a smoothing continuation first.
fn minimize_bounded(g: &WeightedGraph, p: f64, lo: &[f64], hi: &[f64], mut x: Vec<f64>, opts: &CapacityOptions) -> Solution {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
    let mut stages: Vec<(f64, f64)> = Vec::new();
    if p < 2.0 {
        let mut eps = opts.eps_start;
        while eps > opts.eps_end * (1.0 + 1e-9) {
            stages.push((eps, 1e-6));
            eps *= opts.eps_ratio;
        }
        stages.push((opts.eps_end, 1e-6));
    }
    stages.push((0.0, opts.tol));

    let mut iterations = 0;
    for &(eps, stage_tol) in &stages {
        let model = Smoothed {
            g,
            p,
            eps,
            eps_hess: eps.max(opts.eps_end),
        };
        iterations += newton_stage(&model, lo, hi, &mut x, stage_tol, opts.max_iterations);
        if eps == 0.0 {
            break;
        }
    }
    let residual = relative_residual(g, p, &x, lo, hi);
    Solution { x, iterations, residual }
}

fn newton_stage(model: &Smoothed<'_>, lo: &[f64], hi: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> usize {
    let n = x.len();
    let g = model.g;
    let p = model.p;
    let mut grad = vec![0.0; n];
    let mut index = vec![usize::MAX; n];
    let mut trial = vec![0.0; n];
    let mut stalls = 0;
    for it in 0..max_iter {
        model.gradient(x, &mut grad);
        let f = model.energy(x);
        let plain = if model.eps == 0.0 { f } else { energy_raw(g, x, p) };
        let scale = p * plain.powf((p - 1.0) / p);
        let res = projected_residual(x, &grad, lo, hi);
        if res <= tol * scale.max(f64::MIN_POSITIVE) {
            return it;
        }

        // coordinates pressed against a bound are held fixed this step
        let mut free = Vec::new();
        for i in 0..n {
            index[i] = usize::MAX;
            if lo[i] == hi[i] {
                continue;
            }
            let slack = 1e-12 * (1.0 + x[i].abs());
            let at_lo = x[i] <= lo[i] + slack && grad[i] > 0.0;
            let at_hi = x[i] >= hi[i] - slack && grad[i] < 0.0;
            if !(at_lo || at_hi) {
                index[i] = free.len();
                free.push(i);
            }
        }
        if free.is_empty() {
            return it;
        }

        let mut triplets = Vec::with_capacity(4 * g.edges().len() + free.len());
        let mut diag = vec![0.0; free.len()];
        for e in g.edges() {
            let c = model.curvature(x[e.x] - x[e.y], e.w);
            let (i, j) = (index[e.x], index[e.y]);
            if i != usize::MAX {
                diag[i] += c;
            }
            if j != usize::MAX {
                diag[j] += c;
            }
            if i != usize::MAX && j != usize::MAX {
                triplets.push((i, j, -c));
                triplets.push((j, i, -c));
            }
        }
        let shift = 1e-12 * diag.iter().cloned().fold(0.0, f64::max) + f64::MIN_POSITIVE;
        for (k, d) in diag.iter().enumerate() {
            triplets.push((k, k, d + shift));
        }
        let rhs: Vec<f64> = free.iter().map(|&i| -grad[i]).collect();

        let mut direction = vec![0.0; n];
        match solve_spd_triplets(free.len(), &triplets, &rhs) {
            Some(step) => {
                for (k, &i) in free.iter().enumerate() {
                    direction[i] = step[k];
                }
            }
            None => {
                for (k, &i) in free.iter().enumerate() {
                    direction[i] = -grad[i] / (diag[k] + shift);
                }
            }
        }

        let accepted = line_search(model, lo, hi, x, &grad, f, &direction, &mut trial)
            || {
                // diagonally scaled projected gradient as a fallback direction
                direction.fill(0.0);
                for (k, &i) in free.iter().enumerate() {
                    direction[i] = -grad[i] / (diag[k] + shift);
                }
                line_search(model, lo, hi, x, &grad, f, &direction, &mut trial)
            };
        if accepted {
            x.copy_from_slice(&trial);
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= 2 {
                return it + 1;
            }
        }
    }
    max_iter
}

#[allow(clippy::too_many_arguments)]
fn line_search(
    model: &Smoothed<'_>,
    lo: &[f64],
    hi: &[f64],
    x: &[f64],
    grad: &[f64],
    f: f64,
    direction: &[f64],
    trial: &mut [f64],
) -> bool {
    let mut step = 1.0;
    for _ in 0..60 {
        let mut decrease = 0.0;
        let mut moved = false;
        for i in 0..x.len() {
            trial[i] = (x[i] + step * direction[i]).clamp(lo[i], hi[i]);
            let dx = trial[i] - x[i];
            moved |= dx != 0.0;
            decrease += grad[i] * dx;
        }
        if !moved {
            return false;
        }
        let ft = model.energy(trial);
        if decrease < 0.0 && ft <= f + 1e-4 * decrease + 4.0 * f64::EPSILON * f.abs() {
            return true;
        }
        step *= 0.5;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn set(g: &WeightedGraph, v: &[usize]) -> VertexSet {
        VertexSet::new(g, v.iter().copied()).unwrap()
    }

    /// Golden-section search for the middle value on path 0-1-2; independent
    /// of the solver.
    fn golden_path3(p: f64) -> f64 {
        let f = |t: f64| (1.0 - t).abs().powf(p) + t.abs().powf(p);
        let (mut a, mut b) = (0.0, 1.0);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    #[test]
    fn single_edge_is_its_weight() {
        let g = WeightedGraph::new(2, [(0, 1, 3.5)], vec![1.0; 2], []).unwrap();
        for p in [1.2, 2.0, 3.0, 5.0] {
            let r = capacity(&g, &set(&g, &[0]), &set(&g, &[1]), p, 1e-8).unwrap();
            assert_relative_eq!(r.value, 3.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn path3_values() {
        let g = WeightedGraph::unit(3, [(0, 1), (1, 2)], [0, 2]).unwrap();
        let (a, b) = (set(&g, &[0]), set(&g, &[2]));
        let r2 = capacity(&g, &a, &b, 2.0, 1e-8).unwrap();
        assert_relative_eq!(r2.value, 0.5, max_relative = 1e-12);
        let r3 = capacity(&g, &a, &b, 3.0, 1e-8).unwrap();
        let oracle = golden_path3(3.0);
        assert_relative_eq!(oracle, 0.25, max_relative = 1e-12);
        assert_relative_eq!(r3.value, 0.25, max_relative = 1e-10);
        assert!(r3.kkt_residual <= 1e-8);
        let r15 = capacity(&g, &a, &b, 1.5, 1e-8).unwrap();
        assert_relative_eq!(r15.value, golden_path3(1.5), max_relative = 1e-9);
    }

    #[test]
    fn p2_oracle_examples() {
        let g = WeightedGraph::new(2, [(0, 1, 3.0)], vec![1.0; 2], []).unwrap();
        assert_relative_eq!(capacity_p2_oracle(&g, &set(&g, &[0]), &set(&g, &[1])).unwrap().value, 3.0);
        let g = WeightedGraph::unit(3, [(0, 1), (1, 2)], []).unwrap();
        assert_relative_eq!(capacity_p2_oracle(&g, &set(&g, &[0]), &set(&g, &[2])).unwrap().value, 0.5);
        let g = WeightedGraph::unit(4, [(0, 1), (1, 2), (2, 3), (3, 0)], []).unwrap();
        let r = capacity_p2_oracle(&g, &set(&g, &[0]), &set(&g, &[2])).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-14);
        assert_eq!(r.mode, CapacityMode::LinearP2);
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(path_capacity_closed_form(&[1.0, 1.0], 2.0).unwrap(), 0.5);
        assert_relative_eq!(path_capacity_closed_form(&[1.0, 1.0], 3.0).unwrap(), 0.25);
        assert_relative_eq!(path_capacity_closed_form(&[1.0, 2.0, 4.0], 2.0).unwrap(), 4.0 / 7.0);
        assert!(path_capacity_closed_form(&[1.0, 0.0], 2.0).is_err());
        assert!(path_capacity_closed_form(&[], 2.0).is_err());
    }

    #[test]
    fn conventions() {
        let g = WeightedGraph::unit(3, [(0, 1), (1, 2)], []).unwrap();
        let r = capacity(&g, &set(&g, &[0, 1]), &set(&g, &[1]), 2.0, 1e-8).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        let r = capacity(&g, &set(&g, &[]), &set(&g, &[1]), 2.0, 1e-8).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.mode, CapacityMode::Convention);
        assert!(capacity(&g, &set(&g, &[0]), &set(&g, &[1]), 0.5, 1e-8).is_err());
    }

    #[test]
    fn potential_is_clamped_and_pinned() {
        let g = WeightedGraph::unit(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)], []).unwrap();
        let r = capacity(&g, &set(&g, &[0]), &set(&g, &[4]), 1.7, 1e-8).unwrap();
        let u = r.potential.unwrap();
        assert_eq!(u[0], 1.0);
        assert_eq!(u[4], 0.0);
        assert!(u.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_relative_eq!(r.value, crate::graph::p_energy(&g, &u, 1.7).unwrap());
    }

    #[test]
    fn truncation_examples() {
        let g = WeightedGraph::unit(2, [(0, 1)], []).unwrap();
        let rep = truncation_invariance_check(&g, &set(&g, &[0]), &set(&g, &[1]), 2.5).unwrap();
        assert_eq!(rep.relative_gap, 0.0);
        let g = WeightedGraph::unit(3, [(0, 1), (1, 2)], []).unwrap();
        let rep = truncation_invariance_check(&g, &set(&g, &[0]), &set(&g, &[2]), 2.0).unwrap();
        assert!(rep.relative_gap < 1e-8);
        assert_relative_eq!(rep.one_sided, 0.5, max_relative = 1e-8);
    }
}
