use rayon::prelude::*;
use serde::Serialize;

use super::tolerance;
use crate::capacity::{capacity_with, CapacityOptions};
use crate::error::{invalid, Error, Result};
use crate::graph::{check_exponent, energy_raw, VertexFunction, VertexSet, WeightedGraph};

/// Piecewise constant function of a level `t >= 0`: value `values[i]` on
/// `[t_{i-1}, t_i)` with `t_{-1} = 0`, zero after the last breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    monotone: bool,
}

impl LevelProfile {
    /// Profile with nonincreasing values, such as `t -> Area({f >= t})`.
    pub fn monotone(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::build(breakpoints, values, true)
    }

    /// Profile without the monotonicity requirement, such as
    /// `t -> Cap_p({u >= t}, {u <= 0})`.
    pub fn relaxed(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::build(breakpoints, values, false)
    }

    fn build(breakpoints: Vec<f64>, values: Vec<f64>, monotone: bool) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return invalid(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            ));
        }
        let mut prev = 0.0;
        for &t in &breakpoints {
            if !(t.is_finite() && t > prev) {
                return invalid("breakpoints must be finite, positive and increasing");
            }
            prev = t;
        }
        if values.iter().any(|&a| !(a.is_finite() && a >= 0.0)) {
            return invalid("profile values must be finite and nonnegative");
        }
        if monotone && values.windows(2).any(|w| w[1] > w[0]) {
            return invalid("profile values must be nonincreasing");
        }
        Ok(Self {
            breakpoints,
            values,
            monotone,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// `(t_{i-1}, t_i, a_i)` per segment.
    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let starts = std::iter::once(0.0).chain(self.breakpoints.iter().copied());
        starts
            .zip(&self.breakpoints)
            .zip(&self.values)
            .map(|((lo, &hi), &a)| (lo, hi, a))
    }
}

/// Piecewise linear nondecreasing `t(psi)` with `t(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl MonotoneProfile {
    /// `grid` starts at 0 and increases; `values[0] = 0` and values do not
    /// decrease.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return invalid("need matching grid and values with at least two nodes");
        }
        if grid[0] != 0.0 || values[0] != 0.0 {
            return invalid("profile must start at psi = 0 with t = 0");
        }
        if grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return invalid("grid must be finite and increasing");
        }
        if values.windows(2).any(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
            return invalid("values must be finite and nondecreasing");
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Two sides of an inequality and whether it held within tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub closed_form: f64,
    pub minimized: f64,
    /// `|minimized - closed_form| / closed_form`.
    pub gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelsReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ok: bool,
}

fn check_strict_exponent(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p <= 1.0 {
        return invalid(format!("exponent p = {p} must exceed 1 here"));
    }
    Ok(())
}

/// Compares `(int_0^1 g^(-1/(p-1)) dt)^(1-p)` with the minimum of
/// `sum_i g_i |l_{i+1} - l_i|^p dt^(1-p)` over `l_0 = 0`, `l_N = 1`.
///
/// `g_i` samples `g` at the midpoints of a uniform grid with `grid_n` cells.
/// The integral uses double-exponential quadrature, which tolerates
/// integrable endpoint singularities. The discrete minimum is the capacity
/// between the two ends of the weighted path.
pub fn lemma_lfun_check(g: impl Fn(f64) -> f64 + Sync, p: f64, grid_n: usize) -> Result<LemmaReport> {
    check_strict_exponent(p)?;
    if grid_n == 0 {
        return invalid("grid needs at least one cell");
    }
    let dt = 1.0 / grid_n as f64;
    let samples: Vec<f64> = (0..grid_n).map(|i| g((i as f64 + 0.5) * dt)).collect();
    if let Some(i) = samples.iter().position(|&s| !(s.is_finite() && s > 0.0)) {
        return invalid(format!("g must be positive; sample {i} is {}", samples[i]));
    }

    let r = -1.0 / (p - 1.0);
    // t = s^2 near 0 and t = 1 - s^2 near 1 smooth out power-law endpoint
    // singularities, which the plain rule only resolves to about 1e-7
    let h = |t: f64| g(t).powf(r);
    let integrand = |s: f64| 2.0 * s * (h(s * s) + h(1.0 - s * s));
    let integral = quadrature::integrate(integrand, 0.0, 0.5f64.sqrt(), 1e-12).integral;
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::Numerical(format!(
            "integral of g^(-1/(p-1)) is not finite and positive: {integral}"
        )));
    }
    let closed_form = integral.powf(1.0 - p);

    let n = grid_n + 1;
    let scale = dt.powf(1.0 - p);
    let edges = samples.iter().enumerate().map(|(i, &s)| (i, i + 1, s * scale));
    let path = WeightedGraph::new(n, edges, vec![1.0; n], [(0, 1.0), (grid_n, 1.0)])?;
    let a = VertexSet::new(&path, [grid_n])?;
    let b = VertexSet::new(&path, [0])?;
    let opts = CapacityOptions::with_tol(1e-10);
    let minimized = capacity_with(&path, &a, &b, p, &opts)?.value;
    Ok(LemmaReport {
        closed_form,
        minimized,
        gap: (minimized - closed_form).abs() / closed_form,
    })
}

/// Compares `sum_i Cap_p({u >= t_i}, {u <= 0}) (t_i^p - t_{i-1}^p)` over the
/// distinct positive values `t_i` of `u` with `p^p / (p-1)^(p-1) E_p(u)`.
///
/// Both sides are zero when `u` has no positive value or no value `<= 0`
/// on the left.
pub fn prop_capacity_levels_check(g: &WeightedGraph, u: &VertexFunction, p: f64) -> Result<LevelsReport> {
    check_strict_exponent(p)?;
    u.check_on(g)?;
    let rhs = p.powf(p) / (p - 1.0).powf(p - 1.0) * energy_raw(g, u.values(), p);
    let zero: Vec<usize> = (0..g.n()).filter(|&v| u[v] <= 0.0).collect();
    let mut levels: Vec<f64> = u.values().iter().copied().filter(|&x| x > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let lhs = if zero.is_empty() || levels.is_empty() {
        0.0
    } else {
        let b = VertexSet::new(g, zero)?;
        let opts = CapacityOptions::with_tol(1e-10);
        let caps: Vec<f64> = levels
            .par_iter()
            .map(|&t| {
                let a = VertexSet::new(g, (0..g.n()).filter(|&v| u[v] >= t))?;
                Ok(capacity_with(g, &a, &b, p, &opts)?.value)
            })
            .collect::<Result<_>>()?;
        let mut prev = 0.0;
        let mut sum = 0.0;
        for (&t, cap) in levels.iter().zip(caps) {
            let tp = t.powf(p);
            sum += cap * (tp - prev);
            prev = tp;
        }
        sum
    };
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(LevelsReport {
        lhs,
        rhs,
        ratio,
        ok: lhs <= rhs + tolerance(rhs),
    })
}

/// Compares `(int a(t)^(1/alpha) d(t^p))^alpha` with
/// `p alpha int t^(p alpha - 1) a(t) dt`, both integrated exactly per segment.
///
/// Any `alpha >= 1/p` is accepted, including `alpha < 1`.
pub fn layer_cake_check(profile: &LevelProfile, p: f64, alpha: f64) -> Result<InequalityReport> {
    check_exponent(p)?;
    if !(alpha.is_finite() && alpha * p >= 1.0) {
        return invalid(format!("alpha = {alpha} must be at least 1/p"));
    }
    if !profile.is_monotone() {
        return invalid("layer-cake comparison needs a nonincreasing profile");
    }
    let mut inner = 0.0;
    let mut rhs = 0.0;
    let pa = p * alpha;
    for (lo, hi, a) in profile.segments() {
        inner += a.powf(1.0 / alpha) * (hi.powf(p) - lo.powf(p));
        rhs += a * (hi.powf(pa) - lo.powf(pa));
    }
    let lhs = inner.powf(alpha);
    Ok(InequalityReport {
        lhs,
        rhs,
        ok: lhs >= rhs - tolerance(rhs),
    })
}

/// Compares `int_0^Psi (t(psi)/psi)^p dpsi` with
/// `(p/(p-1))^p int_0^Psi t'(psi)^p dpsi`.
///
/// The right side is exact. On the first cell `t / psi` is the constant
/// first slope, so that cell is exact too; later cells use adaptive
/// quadrature on a smooth integrand.
pub fn hardy_check(profile: &MonotoneProfile, p: f64) -> Result<InequalityReport> {
    check_strict_exponent(p)?;
    let (grid, t) = (&profile.grid, &profile.values);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 1..grid.len() {
        let (a, b) = (grid[i - 1], grid[i]);
        let slope = (t[i] - t[i - 1]) / (b - a);
        rhs += slope.powf(p) * (b - a);
        lhs += if i == 1 {
            slope.powf(p) * b
        } else {
            let t0 = t[i - 1];
            let f = |x: f64| ((t0 + slope * (x - a)) / x).powf(p);
            let scale = f(a).max(f(b)) * (b - a);
            quadrature::integrate(f, a, b, 1e-14 * scale.max(f64::MIN_POSITIVE)).integral
        };
    }
    let rhs = (p / (p - 1.0)).powf(p) * rhs;
    Ok(InequalityReport {
        lhs,
        rhs,
        ok: lhs <= rhs + tolerance(rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lemma_constant_weights() {
        let r = lemma_lfun_check(|_| 1.0, 2.0, 50).unwrap();
        assert!(close(r.closed_form, 1.0, 1e-12));
        assert!(close(r.minimized, 1.0, 1e-9), "{r:?}");
        let r = lemma_lfun_check(|_| 4.0, 2.0, 20).unwrap();
        assert!(close(r.closed_form, 4.0, 1e-12) && close(r.minimized, 4.0, 1e-9));
        let r = lemma_lfun_check(|_| 1.0, 3.0, 7).unwrap();
        assert!(r.gap < 1e-9);
    }

    #[test]
    fn lemma_singular_weight() {
        // int_0^1 t^(-1/2) dt = 2, so the closed form is 2^(-2)
        let r = lemma_lfun_check(|t| t, 3.0, 200).unwrap();
        assert!(close(r.closed_form, 0.25, 1e-10), "{r:?}");
        assert!(r.minimized > r.closed_form);
        assert!(lemma_lfun_check(|_| 0.0, 2.0, 4).is_err());
        assert!(lemma_lfun_check(|_| 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn levels_single_edge() {
        let g = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        let u = VertexFunction::new(vec![1.0, 0.0]).unwrap();
        let r = prop_capacity_levels_check(&g, &u, 2.0).unwrap();
        assert!(close(r.lhs, 1.0, 1e-9) && close(r.rhs, 4.0, 1e-14) && r.ok);
        let r = prop_capacity_levels_check(&g, &u, 3.0).unwrap();
        assert!(close(r.lhs, 1.0, 1e-9) && close(r.rhs, 6.75, 1e-14) && r.ok);
        let pos = VertexFunction::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(prop_capacity_levels_check(&g, &pos, 2.0).unwrap().lhs, 0.0);
    }

    #[test]
    fn layer_cake_constant_profiles() {
        let prof = LevelProfile::monotone(vec![1.0], vec![1.0]).unwrap();
        for (p, alpha) in [(2.0, 1.0), (2.0, 2.0), (1.5, 1.0), (3.0, 0.5)] {
            let r = layer_cake_check(&prof, p, alpha).unwrap();
            assert!(close(r.lhs, 1.0, 1e-14) && close(r.rhs, 1.0, 1e-14) && r.ok);
        }
        let prof = LevelProfile::monotone(vec![0.7], vec![2.5]).unwrap();
        let r = layer_cake_check(&prof, 1.5, 2.0).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12);
        assert!(LevelProfile::monotone(vec![1.0, 2.0], vec![1.0, 2.0]).is_err());
        let relaxed = LevelProfile::relaxed(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
        assert!(layer_cake_check(&relaxed, 2.0, 1.0).is_err());
        assert!(layer_cake_check(&prof, 2.0, 0.4).is_err());
    }

    #[test]
    fn hardy_examples() {
        let lin = MonotoneProfile::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let r = hardy_check(&lin, 2.0).unwrap();
        assert!(close(r.lhs, 1.0, 1e-14) && close(r.rhs, 4.0, 1e-14) && r.ok);
        let flat = MonotoneProfile::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 0.0]).unwrap();
        let r = hardy_check(&flat, 3.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.ok);
        // t = 0 on [0, 1], then slope 1: lhs = int_1^2 ((x-1)/x)^2 = 3/2 - 2 ln 2
        let kink = MonotoneProfile::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0]).unwrap();
        let r = hardy_check(&kink, 2.0).unwrap();
        assert!(close(r.lhs, 1.5 - 2.0 * 2f64.ln(), 1e-12), "{r:?}");
        assert!(MonotoneProfile::new(vec![0.0, 1.0], vec![0.5, 1.0]).is_err());
    }
}
