//! Steklov and Neumann (p, α)-Sobolev constants.
//!
//! For a measure `m` (boundary areas `nu` in Steklov mode, volumes `mu` in
//! Neumann mode) and `q = p * alpha` the quotient of a nonconstant `f` is
//!
//! ```text
//! Q(f) = E_p(f) / ( min_c sum_x m(x) |f(x) - c|^q )^(1/alpha)
//! ```
//!
//! and the Sobolev constant is its infimum. At `alpha = 1` the infimum is the
//! first nontrivial p-Laplacian eigenvalue of the corresponding problem.
//!
//! Away from `p = 2, alpha = 1` the quotient is not convex, so the multistart
//! descent only certifies an upper bound. At `p = 2, alpha = 1` the problem is
//! a symmetric generalized eigenproblem and is solved exactly.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{check_exponent, energy_raw, gradient_raw, Measure, VertexFunction, WeightedGraph};
use crate::linalg::{generalized_sym_eigen, laplacian};
use crate::rng;

/// Which quotient: boundary trace (Steklov) or whole function (Neumann).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SobolevMode {
    Steklov,
    Neumann,
}

impl SobolevMode {
    pub fn measure(self) -> Measure {
        match self {
            Self::Steklov => Measure::Boundary,
            Self::Neumann => Measure::Volume,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMode {
    DescentMultistart,
    LinearP2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// The value is attained by `extremal`, so it bounds the infimum from above.
    UpperBoundOnly,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevResult {
    pub value: f64,
    pub extremal: VertexFunction,
    pub recenter_c: f64,
    pub mode: SpectralMode,
    pub certified: Certification,
    pub starts: usize,
    /// Quotient after every accepted step of the winning start.
    pub history: Vec<f64>,
    /// Final quotient of every start, in start order.
    pub start_values: Vec<f64>,
    /// Relative residual of the weak eigen-equation; set by [`first_eigenvalue`].
    pub weak_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SobolevOptions {
    pub starts: usize,
    /// Stop a start once the relative quotient decrease stays below this for
    /// three consecutive iterations.
    pub tol: f64,
    pub seed: u64,
    pub max_iterations: usize,
    /// Take the exact eigen-solve at `p = 2, alpha = 1`.
    pub use_oracle: bool,
    /// Seed the first start with the `p = 2` eigenvector.
    pub oracle_start: bool,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            tol: 1e-10,
            seed: 0,
            max_iterations: 100_000,
            use_oracle: true,
            oracle_start: true,
        }
    }
}

/// Minimizes `sum_x w(x) |f(x) - c|^q` over `c`. Returns `(c, moment)`.
///
/// At `q = 1` every weighted median is optimal; the midpoint of the optimal
/// interval is returned.
pub fn recenter(g: &WeightedGraph, f: &VertexFunction, q: f64, measure: Measure) -> Result<(f64, f64)> {
    f.check_on(g)?;
    if !(q.is_finite() && q >= 1.0) {
        return invalid(format!("moment exponent q = {q} must be at least 1"));
    }
    let weights = g.measure_weights(measure);
    let support = g.support(measure);
    if support.is_empty() {
        return invalid("measure has empty support");
    }
    let values: Vec<f64> = support.iter().map(|&v| f[v]).collect();
    let w: Vec<f64> = support.iter().map(|&v| weights[v]).collect();
    let c = optimal_center(&values, &w, q, None);
    Ok((c, moment(&values, &w, q, c)))
}

fn moment(values: &[f64], w: &[f64], q: f64, c: f64) -> f64 {
    values.iter().zip(w).map(|(x, m)| m * (x - c).abs().powf(q)).sum()
}

pub(crate) fn optimal_center(values: &[f64], w: &[f64], q: f64, warm: Option<f64>) -> f64 {
    if q == 2.0 {
        let total: f64 = w.iter().sum();
        return values.iter().zip(w).map(|(x, m)| x * m).sum::<f64>() / total;
    }
    if q == 1.0 {
        return weighted_median_midpoint(values, w);
    }
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo == 0.0 {
        return lo;
    }
    // phi(c) = sum w sign(x - c) |x - c|^(q-1) is decreasing; its root is the center
    let phi = |c: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for (x, m) in values.iter().zip(w) {
            let d = x - c;
            let a = d.abs();
            if a > 0.0 {
                s += m * a.powf(q - 1.0) * d.signum();
                ds += m * (q - 1.0) * a.powf(q - 2.0);
            }
        }
        (s, -ds)
    };
    let mut c = warm.filter(|c| *c > lo && *c < hi).unwrap_or(0.5 * (lo + hi));
    for _ in 0..200 {
        let (s, ds) = phi(c);
        if s == 0.0 {
            return c;
        }
        if s > 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        let newton = c - s / ds;
        c = if ds.is_finite() && ds < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if (c - lo).min(hi - c) <= f64::EPSILON * c.abs() && s.abs() < 1e-15 {
            break;
        }
    }
    c
}

fn weighted_median_midpoint(values: &[f64], w: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let total: f64 = w.iter().sum();
    let half = 0.5 * total;
    let mut acc = 0.0;
    for (k, &i) in order.iter().enumerate() {
        acc += w[i];
        if acc > half {
            return values[i];
        }
        if acc == half {
            // every point between this value and the next is optimal
            let next = order.get(k + 1).map_or(values[i], |&j| values[j]);
            return 0.5 * (values[i] + next);
        }
    }
    values[*order.last().expect("non-empty support")]
}

/// The quotient with its moment data on a fixed graph and mode.
struct Quotient<'a> {
    g: &'a WeightedGraph,
    p: f64,
    alpha: f64,
    q: f64,
    support: Vec<usize>,
    weights: Vec<f64>,
}

struct Eval {
    value: f64,
    center: f64,
    denom: f64,
}

impl<'a> Quotient<'a> {
    fn new(g: &'a WeightedGraph, p: f64, alpha: f64, mode: SobolevMode) -> Result<Self> {
        check_exponent(p)?;
        if !(alpha.is_finite() && p * alpha >= 1.0 - 1e-12) {
            return invalid(format!("alpha = {alpha} must satisfy alpha >= 1/p"));
        }
        let measure = mode.measure();
        let support = g.support(measure);
        if support.len() < 2 {
            return Err(Error::Precondition(format!(
                "{} mode needs at least two vertices carrying the measure, found {}",
                match mode {
                    SobolevMode::Steklov => "steklov",
                    SobolevMode::Neumann => "neumann",
                },
                support.len()
            )));
        }
        let all = g.measure_weights(measure);
        let weights = support.iter().map(|&v| all[v]).collect();
        Ok(Self {
            g,
            p,
            alpha,
            q: (p * alpha).max(1.0),
            support,
            weights,
        })
    }

    fn trace(&self, f: &[f64]) -> Vec<f64> {
        self.support.iter().map(|&v| f[v]).collect()
    }

    fn eval(&self, f: &[f64], warm: Option<f64>) -> Eval {
        let trace = self.trace(f);
        let center = optimal_center(&trace, &self.weights, self.q, warm);
        let denom = moment(&trace, &self.weights, self.q, center);
        let energy = energy_raw(self.g, f, self.p);
        let value = if denom > 0.0 {
            energy / denom.powf(1.0 / self.alpha)
        } else {
            f64::INFINITY
        };
        Eval { value, center, denom }
    }

    /// Gradient of the quotient at `f`, given its evaluation.
    fn gradient(&self, f: &[f64], ev: &Eval, out: &mut [f64]) {
        gradient_raw(self.g, f, self.p, out);
        let scale = ev.denom.powf(-1.0 / self.alpha);
        let energy = ev.value / scale;
        let coef = energy / (self.alpha * ev.denom);
        for o in out.iter_mut() {
            *o *= scale;
        }
        for (k, &v) in self.support.iter().enumerate() {
            let d = f[v] - ev.center;
            let dm = if d == 0.0 {
                0.0
            } else {
                self.q * self.weights[k] * d.abs().powf(self.q - 1.0) * d.signum()
            };
            out[v] -= scale * coef * dm;
        }
    }

    /// Shift to center 0 and scale to unit moment. Leaves the quotient unchanged.
    fn normalize(&self, f: &mut [f64], ev: &Eval) -> f64 {
        let s = ev.denom.powf(-1.0 / self.q);
        for x in f.iter_mut() {
            *x = (*x - ev.center) * s;
        }
        s
    }
}

/// Best quotient over `starts` descents, or the exact eigen-solve when
/// `p = 2`, `alpha = 1` and the oracle is enabled.
pub fn sobolev_constant(
    g: &WeightedGraph,
    p: f64,
    alpha: f64,
    mode: SobolevMode,
    opts: &SobolevOptions,
) -> Result<SobolevResult> {
    let quotient = Quotient::new(g, p, alpha, mode)?;
    if p == 2.0 && alpha == 1.0 && opts.use_oracle {
        return p2_oracle(g, mode);
    }
    if opts.starts == 0 {
        return invalid("at least one start is required");
    }
    if !(opts.tol > 0.0) {
        return invalid(format!("tolerance {} must be positive", opts.tol));
    }
    let seeded = if opts.oracle_start {
        p2_oracle(g, mode).ok().map(|r| r.extremal.into_values())
    } else {
        None
    };
    let runs: Vec<Descent> = (0..opts.starts)
        .into_par_iter()
        .map(|k| {
            let init = match (k, &seeded) {
                (0, Some(v)) => v.clone(),
                _ => random_start(g.n(), opts.seed, k as u64),
            };
            descend(&quotient, init, opts)
        })
        .collect();
    let start_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::Numerical("no start produced a nonconstant function".into()));
    }
    Ok(SobolevResult {
        value: best.value,
        extremal: VertexFunction::from_raw(best.f),
        recenter_c: best.center,
        mode: SpectralMode::DescentMultistart,
        certified: Certification::UpperBoundOnly,
        starts: opts.starts,
        history: best.history,
        start_values,
        weak_residual: None,
    })
}

/// Runs further descents from `inits` and keeps the lowest of `base` and
/// the new runs; ties keep `base`. Exact results are returned unchanged.
pub fn refine_from(
    g: &WeightedGraph,
    p: f64,
    alpha: f64,
    mode: SobolevMode,
    base: SobolevResult,
    inits: &[VertexFunction],
    opts: &SobolevOptions,
) -> Result<SobolevResult> {
    if base.certified == Certification::Exact {
        return Ok(base);
    }
    let quotient = Quotient::new(g, p, alpha, mode)?;
    for f in inits {
        f.check_on(g)?;
    }
    let runs: Vec<Descent> = inits
        .par_iter()
        .map(|f| descend(&quotient, f.values().to_vec(), opts))
        .collect();
    let mut out = base;
    out.starts += runs.len();
    for r in runs {
        out.start_values.push(r.value);
        if r.value < out.value {
            out.value = r.value;
            out.extremal = VertexFunction::from_raw(r.f);
            out.recenter_c = r.center;
            out.history = r.history;
        }
    }
    Ok(out)
}

fn random_start(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, "spectral-start", index);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

struct Descent {
    value: f64,
    f: Vec<f64>,
    center: f64,
    history: Vec<f64>,
}

const MEMORY: usize = 8;

/// L-BFGS on the quotient with Armijo backtracking; the iterate is
/// renormalized (zero center, unit moment) after each accepted step.
fn descend(quot: &Quotient<'_>, mut f: Vec<f64>, opts: &SobolevOptions) -> Descent {
    let n = f.len();
    let mut ev = quot.eval(&f, None);
    if !ev.value.is_finite() {
        return Descent {
            value: f64::INFINITY,
            f,
            center: 0.0,
            history: Vec::new(),
        };
    }
    quot.normalize(&mut f, &ev);
    ev = quot.eval(&f, Some(0.0));
    let mut grad = vec![0.0; n];
    quot.gradient(&f, &ev, &mut grad);
    let mut history = vec![ev.value];
    let mut pairs: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::with_capacity(MEMORY);
    let mut quiet = 0;
    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];

    for _ in 0..opts.max_iterations {
        let mut dir = two_loop(&grad, &pairs);
        let mut slope: f64 = dir.iter().zip(&grad).map(|(d, g)| d * g).sum();
        if !(slope < 0.0) {
            pairs.clear();
            dir = grad.iter().map(|g| -g).collect();
            slope = -grad.iter().map(|g| g * g).sum::<f64>();
        }
        if slope == 0.0 {
            break;
        }
        // first step of a fresh start: keep the move small relative to f
        let mut step = if pairs.is_empty() {
            let fnorm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dnorm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            (0.1 * fnorm / dnorm).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = f[i] + step * dir[i];
            }
            let tev = quot.eval(&trial, Some(ev.center));
            if tev.value <= ev.value + 1e-4 * step * slope && tev.value < ev.value {
                accepted = Some(tev);
                break;
            }
            step *= 0.5;
        }
        let Some(tev) = accepted else { break };

        quot.gradient(&trial, &tev, &mut trial_grad);
        let s: Vec<f64> = (0..n).map(|i| trial[i] - f[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| trial_grad[i] - grad[i]).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-16 * s.iter().map(|x| x * x).sum::<f64>().sqrt() * y.iter().map(|x| x * x).sum::<f64>().sqrt() {
            if pairs.len() == MEMORY {
                pairs.remove(0);
            }
            pairs.push((s, y, 1.0 / sy));
        }

        let decrease = (ev.value - tev.value) / ev.value.abs().max(f64::MIN_POSITIVE);
        f.copy_from_slice(&trial);
        let scale = quot.normalize(&mut f, &tev);
        ev = quot.eval(&f, Some(0.0));
        quot.gradient(&f, &ev, &mut grad);
        if (scale - 1.0).abs() > 0.1 {
            pairs.clear();
        }
        // renormalization may perturb the last digit; keep the record monotone
        let last = *history.last().expect("non-empty");
        history.push(ev.value.min(last));

        if decrease < opts.tol {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let value = *history.last().expect("non-empty");
    Descent {
        value,
        center: ev.center,
        f,
        history,
    }
}

fn two_loop(grad: &[f64], pairs: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = vec![0.0; pairs.len()];
    for (k, (s, y, rho)) in pairs.iter().enumerate().rev() {
        let a = rho * s.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>();
        alphas[k] = a;
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
    }
    if let Some((s, y, _)) = pairs.last() {
        let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|x| x * x).sum();
        let gamma = sy / yy;
        q.iter_mut().for_each(|x| *x *= gamma);
    }
    for (k, (s, y, rho)) in pairs.iter().enumerate() {
        let b = rho * y.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>();
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (alphas[k] - b) * si);
    }
    q.iter_mut().for_each(|x| *x = -*x);
    q
}

fn p2_oracle(g: &WeightedGraph, mode: SobolevMode) -> Result<SobolevResult> {
    match mode {
        SobolevMode::Steklov => steklov_p2_oracle(g),
        SobolevMode::Neumann => neumann_p2_oracle(g),
    }
}

fn exact_result(value: f64, extremal: Vec<f64>, center: f64) -> SobolevResult {
    SobolevResult {
        value,
        extremal: VertexFunction::from_raw(extremal),
        recenter_c: center,
        mode: SpectralMode::LinearP2,
        certified: Certification::Exact,
        starts: 0,
        history: vec![value],
        start_values: Vec::new(),
        weak_residual: None,
    }
}

/// First nontrivial eigenvalue of the discrete Dirichlet-to-Neumann map:
/// interior vertices are eliminated by a Schur complement of the Laplacian,
/// then the boundary pencil is solved against `diag(nu)`.
pub fn steklov_p2_oracle(g: &WeightedGraph) -> Result<SobolevResult> {
    let bnd = g.boundary();
    if bnd.len() < 2 {
        return Err(Error::Precondition(format!(
            "steklov problem needs at least two boundary vertices, found {}",
            bnd.len()
        )));
    }
    let interior = g.interior();
    let l = laplacian(g);
    let pick = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| l[(rows[i], cols[j])])
    };
    let lbb = pick(bnd, bnd);
    let (schur, extension) = if interior.is_empty() {
        (lbb, None)
    } else {
        let lii = pick(&interior, &interior);
        let lib = pick(&interior, bnd);
        let chol = lii
            .cholesky()
            .ok_or_else(|| Error::Numerical("interior Laplacian block is singular".into()))?;
        // X = L_II^{-1} L_IB, so S = L_BB - L_BI X and u_I = -X u_B
        let x = chol.solve(&lib);
        (&lbb - lib.transpose() * &x, Some(x))
    };
    let (vals, vecs) = generalized_sym_eigen(&schur, g.nu());
    let sigma = vals[1].max(0.0);
    let trace = vecs.column(1).into_owned();
    let mut f = vec![0.0; g.n()];
    for (k, &v) in bnd.iter().enumerate() {
        f[v] = trace[k];
    }
    if let Some(x) = extension {
        let inner = -(x * &trace);
        for (k, &v) in interior.iter().enumerate() {
            f[v] = inner[k];
        }
    }
    let nu = g.nu();
    let center = trace.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>() / nu.iter().sum::<f64>();
    Ok(exact_result(sigma, f, center))
}

/// First nontrivial eigenvalue of the pencil `(L, diag(mu))`.
pub fn neumann_p2_oracle(g: &WeightedGraph) -> Result<SobolevResult> {
    if g.n() < 2 {
        return Err(Error::Precondition("neumann problem needs at least two vertices".into()));
    }
    let (vals, vecs) = generalized_sym_eigen(&laplacian(g), g.mu());
    let f: Vec<f64> = vecs.column(1).iter().copied().collect();
    let mu = g.mu();
    let center = f.iter().zip(mu).map(|(a, b)| a * b).sum::<f64>() / mu.iter().sum::<f64>();
    Ok(exact_result(vals[1].max(0.0), f, center))
}

/// The `alpha = 1` Sobolev constant with the weak-equation residual of its
/// extremal.
///
/// With `u = extremal - c` the residual vector is
/// `(1/p) dE_p/du(x) - value * m(x) |u(x)|^(p-2) u(x)`, reported in max norm
/// relative to the larger of its two terms. In Steklov mode `m` vanishes in
/// the interior, so there it is the interior p-Laplacian residual.
pub fn first_eigenvalue(g: &WeightedGraph, p: f64, mode: SobolevMode, opts: &SobolevOptions) -> Result<SobolevResult> {
    let mut result = sobolev_constant(g, p, 1.0, mode, opts)?;
    result.weak_residual = Some(weak_residual(g, p, mode, &result));
    Ok(result)
}

fn weak_residual(g: &WeightedGraph, p: f64, mode: SobolevMode, r: &SobolevResult) -> f64 {
    let m = g.measure_weights(mode.measure());
    let u: Vec<f64> = r.extremal.values().iter().map(|x| x - r.recenter_c).collect();
    let mut grad = vec![0.0; g.n()];
    gradient_raw(g, &u, p, &mut grad);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for v in 0..g.n() {
        let lhs = grad[v] / p;
        let rhs = r.value * m[v] * u[v].abs().powf(p - 1.0) * u[v].signum();
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs()).max(rhs.abs());
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Quotient of an arbitrary function. `+inf` for functions constant on the
/// measure's support.
pub fn rayleigh_quotient(g: &WeightedGraph, f: &VertexFunction, p: f64, alpha: f64, mode: SobolevMode) -> Result<f64> {
    f.check_on(g)?;
    let quotient = Quotient::new(g, p, alpha, mode)?;
    Ok(quotient.eval(f.values(), None).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vf(v: &[f64]) -> VertexFunction {
        VertexFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn recenter_examples() {
        let g = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        let (c, m) = recenter(&g, &vf(&[1.0, 0.0]), 2.0, Measure::Boundary).unwrap();
        assert_eq!((c, m), (0.5, 0.5));
        let (c, m) = recenter(&g, &vf(&[1.0, 0.0]), 1.0, Measure::Boundary).unwrap();
        assert_eq!((c, m), (0.5, 1.0));
        let g3 = WeightedGraph::unit(3, [(0, 1), (1, 2)], [0, 1, 2]).unwrap();
        let (c, m) = recenter(&g3, &vf(&[3.0, 0.0, 0.0]), 2.0, Measure::Boundary).unwrap();
        assert_relative_eq!(c, 1.0);
        assert_relative_eq!(m, 6.0);
        assert!(recenter(&g, &vf(&[1.0, 0.0]), 0.5, Measure::Boundary).is_err());
    }

    #[test]
    fn recenter_general_exponent_is_stationary() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], vec![1.0, 2.0, 0.5, 1.5], [])
            .unwrap();
        let f = vf(&[0.3, -1.2, 2.5, 0.9]);
        for q in [1.3, 1.5, 2.7, 4.0] {
            let (c, m) = recenter(&g, &f, q, Measure::Volume).unwrap();
            let at = |c: f64| -> f64 {
                f.values().iter().zip(g.mu()).map(|(x, w)| w * (x - c).abs().powf(q)).sum()
            };
            assert_relative_eq!(m, at(c), max_relative = 1e-14);
            assert!(at(c - 1e-5) >= m && at(c + 1e-5) >= m, "q = {q}");
        }
    }

    #[test]
    fn steklov_oracle_examples() {
        let edge = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        assert_relative_eq!(steklov_p2_oracle(&edge).unwrap().value, 2.0, max_relative = 1e-14);
        let path = WeightedGraph::unit(3, [(0, 1), (1, 2)], [0, 2]).unwrap();
        let r = steklov_p2_oracle(&path).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.extremal[1], 0.5 * (r.extremal[0] + r.extremal[2]), epsilon = 1e-14);
        let cycle = WeightedGraph::unit(4, [(0, 1), (1, 2), (2, 3), (3, 0)], 0..4).unwrap();
        assert_relative_eq!(steklov_p2_oracle(&cycle).unwrap().value, 2.0, max_relative = 1e-13);
        assert_eq!(steklov_p2_oracle(&cycle).unwrap().certified, Certification::Exact);
    }

    #[test]
    fn neumann_oracle_examples() {
        let edge = WeightedGraph::unit(2, [(0, 1)], []).unwrap();
        assert_relative_eq!(neumann_p2_oracle(&edge).unwrap().value, 2.0, max_relative = 1e-14);
        let path = WeightedGraph::unit(3, [(0, 1), (1, 2)], []).unwrap();
        assert_relative_eq!(neumann_p2_oracle(&path).unwrap().value, 1.0, max_relative = 1e-14);
        let k3 = WeightedGraph::unit(3, [(0, 1), (1, 2), (0, 2)], []).unwrap();
        assert_relative_eq!(neumann_p2_oracle(&k3).unwrap().value, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn sobolev_examples() {
        let opts = SobolevOptions::default();
        let edge = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        let r = sobolev_constant(&edge, 2.0, 1.0, SobolevMode::Steklov, &opts).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-14);
        let heavy = edge.scale_weights(5.0).unwrap();
        let r = sobolev_constant(&heavy, 2.0, 1.0, SobolevMode::Steklov, &opts).unwrap();
        assert_relative_eq!(r.value, 10.0, max_relative = 1e-14);
        let path = WeightedGraph::unit(3, [(0, 1), (1, 2)], []).unwrap();
        let r = sobolev_constant(&path, 2.0, 1.0, SobolevMode::Neumann, &opts).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn first_eigenvalue_examples() {
        let opts = SobolevOptions::default();
        let edge = WeightedGraph::unit(2, [(0, 1)], [0, 1]).unwrap();
        let r = first_eigenvalue(&edge, 2.0, SobolevMode::Steklov, &opts).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-14);
        assert!(r.weak_residual.unwrap() < 1e-8);
        let path = WeightedGraph::unit(3, [(0, 1), (1, 2)], []).unwrap();
        let r = first_eigenvalue(&path, 2.0, SobolevMode::Neumann, &opts).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-14);
        assert!(r.weak_residual.unwrap() < 1e-8);
        let r = first_eigenvalue(&edge, 3.0, SobolevMode::Steklov, &opts).unwrap();
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-10);
        assert_eq!(r.certified, Certification::UpperBoundOnly);
    }

    #[test]
    fn descent_matches_oracle_from_random_starts() {
        let g = WeightedGraph::new(
            5,
            [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 1.5), (4, 0, 1.0), (1, 3, 0.7)],
            vec![1.0, 2.0, 1.0, 0.5, 1.0],
            [(0, 1.0), (2, 0.5), (4, 2.0)],
        )
        .unwrap();
        let opts = SobolevOptions {
            use_oracle: false,
            oracle_start: false,
            starts: 4,
            seed: 3,
            ..SobolevOptions::default()
        };
        for mode in [SobolevMode::Steklov, SobolevMode::Neumann] {
            let exact = p2_oracle(&g, mode).unwrap().value;
            let r = sobolev_constant(&g, 2.0, 1.0, mode, &opts).unwrap();
            assert_relative_eq!(r.value, exact, max_relative = 1e-6);
            assert!(r.value >= exact * (1.0 - 1e-12));
            assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
            let q = rayleigh_quotient(&g, &r.extremal, 2.0, 1.0, mode).unwrap();
            assert_relative_eq!(q, r.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_support() {
        let g = WeightedGraph::unit(2, [(0, 1)], [0]).unwrap();
        let opts = SobolevOptions::default();
        assert!(sobolev_constant(&g, 2.0, 1.0, SobolevMode::Steklov, &opts).is_err());
        assert!(sobolev_constant(&g, 2.0, 0.4, SobolevMode::Neumann, &opts).is_err());
    }
}
