//! Central-path geometry: refined path points, vertex enumeration, the max
//! central path and its breakpoint curves, straight-line complexity and
//! polarization diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{solve_square, vecops, DenseMatrix};
use crate::lls::{Partition, Side};
use crate::model::{Iterate, SubspaceForm};
use crate::scalar::Scalar;
use crate::steps::{affine_direction_in, corrector_direction_in, step_length_affine, step_point, LocalGeometry};

pub const CENTER_TOL: f64 = 1e-12;
const REFINE_CAP: usize = 50;
const MAX_VARS: usize = 14;
const MAX_SUBSETS: u128 = 1_000_000;

/// A point on the central path, refined to `CENTER_TOL`.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralPathSample<T> {
    pub mu: T,
    pub x: Vec<T>,
    pub s: Vec<T>,
}

impl<T: Scalar> CentralPathSample<T> {
    pub fn iterate(&self) -> Iterate<T> {
        Iterate::new(self.x.clone(), self.s.clone()).expect("positive sample")
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

fn center_tol<T: Scalar>() -> T {
    T::lit(CENTER_TOL).max(T::lit(64.0) * T::epsilon())
}

fn corrector_step<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>, alpha: T) -> Option<Iterate<T>> {
    let geom = LocalGeometry::new(z, sub);
    let dir = corrector_direction_in(&geom, z);
    let (x, s) = step_point(z, &dir, alpha);
    Iterate::new(x, s).ok()
}

/// Repeated full corrector steps until `centrality_err ≤ 1e-12`.
pub fn refine_to_center<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Result<CentralPathSample<T>> {
    let tol = center_tol::<T>();
    let mut cur = z.clone();
    for k in 0..=REFINE_CAP {
        if cur.centrality_err <= tol {
            return Ok(CentralPathSample { mu: cur.mu_bar, x: cur.x, s: cur.s });
        }
        if k == REFINE_CAP {
            break;
        }
        cur = corrector_step(&cur, sub, T::one()).ok_or(Error::NoConvergence(k + 1))?;
    }
    Err(Error::NoConvergence(REFINE_CAP))
}

fn log_barrier<T: Scalar>(z: &Iterate<T>) -> T {
    z.x.iter().zip(&z.s).map(|(&a, &b)| -(a * b).ln()).sum()
}

/// Damped corrector steps with backtracking on `−Σ log(x_i s_i)`, then
/// [`refine_to_center`]. Works from any strictly feasible pair.
pub fn center_from<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Result<CentralPathSample<T>> {
    let mut cur = z.clone();
    let switch = T::lit(0.1);
    for k in 0..500 {
        if cur.centrality_err <= switch {
            return refine_to_center(&cur, sub);
        }
        let phi = log_barrier(&cur);
        let mut alpha = T::one();
        let mut next = None;
        while alpha > T::lit(1e-12) {
            if let Some(c) = corrector_step(&cur, sub, alpha) {
                if log_barrier(&c) < phi {
                    next = Some(c);
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        cur = next.ok_or(Error::NoConvergence(k + 1))?;
    }
    Err(Error::NoConvergence(500))
}

/// Walks the central path down to `mu_target` with predictor-corrector steps.
pub fn path_sample<T: Scalar>(
    sub: &SubspaceForm<T>,
    seed: &CentralPathSample<T>,
    mu_target: T,
) -> Result<CentralPathSample<T>> {
    if !(mu_target > T::zero() && mu_target <= seed.mu * (T::one() + T::lit(1e-12))) {
        return Err(Error::InvalidInstance(format!("mu_target {} not in (0, {}]", mu_target, seed.mu)));
    }
    let beta = T::lit(0.125);
    let mut z = seed.iterate();
    let close = |mu: T| mu <= mu_target * (T::one() + T::lit(1e-12));
    let mut steps = 0usize;
    while !close(z.mu_bar) {
        steps += 1;
        if steps > 100_000 {
            return Err(Error::NoConvergence(steps));
        }
        let geom = LocalGeometry::new(&z, sub);
        let dir = affine_direction_in(&geom, &z);
        let floor = T::one() - mu_target / z.mu_bar;
        let alpha = step_length_affine(&z, &dir, beta).min(floor);
        let (x, s) = step_point(&z, &dir, alpha);
        let zp = Iterate::new(x, s).map_err(|_| Error::NoConvergence(steps))?;
        z = corrector_step(&zp, sub, T::one()).ok_or(Error::NoConvergence(steps))?;
        if alpha >= floor {
            break;
        }
    }
    refine_to_center(&z, sub)
}

/// Samples at `mus` (decreasing), each walked from the previous one.
pub fn path_samples<T: Scalar>(
    sub: &SubspaceForm<T>,
    start: &CentralPathSample<T>,
    mus: &[T],
) -> Result<Vec<CentralPathSample<T>>> {
    let mut out: Vec<CentralPathSample<T>> = Vec::with_capacity(mus.len());
    for &mu in mus {
        let from = out.last().unwrap_or(start);
        out.push(path_sample(sub, from, mu)?);
    }
    Ok(out)
}

/// `count` values from `hi` down to `lo`, log-spaced.
pub fn geometric_grid(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![hi],
        _ => {
            let (a, b) = (hi.ln(), lo.ln());
            (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn guard(n: usize, rows: usize) -> Result<()> {
    let subsets = binomial(n, rows);
    if n > MAX_VARS + 1 || subsets > MAX_SUBSETS {
        return Err(Error::TooLarge(format!(
            "vertex enumeration over {n} variables and {rows} rows needs {subsets} bases"
        )));
    }
    Ok(())
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < n - k + pos {
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Basic feasible solutions of `{x ≥ 0 : Mx = r}` for full-row-rank `M`.
pub fn standard_form_vertices<T: Scalar>(m: &DenseMatrix<T>, r: &[T]) -> Result<Vec<Vec<T>>> {
    let (rows, n) = m.shape();
    guard(n, rows)?;
    let scale = T::one() + vecops::norm_inf(r);
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut push = |v: Vec<T>| {
        let vscale = T::one() + vecops::norm_inf(&v);
        if !out.iter().any(|u| vecops::norm_inf(&vecops::sub(u, &v)) <= T::lit(1e-9) * vscale) {
            out.push(v);
        }
    };
    if rows == 0 {
        push(vec![T::zero(); n]);
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..rows).collect();
    loop {
        let basis = m.select_cols(&idx);
        if let Some(xb) = solve_square(&basis, r, T::lit(1e-11)) {
            let residual = vecops::norm_inf(&vecops::sub(&basis.mul_vec(&xb), r));
            if xb.iter().all(|&v| v >= T::lit(-1e-10) * scale) && residual <= T::lit(1e-9) * scale {
                let mut v = vecops::scatter(n, &idx, &xb);
                v.iter_mut().for_each(|e| *e = e.max(T::zero()));
                push(v);
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(out)
}

/// Dual polyhedron `{s ≥ 0 : s ∈ W⊥ + c}` as `{s ≥ 0 : Wᵀs = Wᵀc}`.
fn dual_standard_form<T: Scalar>(sub: &SubspaceForm<T>) -> (DenseMatrix<T>, Vec<T>) {
    let wt = if sub.w.dim() == 0 {
        DenseMatrix::zeros(0, sub.n())
    } else {
        DenseMatrix::from_rows(sub.w.vectors()).expect("finite")
    };
    let r = wt.mul_vec(&sub.c);
    (wt, r)
}

fn side_form<T: Scalar>(sub: &SubspaceForm<T>, side: Side) -> (DenseMatrix<T>, Vec<T>) {
    match side {
        Side::Primal => (sub.a.clone(), sub.b.clone()),
        Side::Dual => dual_standard_form(sub),
    }
}

/// Vertices of `P = {x ≥ 0 : Ax = b}`.
pub fn enumerate_vertices<T: Scalar>(sub: &SubspaceForm<T>) -> Result<Vec<Vec<T>>> {
    standard_form_vertices(&sub.a, &sub.b)
}

/// Vertices of `D = {s ≥ 0 : s ∈ W⊥ + c}`.
pub fn enumerate_dual_vertices<T: Scalar>(sub: &SubspaceForm<T>) -> Result<Vec<Vec<T>>> {
    let (m, r) = dual_standard_form(sub);
    standard_form_vertices(&m, &r)
}

/// Vertices of `P_g` (or `D_g`): the gap row `⟨other*, v⟩ + t = g` is
/// appended with a slack `t` before enumeration.
pub fn gap_level_vertices<T: Scalar>(
    sub: &SubspaceForm<T>,
    opt_pair: (&[T], &[T]),
    g: T,
    side: Side,
) -> Result<Vec<Vec<T>>> {
    let (m, r) = side_form(sub, side);
    let other = match side {
        Side::Primal => opt_pair.1,
        Side::Dual => opt_pair.0,
    };
    let n = sub.n();
    let rows = m.rows();
    let mut aug = DenseMatrix::zeros(rows + 1, n + 1);
    for i in 0..rows {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
    }
    for j in 0..n {
        aug.set(rows, j, other[j]);
    }
    aug.set(rows, n, T::one());
    let mut rhs = r;
    rhs.push(g);
    let verts = standard_form_vertices(&aug, &rhs)?;
    Ok(verts.into_iter().map(|mut v| {
        v.truncate(n);
        v
    }).collect())
}

fn check_opt_pair<T: Scalar>(opt_pair: (&[T], &[T])) -> Result<()> {
    let gap = vecops::dot(opt_pair.0, opt_pair.1);
    if gap > T::lit(1e-10) {
        return Err(Error::InvalidInstance(format!("optimal pair has gap {gap}")));
    }
    Ok(())
}

/// `max{x_i : x ∈ P, ⟨s*, x⟩ ≤ g}` (primal) or the dual analogue.
pub fn mcp_value<T: Scalar>(sub: &SubspaceForm<T>, opt_pair: (&[T], &[T]), i: usize, g: T, side: Side) -> Result<T> {
    check_opt_pair(opt_pair)?;
    if g < T::zero() {
        return Err(Error::InvalidInstance("g must be non-negative".into()));
    }
    let verts = gap_level_vertices(sub, opt_pair, g, side)?;
    verts
        .iter()
        .map(|v| v[i])
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or_else(|| Error::InvalidInstance("empty gap level set".into()))
}

/// `z^m(g)`: coordinatewise maxima over `P_g` and `D_g`.
pub fn mcp_point<T: Scalar>(sub: &SubspaceForm<T>, opt_pair: (&[T], &[T]), g: T) -> Result<(Vec<T>, Vec<T>)> {
    check_opt_pair(opt_pair)?;
    let n = sub.n();
    let mut out = Vec::with_capacity(2);
    for side in [Side::Primal, Side::Dual] {
        let verts = gap_level_vertices(sub, opt_pair, g, side)?;
        if verts.is_empty() {
            return Err(Error::InvalidInstance("empty gap level set".into()));
        }
        out.push((0..n).map(|i| verts.iter().map(|v| v[i]).fold(T::neg_infinity(), T::max)).collect());
    }
    let s = out.pop().expect("two sides");
    let x = out.pop().expect("two sides");
    Ok((x, s))
}

/// Piecewise-linear concave curve `g ↦ x^m_i(g)` (or `s^m_i`) on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCPCurve<T> {
    pub coord: usize,
    pub side: Side,
    /// Kinks `(g_k, value_k)` starting at `g = 0`.
    pub breakpoints: Vec<(T, T)>,
    /// Slope after the last breakpoint.
    pub terminal_slope: T,
    pub g_max: T,
}

impl<T: Scalar> MCPCurve<T> {
    pub fn value(&self, g: T) -> T {
        let bp = &self.breakpoints;
        let last = bp[bp.len() - 1];
        if g >= last.0 {
            return last.1 + self.terminal_slope * (g - last.0);
        }
        if g <= bp[0].0 {
            return bp[0].1;
        }
        let k = bp.partition_point(|p| p.0 <= g);
        let (a, b) = (bp[k - 1], bp[k]);
        a.1 + (b.1 - a.1) * (g - a.0) / (b.0 - a.0)
    }

    /// Number of linear pieces on `[0, g_max]`.
    pub fn pieces(&self) -> usize {
        let last = self.breakpoints[self.breakpoints.len() - 1].0;
        self.breakpoints.len() - 1 + usize::from(last < self.g_max)
    }

    pub fn slopes(&self) -> Vec<T> {
        let mut out: Vec<T> = self.breakpoints.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        out.push(self.terminal_slope);
        out
    }
}

fn cross<T: Scalar>(o: (T, T), a: (T, T), b: (T, T)) -> T {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Builds the curve from the upper hull of the 2D shadow of `P_{g_max}`.
pub fn mcp_curve<T: Scalar>(
    sub: &SubspaceForm<T>,
    opt_pair: (&[T], &[T]),
    i: usize,
    side: Side,
    g_max: T,
) -> Result<MCPCurve<T>> {
    check_opt_pair(opt_pair)?;
    if !(g_max > T::zero()) {
        return Err(Error::InvalidInstance("g_max must be positive".into()));
    }
    let other = match side {
        Side::Primal => opt_pair.1,
        Side::Dual => opt_pair.0,
    };
    let verts = gap_level_vertices(sub, opt_pair, g_max, side)?;
    if verts.is_empty() {
        return Err(Error::InvalidInstance("empty gap level set".into()));
    }
    let gscale = T::lit(1e-12) * (T::one() + g_max);
    let mut pts: Vec<(T, T)> = verts
        .iter()
        .map(|v| {
            let g = vecops::dot(other, v);
            (if g.abs() <= gscale { T::zero() } else { g.max(T::zero()) }, v[i])
        })
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.partial_cmp(&a.1).unwrap()));
    let vscale = T::one() + pts.iter().map(|p| p.1.abs()).fold(T::zero(), T::max);
    let mut hull: Vec<(T, T)> = Vec::new();
    for p in pts {
        if let Some(last) = hull.last() {
            if (p.0 - last.0).abs() <= gscale {
                continue;
            }
        }
        while hull.len() >= 2 {
            let k = hull.len();
            let tol = T::lit(1e-12) * vscale * (T::one() + g_max);
            if cross(hull[k - 2], hull[k - 1], p) >= -tol {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let peak = hull.iter().map(|p| p.1).fold(T::neg_infinity(), T::max);
    let top = hull.iter().position(|p| p.1 >= peak - T::lit(1e-12) * vscale).expect("non-empty");
    hull.truncate(top + 1);
    let mut terminal_slope = T::zero();
    if hull.len() >= 2 && hull[hull.len() - 1].0 >= g_max - gscale {
        let k = hull.len();
        terminal_slope = (hull[k - 1].1 - hull[k - 2].1) / (hull[k - 1].0 - hull[k - 2].0);
        hull.pop();
    }
    Ok(MCPCurve { coord: i, side, breakpoints: hull, terminal_slope, g_max })
}

/// Greedy chord cover of `curve` on `[g_lo, g_hi]` inside the multiplicative
/// neighborhood `chord ≥ (1−θ)f`.
pub fn slc_estimate<T: Scalar>(curve: &MCPCurve<T>, theta: T, g_lo: T, g_hi: T) -> usize {
    assert!(theta > T::zero() && theta <= T::one(), "theta in (0, 1]");
    assert!(g_lo >= T::zero() && g_lo < g_hi, "0 ≤ g_lo < g_hi");
    let f = |g: T| curve.value(g);
    let scale = T::one() + f(g_hi).abs();
    let kinks: Vec<T> = curve.breakpoints.iter().map(|p| p.0).filter(|&g| g > g_lo && g < g_hi).collect();
    let valid = |a: T, b: T| -> bool {
        let (fa, fb) = (f(a), f(b));
        let chord = |g: T| fa + (fb - fa) * (g - a) / (b - a);
        kinks
            .iter()
            .filter(|&&k| k > a && k < b)
            .all(|&k| chord(k) >= (T::one() - theta) * f(k) - T::lit(1e-12) * scale)
    };
    let mut g = g_hi;
    let mut count = 0;
    while g > g_lo {
        count += 1;
        if valid(g_lo, g) {
            break;
        }
        // kinks below g, descending; find the first infeasible anchor
        let mut hi = g;
        let mut lo = g_lo;
        for &k in kinks.iter().rev().filter(|&&k| k < g) {
            if valid(k, g) {
                hi = k;
            } else {
                lo = k;
                break;
            }
        }
        for _ in 0..200 {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if valid(mid, g) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi >= g {
            break;
        }
        g = hi;
    }
    count
}

/// `min{1, ((√u+√v)/(1+√(uv)))²}`.
pub fn ratio_min<T: Scalar>(u: T, v: T) -> T {
    assert!(u > T::zero() && v > T::zero(), "ratio_min needs u, v > 0");
    let r = (u.sqrt() + v.sqrt()) / (T::one() + (u * v).sqrt());
    (r * r).min(T::one())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Smallest slack over all checked instances; negative means violated.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizationReport<T> {
    pub mu0: T,
    pub mu1: T,
    pub partition: Partition,
    pub gamma: T,
    pub samples_used: usize,
    pub ratio_x: Vec<T>,
    pub ratio_s: Vec<T>,
    pub corollary_checks: Vec<CheckOutcome>,
}

/// Per-coordinate minimum ratios, best partition and the certified `γ`.
pub fn polarization_report<T: Scalar>(samples: &[CentralPathSample<T>]) -> Result<PolarizationReport<T>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples.len() });
    }
    if samples.windows(2).any(|w| w[1].mu > w[0].mu) {
        return Err(Error::InvalidInstance("samples must have non-increasing μ".into()));
    }
    let first = &samples[0];
    let n = first.n();
    let mut rx = vec![T::one(); n];
    let mut rs = vec![T::one(); n];
    for smp in samples {
        for i in 0..n {
            rx[i] = rx[i].min(smp.x[i] / first.x[i]);
            rs[i] = rs[i].min(smp.s[i] / first.s[i]);
        }
    }
    let mask: Vec<bool> = (0..n).map(|i| rx[i] >= rs[i]).collect();
    let partition = Partition::from_mask(&mask);
    let gamma = (0..n).map(|i| rx[i].max(rs[i])).fold(T::one(), T::min);
    let nn = T::from_usize(n).expect("n");
    let slack = T::lit(1e-9);
    let mut worst = [f64::INFINITY; 4];
    for smp in samples {
        let ratio = smp.mu / first.mu;
        for i in 0..n {
            let (qx, qs) = (smp.x[i] / first.x[i], smp.s[i] / first.s[i]);
            let (own, other, k) = if mask[i] { (qx, qs, 0) } else { (qs, qx, 1) };
            let m1 = (own - gamma).min(nn - own) / (T::one() + nn);
            let lo = ratio / nn;
            let hi = ratio / gamma;
            let m2 = ((other - lo) / lo).min((hi - other) / hi);
            worst[k] = worst[k].min(m1.as_f64());
            worst[k + 2] = worst[k + 2].min(m2.as_f64());
        }
    }
    let names = ["bounded side of B", "bounded side of N", "vanishing side of N", "vanishing side of B"];
    let corollary_checks = [0, 1, 2, 3]
        .iter()
        .map(|&k| {
            let m = if worst[k].is_finite() { worst[k] } else { 0.0 };
            CheckOutcome { name: names[k].into(), passed: m >= -slack.as_f64(), margin: m }
        })
        .collect();
    Ok(PolarizationReport {
        mu0: first.mu,
        mu1: samples[samples.len() - 1].mu,
        partition,
        gamma,
        samples_used: samples.len(),
        ratio_x: rx,
        ratio_s: rs,
        corollary_checks,
    })
}

/// Largest relative violation of `z^m(nμ)/(2n) ≤ z^cp(μ) ≤ z^m(nμ)`.
pub fn mcp_sandwich_check<T: Scalar>(
    sub: &SubspaceForm<T>,
    opt_pair: (&[T], &[T]),
    sample: &CentralPathSample<T>,
) -> Result<T> {
    let n = sample.n();
    let nn = T::from_usize(n).expect("n");
    let (xm, sm) = mcp_point(sub, opt_pair, nn * sample.mu)?;
    let mut worst = T::zero();
    for (zm, zc) in [(&xm, &sample.x), (&sm, &sample.s)] {
        for i in 0..n {
            let scale = zm[i].abs().max(T::min_positive_value());
            let lower = (zm[i] / (T::lit(2.0) * nn) - zc[i]) / scale;
            let upper = (zc[i] - zm[i]) / scale;
            worst = worst.max(lower).max(upper);
        }
    }
    Ok(worst)
}

/// Relative violation of `g ≤ x^m_i(g)s^m_i(g) ≤ 2g` over all `i`.
pub fn mcp_centrality_violation<T: Scalar>(sub: &SubspaceForm<T>, opt_pair: (&[T], &[T]), g: T) -> Result<T> {
    let (xm, sm) = mcp_point(sub, opt_pair, g)?;
    let scale = g.max(T::min_positive_value());
    Ok((0..xm.len())
        .map(|i| {
            let p = xm[i] * sm[i];
            ((g - p) / scale).max((p - T::lit(2.0) * g) / scale)
        })
        .fold(T::zero(), T::max))
}

/// `‖x'/x + s'/s‖` in the `∞` and `1` norms for `μ' ≤ μ`.
pub fn near_monotonicity<T: Scalar>(later: &CentralPathSample<T>, earlier: &CentralPathSample<T>) -> (T, T) {
    let q: Vec<T> = (0..later.n()).map(|i| later.x[i] / earlier.x[i] + later.s[i] / earlier.s[i]).collect();
    (vecops::norm_inf(&q), vecops::norm1(&q))
}

/// Runs the max-central-path and path lemma checks used by `analyze`.
pub fn lemma_checks<T: Scalar>(
    sub: &SubspaceForm<T>,
    opt_pair: (&[T], &[T]),
    samples: &[CentralPathSample<T>],
    g_values: &[T],
) -> Result<Vec<CheckOutcome>> {
    let n = sub.n();
    let nn = T::from_usize(n).expect("n");
    let slack = 1e-9;
    let mut out = Vec::new();
    let mut add = |name: &str, margin: f64| out.push(CheckOutcome { name: name.into(), passed: margin >= -slack, margin });

    let mut m = f64::INFINITY;
    for &g in g_values.iter().filter(|&&g| g > T::zero()) {
        m = m.min(-mcp_centrality_violation(sub, opt_pair, g)?.as_f64());
    }
    add("mcp centrality", finite_or_zero(m));

    let mut m = f64::INFINITY;
    for smp in samples {
        m = m.min(-mcp_sandwich_check(sub, opt_pair, smp)?.as_f64());
    }
    add("mcp sandwich", finite_or_zero(m));

    let g_max = g_values.iter().copied().fold(T::zero(), T::max);
    if g_max > T::zero() {
        let (mut conc, mut mono, mut subh) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for side in [Side::Primal, Side::Dual] {
            for i in 0..n {
                let curve = mcp_curve(sub, opt_pair, i, side, g_max * T::lit(4.0))?;
                let slopes = curve.slopes();
                let vscale = T::one() + curve.value(curve.g_max).abs();
                for w in slopes.windows(2) {
                    conc = conc.min(((w[0] - w[1]) / vscale).as_f64());
                }
                for &sl in &slopes {
                    mono = mono.min((sl / vscale).as_f64());
                }
                for &g in g_values.iter().filter(|&&g| g > T::zero()) {
                    for alpha in [1.5, 2.0, 4.0] {
                        let a = T::lit(alpha);
                        let lhs = curve.value(a * g);
                        subh = subh.min(((a * curve.value(g) - lhs) / (T::one() + lhs.abs())).as_f64());
                    }
                }
            }
        }
        add("curve concavity", finite_or_zero(conc));
        add("curve monotonicity", finite_or_zero(mono));
        add("curve subhomogeneity", finite_or_zero(subh));
    }

    let (mut inf, mut one) = (f64::INFINITY, f64::INFINITY);
    for (k, later) in samples.iter().enumerate() {
        for earlier in &samples[..k] {
            let (a, b) = near_monotonicity(later, earlier);
            inf = inf.min(((nn - a) / nn).as_f64());
            one = one.min(((T::lit(2.0) * nn - b) / (T::lit(2.0) * nn)).as_f64());
        }
    }
    add("near monotonicity inf", finite_or_zero(inf));
    add("near monotonicity l1", finite_or_zero(one));

    Ok(out)
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}
