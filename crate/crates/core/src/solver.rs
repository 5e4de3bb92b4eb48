//! The interior point loop with subspace LLS steps, termination and
//! rounding to an exact optimal pair.

use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::qr::Cod;
use crate::linalg::{vecops, OrthonormalBasis};
use crate::lls::{associated_partition, cheap_subspaces_in, subspace_lls_direction, Partition};
use crate::model::{in_l2_neighborhood, mu_bar, Iterate, LpInstance, SubspaceForm};
use crate::scalar::Scalar;
use crate::steps::{
    affine_direction_in, corrector_direction_in, step_length_affine, step_length_general, step_point, Direction,
    LocalGeometry,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Affine and subspace-LLS candidates, the longer step wins.
    Lls,
    /// Predictor-corrector only.
    Pc,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lls" => Ok(Mode::Lls),
            "pc" => Ok(Mode::Pc),
            other => Err(Error::InvalidInstance(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    pub beta: T,
    /// Stop once `μ̄ ≤ mu_tol · μ̄(z0)`.
    pub mu_tol: T,
    /// Defaults to `10 n²` when `None`.
    pub max_iters: Option<usize>,
    pub mode: Mode,
    pub trace_path: Option<PathBuf>,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self { beta: T::lit(0.125), mu_tol: T::lit(1e-12), max_iters: None, mode: Mode::Lls, trace_path: None }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > T::zero() && self.beta <= T::one() / T::lit(6.0)) {
            return Err(Error::InvalidInstance(format!("beta {} outside (0, 1/6]", self.beta)));
        }
        if !(self.mu_tol > T::zero()) {
            return Err(Error::InvalidInstance("mu_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    OptimalRounded,
    GapBelowTol,
    IterationLimit,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::OptimalRounded => "optimal_rounded",
            Status::GapBelowTol => "gap_below_tol",
            Status::IterationLimit => "iteration_limit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    pub x: Vec<T>,
    pub s: Vec<T>,
    pub status: Status,
    pub final_gap: T,
    pub support_b: Vec<usize>,
    pub iterations: usize,
}

/// One row of the iteration trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub mu_bar: f64,
    pub step_kind: &'static str,
    pub alpha: f64,
    #[serde(rename = "size_B")]
    pub size_b: usize,
    #[serde(rename = "size_N")]
    pub size_n: usize,
    #[serde(rename = "dim_V")]
    pub dim_v: usize,
    #[serde(rename = "dim_U")]
    pub dim_u: usize,
    pub centrality_err: f64,
    #[serde(rename = "rho_p_N")]
    pub rho_p_n: f64,
    #[serde(rename = "rho_d_B")]
    pub rho_d_b: f64,
    /// Correctors beyond the first one needed to re-enter `N²(β)`.
    #[serde(skip)]
    pub extra_correctors: usize,
}

pub const TRACE_HEADER: [&str; 11] =
    ["iter", "mu_bar", "step_kind", "alpha", "size_B", "size_N", "dim_V", "dim_U", "centrality_err", "rho_p_N", "rho_d_B"];

pub fn write_trace_csv<W: Write>(records: &[TraceRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

struct Candidate<T> {
    dir: Direction<T>,
    alpha: T,
    kind: &'static str,
    part: Option<Partition>,
    dim_v: usize,
    dim_u: usize,
    rho_p_n: T,
    rho_d_b: T,
}

fn choose_step<T: Scalar>(z: &Iterate<T>, geom: &LocalGeometry<T>, cfg: &SolverConfig<T>) -> Result<Candidate<T>> {
    let aff = affine_direction_in(geom, z);
    let alpha_a = step_length_affine(z, &aff, cfg.beta);
    let part = associated_partition(z, &aff);
    let affine_rho = || {
        let rp: Vec<T> = (0..z.n()).map(|i| z.xi[i] + aff.dx[i] / z.x_hat[i]).collect();
        let rd: Vec<T> = (0..z.n()).map(|i| z.xi[i] + aff.ds[i] / z.s_hat[i]).collect();
        (vecops::norm(&vecops::gather(&rp, &part.n)), vecops::norm(&vecops::gather(&rd, &part.b)))
    };
    if cfg.mode == Mode::Pc {
        let (rp, rd) = affine_rho();
        return Ok(Candidate { dir: aff, alpha: alpha_a, kind: "affine", part: Some(part), dim_v: 0, dim_u: 0, rho_p_n: rp, rho_d_b: rd });
    }
    let (lls, dim_v, dim_u) = if part.b.is_empty() || part.n.is_empty() {
        (subspace_lls_direction(z, &part, None, geom)?, 0, 0)
    } else {
        let cheap = cheap_subspaces_in(geom, z, &part, cfg.beta)?;
        let (dv, du) = (cheap.v.dim(), cheap.u.dim());
        (subspace_lls_direction(z, &part, Some(&cheap), geom)?, dv, du)
    };
    let alpha_l = step_length_general(z, &lls.dir, cfg.beta).alpha;
    let lls_mu = {
        let (x, s) = step_point(z, &lls.dir, alpha_l);
        mu_bar(&x, &s)
    };
    if alpha_a > alpha_l || !(lls_mu < z.mu_bar) {
        let (rp, rd) = affine_rho();
        Ok(Candidate { dir: aff, alpha: alpha_a, kind: "affine", part: Some(part), dim_v, dim_u, rho_p_n: rp, rho_d_b: rd })
    } else {
        Ok(Candidate { dir: lls.dir, alpha: alpha_l, kind: "lls", part: Some(part), dim_v, dim_u, rho_p_n: lls.rho_p_n, rho_d_b: lls.rho_d_b })
    }
}

/// Runs the method from the instance's starting point.
pub fn solve<T: Scalar>(inst: &LpInstance<T>, cfg: &SolverConfig<T>) -> Result<(Solution<T>, Vec<TraceRecord>)> {
    cfg.validate()?;
    let sub = inst.validate()?;
    let (x0, s0) = match (&inst.x0, &inst.s0) {
        (Some(x), Some(s)) => (x.clone(), s.clone()),
        _ => return Err(Error::InvalidInstance("instance has no starting point".into())),
    };
    let n = inst.n();
    let max_iters = cfg.max_iters.unwrap_or(10 * n * n);
    let mut z = Iterate::new(x0, s0)?;
    if !in_l2_neighborhood(&z, &sub, cfg.beta) {
        return Err(Error::NeighborhoodViolation { iter: 0, err: z.centrality_err.as_f64(), bound: cfg.beta.as_f64() });
    }
    let target = cfg.mu_tol * z.mu_bar;
    let relaxed = cfg.beta * (T::one() + T::lit(1e-6));
    let mut trace = Vec::new();
    let mut iter = 0usize;
    let mut terminal: Option<(Vec<T>, Vec<T>)> = None;
    while z.mu_bar > target {
        if iter >= max_iters {
            let sol = Solution {
                final_gap: z.mu_bar,
                x: z.x.clone(),
                s: z.s.clone(),
                status: Status::IterationLimit,
                support_b: support_guess(&z.x, &z.s),
                iterations: iter,
            };
            finish_trace(cfg, &trace)?;
            return Ok((sol, trace));
        }
        iter += 1;
        let geom = LocalGeometry::new(&z, &sub);
        let cand = choose_step(&z, &geom, cfg)?;
        let (mut x, mut s) = step_point(&z, &cand.dir, cand.alpha);
        let mut alpha = cand.alpha;
        let mut mu_new = mu_bar(&x, &s);
        let positive = |x: &[T], s: &[T]| x.iter().chain(s).all(|&v| v > T::zero());
        if !positive(&x, &s) && mu_new > target {
            while !positive(&x, &s) && alpha > T::epsilon() {
                alpha = alpha * T::lit(0.5);
                let p = step_point(&z, &cand.dir, alpha);
                x = p.0;
                s = p.1;
            }
            mu_new = mu_bar(&x, &s);
        }
        let part = cand.part.unwrap_or_else(|| Partition::from_b(n, &[]));
        let mut record = TraceRecord {
            iter,
            mu_bar: mu_new.as_f64(),
            step_kind: cand.kind,
            alpha: alpha.as_f64(),
            size_b: part.b.len(),
            size_n: part.n.len(),
            dim_v: cand.dim_v,
            dim_u: cand.dim_u,
            centrality_err: f64::NAN,
            rho_p_n: cand.rho_p_n.as_f64(),
            rho_d_b: cand.rho_d_b.as_f64(),
            extra_correctors: 0,
        };
        if mu_new <= target || !positive(&x, &s) {
            record.centrality_err = match Iterate::new(x.clone(), s.clone()) {
                Ok(zz) => zz.centrality_err.as_f64(),
                Err(_) => f64::NAN,
            };
            trace.push(record);
            terminal = Some((x, s));
            break;
        }
        let zp = Iterate::new(x, s)?;
        let mut zc = correct(&zp, &sub)?;
        let mut extra = 0;
        while !in_l2_neighborhood(&zc, &sub, relaxed) && extra < 5 {
            zc = correct(&zc, &sub)?;
            extra += 1;
        }
        if !in_l2_neighborhood(&zc, &sub, relaxed) {
            return Err(Error::NeighborhoodViolation { iter, err: zc.centrality_err.as_f64(), bound: cfg.beta.as_f64() });
        }
        record.mu_bar = zc.mu_bar.as_f64();
        record.centrality_err = zc.centrality_err.as_f64();
        record.extra_correctors = extra;
        trace.push(record);
        z = zc;
    }
    let (x, s) = terminal.unwrap_or_else(|| (z.x.clone(), z.s.clone()));
    let mut sol = round_to_optimal(&x, &s, &sub);
    sol.iterations = iter;
    finish_trace(cfg, &trace)?;
    Ok((sol, trace))
}

fn correct<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Result<Iterate<T>> {
    let geom = LocalGeometry::new(z, sub);
    let dc = corrector_direction_in(&geom, z);
    let (x, s) = step_point(z, &dc, T::one());
    Iterate::new(x, s).map_err(|_| Error::NeighborhoodViolation {
        iter: 0,
        err: z.centrality_err.as_f64(),
        bound: f64::NAN,
    })
}

fn finish_trace<T: Scalar>(cfg: &SolverConfig<T>, trace: &[TraceRecord]) -> Result<()> {
    if let Some(path) = &cfg.trace_path {
        let f = std::fs::File::create(path).map_err(|e| Error::InvalidInstance(format!("trace file: {e}")))?;
        write_trace_csv(trace, f).map_err(|e| Error::InvalidInstance(format!("trace file: {e}")))?;
    }
    Ok(())
}

fn support_guess<T: Scalar>(x: &[T], s: &[T]) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i] >= s[i]).collect()
}

/// Minimum-norm `w ∈ Y` with `w_I = target`; `None` if no element of `Y`
/// matches on `I` to tolerance.
fn constrained_correction<T: Scalar>(basis: &OrthonormalBasis<T>, idx: &[usize], target: &[T], scale: T) -> Option<Vec<T>> {
    let n = basis.ambient_dim();
    if idx.is_empty() {
        return Some(vec![T::zero(); n]);
    }
    if basis.dim() == 0 {
        return if vecops::norm_inf(target) <= T::lit(1e-12) * scale { Some(vec![T::zero(); n]) } else { None };
    }
    let q = basis.as_matrix();
    let qi = q.select_rows(idx);
    let cod = Cod::new(&qi, T::lit(T::RANK_TOL));
    let u = cod.min_norm_solve(target);
    let residual = vecops::sub(&qi.mul_vec(&u), target);
    if vecops::norm(&residual) > T::lit(1e-9) * scale {
        return None;
    }
    Some(q.mul_vec(&u))
}

/// Guesses the support `{x_i ≥ s_i}` and projects both sides onto the
/// corresponding faces.
pub fn round_to_optimal<T: Scalar>(x: &[T], s: &[T], sub: &SubspaceForm<T>) -> Solution<T> {
    let n = x.len();
    let b_hat = support_guess(x, s);
    let part = Partition::from_b(n, &b_hat);
    let raw = |status| Solution {
        x: x.to_vec(),
        s: s.to_vec(),
        status,
        final_gap: mu_bar(x, s),
        support_b: b_hat.clone(),
        iterations: 0,
    };
    let x_feas = vecops::add(&sub.d, &sub.w.project(&vecops::sub(x, &sub.d)).expect("dim"));
    let s_feas = vecops::add(&sub.c, &sub.wperp.project(&vecops::sub(s, &sub.c)).expect("dim"));
    let xscale = T::one() + vecops::norm_inf(&x_feas);
    let sscale = T::one() + vecops::norm_inf(&s_feas);
    let tx = vecops::scaled(-T::one(), &vecops::gather(&x_feas, &part.n));
    let ts = vecops::scaled(-T::one(), &vecops::gather(&s_feas, &part.b));
    let (wx, ws) = match (
        constrained_correction(&sub.w, &part.n, &tx, xscale),
        constrained_correction(&sub.wperp, &part.b, &ts, sscale),
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => return raw(Status::GapBelowTol),
    };
    let mut xr = vecops::add(&x_feas, &wx);
    let mut sr = vecops::add(&s_feas, &ws);
    for &i in &part.n {
        xr[i] = T::zero();
    }
    for &i in &part.b {
        sr[i] = T::zero();
    }
    let neg = T::lit(-1e-8);
    if xr.iter().any(|&v| v < neg * xscale) || sr.iter().any(|&v| v < neg * sscale) {
        return raw(Status::GapBelowTol);
    }
    xr.iter_mut().for_each(|v| *v = v.max(T::zero()));
    sr.iter_mut().for_each(|v| *v = v.max(T::zero()));
    let tol = T::lit(1e-8);
    if sub.primal_residual(&xr) > tol || sub.dual_residual(&sr) > tol {
        return raw(Status::GapBelowTol);
    }
    Solution { final_gap: mu_bar(&xr, &sr), x: xr, s: sr, status: Status::OptimalRounded, support_b: b_hat, iterations: 0 }
}

/// [`round_to_optimal`] on an iterate.
pub fn round_iterate<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Solution<T> {
    round_to_optimal(&z.x, &z.s, sub)
}
