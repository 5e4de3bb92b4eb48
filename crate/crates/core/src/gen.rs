//! Seeded instance generators with exactly central starting points and
//! verified optima.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cplab;
use crate::error::{Error, Result};
use crate::linalg::{vecops, DenseMatrix, OrthonormalBasis};
use crate::lls::Partition;
use crate::model::{GroundTruth, InstanceDocument, Iterate, LpInstance, PartitionDoc, SubspaceForm};
use crate::solver::{self, Mode, SolverConfig, Status};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance {
    pub inst: LpInstance<f64>,
    pub ground_truth: GroundTruth,
}

impl GeneratedInstance {
    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument::from_instance(&self.inst, Some(self.ground_truth.clone()))
    }

    pub fn mu0(&self) -> f64 {
        self.ground_truth.mu0
    }
}

const REDRAWS: u64 = 20;

fn rng_for(seed: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    rng
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<f64> {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("finite")
}

/// Checks feasibility and complementarity of `(x*, s*)` to `tol`.
pub fn verify_optimal_pair(sub: &SubspaceForm<f64>, x: &[f64], s: &[f64], tol: f64) -> bool {
    let nonneg = x.iter().chain(s).all(|&v| v >= 0.0);
    let products = x.iter().zip(s).all(|(a, b)| (a * b).abs() <= tol);
    nonneg && products && sub.primal_residual(x) <= tol && sub.dual_residual(s) <= tol
}

/// Solves with the predictor-corrector baseline to high accuracy and rounds.
fn ground_truth_by_solving(inst: &LpInstance<f64>, mu0: f64) -> Result<GroundTruth> {
    let sub = inst.validate()?;
    let cfg = SolverConfig { mu_tol: 1e-14, ..SolverConfig::default() }.with_mode(Mode::Pc);
    let (sol, _) = solver::solve(inst, &cfg)?;
    if sol.status != Status::OptimalRounded || !verify_optimal_pair(&sub, &sol.x, &sol.s, 1e-10) {
        return Err(Error::ConstructionFailed(format!("ground truth solve ended with {}", sol.status.as_str())));
    }
    Ok(truth_from_pair(sol.x, sol.s, mu0, None))
}

fn truth_from_pair(x: Vec<f64>, s: Vec<f64>, mu0: f64, intended: Option<Partition>) -> GroundTruth {
    let scale = 1.0 + vecops::norm_inf(&x).max(vecops::norm_inf(&s));
    let strict = x.iter().zip(&s).all(|(a, b)| a + b > 1e-7 * scale);
    let support = (0..x.len()).filter(|&i| x[i] > s[i]).collect();
    GroundTruth {
        x_star: x,
        s_star: s,
        optimal_support: support,
        intended_partition: intended.map(|p| PartitionDoc { b: p.b, n: p.n }),
        mu0,
        strictly_complementary: strict,
    }
}

/// Random `A`, `x0 ~ U(0.5, 2)`, `s0 = μ0/x0`, `b = Ax0`, `c = s0`.
pub fn synthetic_central(n: usize, m: usize, mu0: f64, seed: u64) -> Result<GeneratedInstance> {
    if m < 1 || m >= n {
        return Err(Error::InvalidInstance(format!("need 1 ≤ m < n, got m = {m}, n = {n}")));
    }
    if !(mu0 > 0.0 && mu0.is_finite()) {
        return Err(Error::InvalidInstance("mu0 must be positive".into()));
    }
    let mut last = None;
    for attempt in 0..REDRAWS {
        let mut rng = rng_for(seed, attempt);
        let a = uniform_matrix(&mut rng, m, n);
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let s0: Vec<f64> = x0.iter().map(|&v| mu0 / v).collect();
        let b = a.mul_vec(&x0);
        let inst = LpInstance::new(a, b, s0.clone())?.with_start(x0, s0);
        match ground_truth_by_solving(&inst, mu0) {
            Ok(gt) => return Ok(GeneratedInstance { inst, ground_truth: gt }),
            Err(e @ (Error::RankDeficient { .. } | Error::ConstructionFailed(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(match last {
        Some(Error::RankDeficient { rank, expected }) => Error::RankDeficient { rank, expected },
        _ => Error::ConstructionFailed(format!("synthetic_central failed after {REDRAWS} draws")),
    })
}

/// Optimal pair determined by a basis `B` (`|B| = m`): `x_B = A_B⁻¹b`,
/// `s = c − Aᵀy` with `A_Bᵀy = c_B`.
pub fn pair_from_basis(inst: &LpInstance<f64>, basis: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = inst.n();
    let ab = inst.a.select_cols(basis);
    let xb = crate::linalg::solve_square(&ab, &inst.b, 1e-13)
        .ok_or_else(|| Error::ConstructionFailed("singular basis".into()))?;
    let cb = vecops::gather(&inst.c, basis);
    let y = crate::linalg::solve_square(&ab.transpose(), &cb, 1e-13)
        .ok_or_else(|| Error::ConstructionFailed("singular basis".into()))?;
    let mut s = vecops::sub(&inst.c, &inst.a.tr_mul_vec(&y));
    for &i in basis {
        s[i] = 0.0;
    }
    Ok((vecops::scatter(n, basis, &xb), s))
}

/// Klee–Minty cube `max Σ 2^{d−j} x_j`, `Σ_{j<i} 2^{i−j+1} x_j + x_i ≤ 5^i`,
/// in standard form with slacks, started on the central path.
pub fn klee_minty(n_orig: usize, _seed: Option<u64>) -> Result<GeneratedInstance> {
    let d = n_orig;
    if !(2..=20).contains(&d) {
        return Err(Error::InvalidInstance(format!("klee_minty needs 2 ≤ n_orig ≤ 20, got {d}")));
    }
    let n = 2 * d;
    let mut a = DenseMatrix::zeros(d, n);
    let mut b = vec![0.0; d];
    for i in 0..d {
        for j in 0..i {
            a.set(i, j, 2f64.powi((i - j + 1) as i32));
        }
        a.set(i, i, 1.0);
        a.set(i, d + i, 1.0);
        b[i] = 5f64.powi(i as i32 + 1);
    }
    let mut c = vec![0.0; n];
    for j in 0..d {
        c[j] = -(2f64.powi((d - 1 - j) as i32));
    }
    // half of the remaining room on every row
    let mut x0 = vec![0.0; n];
    for i in 0..d {
        let used: f64 = (0..i).map(|j| a.get(i, j) * x0[j]).sum();
        x0[i] = 0.5 * (b[i] - used);
        x0[d + i] = b[i] - used - x0[i];
    }
    let t = 2f64.powi(d as i32) + 1.0;
    let s0 = vecops::add_scaled(&c, t, &a.tr_mul_vec(&vec![1.0; d]));
    let inst = LpInstance::new(a, b, c)?;
    let sub = inst.validate()?;
    let center = cplab::center_from(&Iterate::new(x0, s0)?, &sub)?;
    let (inst, mu0) = exactly_central(inst, center.x, center.s);
    let basis: Vec<usize> = (d..2 * d - 1).chain([d - 1]).collect();
    let (xs, ss) = pair_from_basis(&inst, &basis)?;
    Ok(GeneratedInstance { inst, ground_truth: truth_from_pair(xs, ss, mu0, None) })
}

/// Replaces `s` by `μ/x` and shifts `c` by the same amount, so the start is
/// central to rounding.
fn exactly_central(mut inst: LpInstance<f64>, x: Vec<f64>, s: Vec<f64>) -> (LpInstance<f64>, f64) {
    let mu = crate::model::mu_bar(&x, &s);
    let s_new: Vec<f64> = x.iter().map(|&v| mu / v).collect();
    for i in 0..x.len() {
        inst.c[i] += s_new[i] - s[i];
    }
    inst.x0 = Some(x);
    inst.s0 = Some(s_new);
    (inst, mu)
}

/// Shift `δ` with `Σ g(e_i + δ) = 0` for `g(t) = t/(1+t)`.
fn balance_perturbation(e: &mut [f64]) {
    let g = |d: f64, e: &[f64]| e.iter().map(|&t| (t + d) / (1.0 + t + d)).sum::<f64>();
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lo = -1.0 - min + 1e-9;
    let mut hi = 10.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid, e) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    e.iter_mut().for_each(|t| *t += d);
}

/// Samples per decade used to certify polarization.
pub const CERTIFY_PER_DECADE: usize = 4;

/// Certified polarization of the path on `[μ0/span, μ0]`.
pub fn certify_polarization(inst: &LpInstance<f64>, span: f64) -> Result<cplab::PolarizationReport<f64>> {
    let sub = inst.validate()?;
    let (x0, s0) = (inst.x0.clone().expect("start"), inst.s0.clone().expect("start"));
    let start = cplab::refine_to_center(&Iterate::new(x0, s0)?, &sub)?;
    let count = ((span.log10() * CERTIFY_PER_DECADE as f64).ceil() as usize).max(1) + 1;
    let mus = cplab::geometric_grid(start.mu, start.mu / span, count);
    let mut samples = vec![start.clone()];
    samples.extend(cplab::path_samples(&sub, &start, &mus[1..])?);
    cplab::polarization_report(&samples)
}

/// Strictly complementary instance with intended partition `(B*, N*)`,
/// `|B*| = m`, whose central path on `[μ0/span, μ0]` is certified
/// `1/(4n)`-polarized.
pub fn long_polarized(n: usize, m: usize, mu0: f64, span: f64, seed: u64) -> Result<GeneratedInstance> {
    if m < 1 || m >= n {
        return Err(Error::InvalidInstance(format!("need 1 ≤ m < n, got m = {m}, n = {n}")));
    }
    if !(span >= 1.0 && span.is_finite()) {
        return Err(Error::InvalidInstance("span must be at least 1".into()));
    }
    if !(mu0 > 0.0 && mu0.is_finite()) {
        return Err(Error::InvalidInstance("mu0 must be positive".into()));
    }
    let need = 1.0 / (4.0 * n as f64);
    for attempt in 0..REDRAWS {
        let mut rng = rng_for(seed, attempt);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut bset: Vec<usize> = perm[..m].to_vec();
        bset.sort_unstable();
        let part = Partition::from_b(n, &bset);
        let mut x_star = vec![0.0; n];
        let mut s_star = vec![0.0; n];
        for &i in &part.b {
            x_star[i] = rng.gen_range(1.0..2.0);
        }
        for &i in &part.n {
            s_star[i] = rng.gen_range(1.0..2.0);
        }
        let mut eps: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        balance_perturbation(&mut eps);
        let mut x0 = vec![0.0; n];
        let mut s0 = vec![0.0; n];
        for &i in &part.b {
            x0[i] = x_star[i] * (1.0 + eps[i]);
            s0[i] = mu0 / x0[i];
        }
        for &i in &part.n {
            s0[i] = s_star[i] * (1.0 + eps[i]);
            x0[i] = mu0 / s0[i];
        }
        let dx = vecops::sub(&x0, &x_star);
        let ds = vecops::sub(&s0, &s_star);
        let mut gens = vec![dx.clone()];
        for _ in 0..(n - m - 1) {
            gens.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        let ds_unit = vecops::scaled(1.0 / vecops::norm(&ds), &ds);
        for g in gens.iter_mut() {
            let p = vecops::dot(g, &ds_unit);
            *g = vecops::add_scaled(g, -p, &ds_unit);
        }
        let w = OrthonormalBasis::span_of(n, &gens);
        if w.dim() != n - m {
            continue;
        }
        let wperp = w.complement();
        let mix = uniform_matrix(&mut rng, m, m);
        let a = match mix.matmul(&DenseMatrix::from_rows(wperp.vectors())?) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let b = a.mul_vec(&x0);
        let inst = match LpInstance::new(a, b, s0.clone()) {
            Ok(i) => i.with_start(x0, s0),
            Err(_) => continue,
        };
        let Ok(sub) = inst.validate() else { continue };
        if !verify_optimal_pair(&sub, &x_star, &s_star, 1e-10) {
            continue;
        }
        let Ok(report) = certify_polarization(&inst, span) else { continue };
        if report.gamma >= need && (report.partition == part || span == 1.0) {
            let gt = truth_from_pair(x_star, s_star, mu0, Some(part));
            return Ok(GeneratedInstance { inst, ground_truth: gt });
        }
    }
    Err(Error::ConstructionFailed(format!("no certified polarized instance after {REDRAWS} draws")))
}
