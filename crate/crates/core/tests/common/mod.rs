#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublls::linalg::{DenseMatrix, OrthonormalBasis};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<f64> {
    let data = (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect();
    DenseMatrix::from_row_major(rows, cols, data).unwrap()
}

pub fn random_orthogonal(r: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
    let m = random_matrix(r, n, n);
    OrthonormalBasis::column_space(&m).as_matrix()
}

/// `U diag(σ) Vᵀ` with singular values log-spaced between 1 and `1/cond`.
pub fn conditioned_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, cond: f64) -> DenseMatrix<f64> {
    let k = rows.min(cols);
    let u = random_orthogonal(r, rows);
    let v = random_orthogonal(r, cols);
    let mut s = DenseMatrix::zeros(rows, cols);
    for i in 0..k {
        let t = if k == 1 { 0.0 } else { i as f64 / (k - 1) as f64 };
        s.set(i, i, cond.powf(-t));
    }
    u.matmul(&s).unwrap().matmul(&v.transpose()).unwrap()
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn random_subspace(r: &mut ChaCha8Rng, n: usize, k: usize) -> OrthonormalBasis<f64> {
    let m = random_matrix(r, n, k);
    OrthonormalBasis::column_space(&m)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rel_le(a: f64, b: f64, slack: f64) -> bool {
    a <= b * (1.0 + slack) + slack * f64::MIN_POSITIVE.max(0.0)
}

/// Solves the normal equations `(BᵀB) c = Bᵀ v` by Gaussian elimination.
pub fn normal_equations_projection(b: &DenseMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let bt = b.transpose();
    let g = bt.matmul(b).unwrap();
    let rhs = bt.mul_vec(v);
    let c = sublls::linalg::solve_square(&g, &rhs, 1e-14).unwrap();
    b.mul_vec(&c)
}

/// Null space of `m` by reduced row echelon form with full pivoting.
pub fn null_space(m: &DenseMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<f64>> = m.to_rows();
    let scale = a.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows).map(|i| (i, a[i][c].abs())).fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol * scale {
            continue;
        }
        a.swap(r, p);
        let piv = a[r][c];
        for v in a[r].iter_mut() {
            *v /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][c];
                if f != 0.0 {
                    for j in 0..cols {
                        a[i][j] -= f * a[r][j];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; cols];
            v[f] = 1.0;
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[k][f];
            }
            v
        })
        .collect()
}

/// Twice-iterated modified Gram–Schmidt; drops vectors that collapse.
pub fn orthonormalize(vecs: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let scale = vecs.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let p = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= p * b);
            }
        }
        let nw = norm(&w);
        if nw > tol * scale.max(1e-300) {
            out.push(w.iter().map(|x| x / nw).collect());
        }
    }
    out
}

pub fn project_onto(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for q in basis {
        let p = dot(q, v);
        out.iter_mut().zip(q).for_each(|(a, b)| *a += p * b);
    }
    out
}

pub fn residual_from(basis: &[Vec<f64>], v: &[f64]) -> f64 {
    let p = project_onto(basis, v);
    norm(&v.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>())
}

pub fn rows_of(vecs: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    vecs.iter().map(|v| idx.iter().map(|&i| v[i]).collect()).collect()
}

/// Orthonormal basis of the orthogonal complement of `span(vecs)` in `R^dim`.
pub fn complement_of(vecs: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if vecs.is_empty() {
        return (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    }
    let m = DenseMatrix::from_rows(vecs).unwrap();
    orthonormalize(&null_space(&m, 1e-10), 1e-10)
}

/// Random subset of `0..n` of size in `1..n`, sorted.
pub fn random_split(r: &mut ChaCha8Rng, n: usize) -> (Vec<usize>, Vec<usize>) {
    loop {
        let mask: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();
        let i: Vec<usize> = (0..n).filter(|&k| mask[k]).collect();
        let j: Vec<usize> = (0..n).filter(|&k| !mask[k]).collect();
        if !i.is_empty() && !j.is_empty() {
            return (i, j);
        }
    }
}

pub struct CentralInstance {
    pub inst: sublls::model::LpInstance<f64>,
    pub sub: sublls::model::SubspaceForm<f64>,
    pub x0: Vec<f64>,
    pub s0: Vec<f64>,
}

/// Random instance with a central start `x0 s0 = μ·1`.
pub fn central_instance(r: &mut ChaCha8Rng, n: usize, m: usize, mu: f64) -> CentralInstance {
    let a = random_matrix(r, m, n);
    let x0: Vec<f64> = (0..n).map(|_| r.gen_range(0.5..2.0)).collect();
    let s0: Vec<f64> = x0.iter().map(|v| mu / v).collect();
    let b = a.mul_vec(&x0);
    let inst = sublls::model::LpInstance::new(a, b, s0.clone()).unwrap().with_start(x0.clone(), s0.clone());
    let sub = inst.validate().unwrap();
    CentralInstance { inst, sub, x0, s0 }
}

/// Feasible iterate near `(x0, s0)` with centrality error `target`, moving
/// along random directions of `W` and `W⊥`.
pub fn perturbed_iterate(
    r: &mut ChaCha8Rng,
    ci: &CentralInstance,
    target: f64,
) -> sublls::model::Iterate<f64> {
    use sublls::model::Iterate;
    let n = ci.x0.len();
    let gx: Vec<f64> = (0..n).map(|i| ci.x0[i] * r.gen_range(-1.0..1.0)).collect();
    let gs: Vec<f64> = (0..n).map(|i| ci.s0[i] * r.gen_range(-1.0..1.0)).collect();
    let dx = ci.sub.w.project(&gx).unwrap();
    let ds = ci.sub.wperp.project(&gs).unwrap();
    let at = |t: f64| {
        let x: Vec<f64> = (0..n).map(|i| ci.x0[i] + t * dx[i]).collect();
        let s: Vec<f64> = (0..n).map(|i| ci.s0[i] + t * ds[i]).collect();
        Iterate::new(x, s).ok()
    };
    let err = |t: f64| at(t).map_or(f64::INFINITY, |z| z.centrality_err);
    if target == 0.0 {
        return at(0.0).unwrap();
    }
    let mut hi = 1e-3;
    while err(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if err(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo).unwrap()
}
