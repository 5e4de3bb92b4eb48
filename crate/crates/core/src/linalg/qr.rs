//! Householder QR with optional column pivoting, and the complete orthogonal
//! decomposition built on it.

use crate::scalar::Scalar;

use super::matrix::DenseMatrix;
use super::vecops;

#[derive(Clone, Debug)]
pub(crate) struct Householder<T> {
    m: usize,
    n: usize,
    work: DenseMatrix<T>,
    vs: Vec<Vec<T>>,
    taus: Vec<T>,
    perm: Vec<usize>,
    rank: usize,
}

impl<T: Scalar> Householder<T> {
    pub fn factor(a: &DenseMatrix<T>, pivot: bool, rel_tol: T) -> Self {
        let (m, n) = a.shape();
        let steps = m.min(n);
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut vs = Vec::with_capacity(steps);
        let mut taus = Vec::with_capacity(steps);
        for k in 0..steps {
            if pivot {
                let mut best = k;
                let mut best_norm = T::neg_infinity();
                for j in k..n {
                    let c: Vec<T> = (k..m).map(|i| work.get(i, j)).collect();
                    let nj = vecops::norm(&c);
                    if nj > best_norm {
                        best_norm = nj;
                        best = j;
                    }
                }
                if best != k {
                    for i in 0..m {
                        let t = work.get(i, k);
                        work.set(i, k, work.get(i, best));
                        work.set(i, best, t);
                    }
                    perm.swap(k, best);
                }
            }
            let mut v: Vec<T> = (k..m).map(|i| work.get(i, k)).collect();
            let nx = vecops::norm(&v);
            if nx == T::zero() {
                vs.push(v);
                taus.push(T::zero());
                continue;
            }
            let alpha = if v[0] >= T::zero() { -nx } else { nx };
            v[0] -= alpha;
            let vn2 = vecops::dot(&v, &v);
            let tau = if vn2 == T::zero() { T::zero() } else { T::lit(2.0) / vn2 };
            for j in (k + 1)..n {
                let mut w = T::zero();
                for (ii, &vi) in v.iter().enumerate() {
                    w += vi * work.get(k + ii, j);
                }
                let f = tau * w;
                for (ii, &vi) in v.iter().enumerate() {
                    let cur = work.get(k + ii, j);
                    work.set(k + ii, j, cur - f * vi);
                }
            }
            work.set(k, k, alpha);
            for i in (k + 1)..m {
                work.set(i, k, T::zero());
            }
            vs.push(v);
            taus.push(tau);
        }
        let lead = if steps > 0 { work.get(0, 0).abs() } else { T::zero() };
        let rank = if lead == T::zero() {
            0
        } else {
            (0..steps).take_while(|&k| work.get(k, k).abs() > rel_tol * lead).count()
        };
        Self { m, n, work, vs, taus, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// `y ← Q y`
    pub fn apply_q(&self, y: &mut [T]) {
        for k in (0..self.vs.len()).rev() {
            self.reflect(k, y);
        }
    }

    fn reflect(&self, k: usize, y: &mut [T]) {
        let tau = self.taus[k];
        if tau == T::zero() {
            return;
        }
        let v = &self.vs[k];
        let w: T = v.iter().enumerate().map(|(ii, &vi)| vi * y[k + ii]).sum();
        let f = tau * w;
        for (ii, &vi) in v.iter().enumerate() {
            y[k + ii] -= f * vi;
        }
    }

    /// First `k` columns of the orthogonal factor.
    pub fn q_columns(&self, k: usize) -> DenseMatrix<T> {
        let cols: Vec<Vec<T>> = (0..k)
            .map(|j| {
                let mut e = vec![T::zero(); self.m];
                e[j] = T::one();
                self.apply_q(&mut e);
                e
            })
            .collect();
        DenseMatrix::from_columns(self.m, &cols)
    }

    /// Leading `rows` rows of R, columns in pivoted order.
    pub fn r_rows(&self, rows: usize) -> DenseMatrix<T> {
        let mut r = DenseMatrix::zeros(rows, self.n);
        for i in 0..rows {
            for j in i..self.n {
                r.set(i, j, self.work.get(i, j));
            }
        }
        r
    }
}

/// Complete orthogonal decomposition `A Π = U [Sᵀ Zᵀ]` used for range bases
/// and minimum-norm solves.
#[derive(Clone, Debug)]
pub(crate) struct Cod<T> {
    cols: usize,
    rank: usize,
    range: DenseMatrix<T>,
    z: DenseMatrix<T>,
    s: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Cod<T> {
    pub fn new(a: &DenseMatrix<T>, rel_tol: T) -> Self {
        let (rows, cols) = a.shape();
        let h1 = Householder::factor(a, true, rel_tol);
        let r = h1.rank();
        let range = h1.q_columns(r);
        let rr = h1.r_rows(r);
        let h2 = Householder::factor(&rr.transpose(), false, T::zero());
        let z = h2.q_columns(r);
        let s = h2.r_rows(r).select_cols(&(0..r).collect::<Vec<_>>());
        debug_assert_eq!(range.rows(), rows);
        Self { cols, rank: r, range, z, s, perm: h1.perm().to_vec() }
    }

    /// Orthonormal basis of the column space, as columns.
    pub fn range(&self) -> &DenseMatrix<T> {
        &self.range
    }

    /// Minimum-norm `u` with `A u = Π_{im A}(e)`.
    pub fn min_norm_solve(&self, e: &[T]) -> Vec<T> {
        let f = self.range.tr_mul_vec(e);
        self.min_norm_from_range_coords(&f)
    }

    /// Minimum-norm `u` with `A u = range · f`.
    pub fn min_norm_from_range_coords(&self, f: &[T]) -> Vec<T> {
        let r = self.rank;
        let mut g = vec![T::zero(); r];
        for i in 0..r {
            let mut acc = f[i];
            for (j, &gj) in g.iter().enumerate().take(i) {
                acc -= self.s.get(j, i) * gj;
            }
            g[i] = acc / self.s.get(i, i);
        }
        let t = self.z.mul_vec(&g);
        let mut u = vec![T::zero(); self.cols];
        for (j, &tj) in t.iter().enumerate() {
            u[self.perm[j]] = tj;
        }
        u
    }
}

/// Solves a square system by Gaussian elimination with partial pivoting;
/// `None` when a pivot falls below `rel_tol` times the largest entry.
pub fn solve_square<T: Scalar>(a: &DenseMatrix<T>, b: &[T], rel_tol: T) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.to_rows();
    let mut rhs = b.to_vec();
    let scale = a.max_abs();
    if scale == T::zero() {
        return if n == 0 { Some(vec![]) } else { None };
    }
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[i][k].abs()))
            .fold((k, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= rel_tol * scale {
            return None;
        }
        m.swap(k, p);
        rhs.swap(k, p);
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let v = rhs[k];
            rhs[i] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}
