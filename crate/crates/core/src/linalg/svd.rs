use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::matrix::DenseMatrix;
use super::vecops;

/// Output of [`approx_svd`].
#[derive(Clone, Debug)]
pub struct ApproxSvdResult<T> {
    /// Square matrix with pairwise orthogonal unit columns.
    pub v: DenseMatrix<T>,
    /// `‖M V_i‖ / ‖V_i‖` per column.
    pub rayleigh: Vec<T>,
}

fn gram_schmidt_all<T: Scalar>(cols: &mut [Vec<T>]) {
    let n = cols.len();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let c = vecops::dot(&tail[0], &head[k]);
                vecops::axpy(-c, &head[k], &mut tail[0]);
            }
        }
        let nj = vecops::norm(&cols[j]);
        if nj > T::epsilon() {
            let inv = T::one() / nj;
            cols[j].iter_mut().for_each(|x| *x *= inv);
        } else {
            // numerically collapsed column: replace by the standard vector
            // with the largest residual against the previous columns
            let dim = cols[j].len();
            let mut best = vec![T::zero(); dim];
            let mut best_n = T::neg_infinity();
            for e in 0..dim {
                let mut w = vec![T::zero(); dim];
                w[e] = T::one();
                for _pass in 0..2 {
                    for k in 0..j {
                        let c = vecops::dot(&w, &cols[k]);
                        vecops::axpy(-c, &cols[k], &mut w);
                    }
                }
                let nw = vecops::norm(&w);
                if nw > best_n {
                    best_n = nw;
                    best = w;
                }
            }
            cols[j] = vecops::scaled(T::one() / best_n, &best);
        }
    }
}

/// Deterministic approximate SVD.
///
/// Each round re-orthogonalizes all columns, makes the suffix `V_{≥i}`
/// orthogonal in the `MᵀM` inner product, and swaps the suffix column with
/// the smallest Rayleigh quotient into position `i` (lowest index on ties).
pub fn approx_svd<T: Scalar>(m: &DenseMatrix<T>) -> Result<ApproxSvdResult<T>> {
    let n = m.cols();
    if n == 0 {
        return Err(Error::DegenerateInput("approx_svd needs at least one column".into()));
    }
    let mut cols: Vec<Vec<T>> = DenseMatrix::<T>::identity(n).columns();
    let zero_tol = T::epsilon() * T::lit(8.0) * m.frobenius_norm();
    let mut images: Vec<Vec<T>> = vec![Vec::new(); n];
    let mut img_n: Vec<T> = vec![T::zero(); n];
    for i in 0..n {
        gram_schmidt_all(&mut cols);
        for j in i..n {
            let mut w = cols[j].clone();
            let mut wi = m.mul_vec(&w);
            for _pass in 0..2 {
                for k in i..j {
                    if img_n[k] <= zero_tol {
                        continue;
                    }
                    let coef = vecops::dot(&wi, &images[k]) / (img_n[k] * img_n[k]);
                    vecops::axpy(-coef, &cols[k], &mut w);
                    vecops::axpy(-coef, &images[k], &mut wi);
                }
            }
            let nw = vecops::norm(&w);
            let w = vecops::scaled(T::one() / nw, &w);
            let wi = m.mul_vec(&w);
            img_n[j] = vecops::norm(&wi);
            images[j] = wi;
            cols[j] = w;
        }
        let mut c = i;
        for j in (i + 1)..n {
            if img_n[j] < img_n[c] {
                c = j;
            }
        }
        cols.swap(i, c);
        images.swap(i, c);
        img_n.swap(i, c);
    }
    let rayleigh = cols.iter().map(|v| vecops::norm(&m.mul_vec(v)) / vecops::norm(v)).collect();
    Ok(ApproxSvdResult { v: DenseMatrix::from_columns(n, &cols), rayleigh })
}

/// Singular values of `M` by one-sided cyclic Jacobi rotations, i.e. the
/// Jacobi eigenvalue method applied implicitly to `MᵀM`.
///
/// Returns one value per column, non-increasing, zeros beyond the rank.
pub fn reference_singular_values<T: Scalar>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    reference_singular_values_with(m, 100)
}

pub fn reference_singular_values_with<T: Scalar>(m: &DenseMatrix<T>, max_sweeps: usize) -> Result<Vec<T>> {
    let mut a = m.columns();
    let n = a.len();
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(16.0));
    let tiny = {
        let f = m.frobenius_norm() * T::epsilon();
        f * f
    };
    let mut converged = n < 2;
    for _sweep in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = vecops::dot(&a[p], &a[p]);
                let beta = vecops::dot(&a[q], &a[q]);
                if alpha <= tiny || beta <= tiny {
                    continue;
                }
                let gamma = vecops::dot(&a[p], &a[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = a.split_at_mut(q);
                for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (u, v) = (*xp, *xq);
                    *xp = c * u - s * v;
                    *xq = s * u + c * v;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(max_sweeps));
    }
    let mut sv: Vec<T> = a.iter().map(|c| vecops::norm(c)).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sv)
}
