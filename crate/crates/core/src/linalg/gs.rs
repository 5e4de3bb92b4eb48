use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::matrix::DenseMatrix;
use super::vecops;

/// Output of [`orthogonalize`]: the surviving columns and the indices of
/// input columns dropped as dependent.
#[derive(Clone, Debug)]
pub struct Orthogonalized<T> {
    pub matrix: DenseMatrix<T>,
    pub dropped: Vec<usize>,
}

/// Two-pass Gram-Schmidt on the columns of `v`.
///
/// With `n = Some(N)` the inner product is `⟨Nu, Nv⟩`; columns with zero
/// `N`-norm are kept but never used as projection targets. Kept columns are
/// scaled to unit Euclidean length.
pub fn orthogonalize<T: Scalar>(n: Option<&DenseMatrix<T>>, v: &DenseMatrix<T>) -> Result<Orthogonalized<T>> {
    if let Some(nm) = n {
        if nm.cols() != v.rows() {
            return Err(Error::DimensionMismatch { expected: v.rows(), found: nm.cols() });
        }
    }
    let dim = v.rows();
    let input = v.columns();
    let max_norm = input.iter().map(|c| vecops::norm(c)).fold(T::zero(), T::max);
    let drop_tol = T::lit(T::RANK_TOL) * max_norm;
    let image = |x: &[T]| -> Vec<T> {
        match n {
            Some(nm) => nm.mul_vec(x),
            None => x.to_vec(),
        }
    };
    let n_scale = n.map_or(T::one(), |nm| nm.frobenius_norm());
    let zero_tol = T::epsilon() * T::lit(8.0) * n_scale;

    let mut kept: Vec<Vec<T>> = Vec::new();
    let mut kept_img: Vec<Vec<T>> = Vec::new();
    let mut kept_n2: Vec<T> = Vec::new();
    let mut dropped = Vec::new();
    for (j, col) in input.iter().enumerate() {
        let mut w = col.clone();
        for _pass in 0..2 {
            let wi = image(&w);
            let mut wi = wi;
            for k in 0..kept.len() {
                if kept_n2[k].sqrt() <= zero_tol {
                    continue;
                }
                let coef = vecops::dot(&wi, &kept_img[k]) / kept_n2[k];
                vecops::axpy(-coef, &kept[k], &mut w);
                vecops::axpy(-coef, &kept_img[k], &mut wi);
            }
        }
        let nw = vecops::norm(&w);
        if nw <= drop_tol || nw == T::zero() {
            dropped.push(j);
            continue;
        }
        let w = vecops::scaled(T::one() / nw, &w);
        let wi = image(&w);
        kept_n2.push(vecops::dot(&wi, &wi));
        kept_img.push(wi);
        kept.push(w);
    }
    if !input.is_empty() && kept.is_empty() {
        return Err(Error::DegenerateInput("all columns vanish".into()));
    }
    Ok(Orthogonalized { matrix: DenseMatrix::from_columns(dim, &kept), dropped })
}
