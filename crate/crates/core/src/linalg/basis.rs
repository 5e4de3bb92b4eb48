use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::matrix::DenseMatrix;
use super::qr::{Cod, Householder};
use super::vecops;

/// Orthonormal basis of a subspace of `R^ambient_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis<T> {
    ambient_dim: usize,
    vectors: Vec<Vec<T>>,
}

impl<T: Scalar> OrthonormalBasis<T> {
    pub fn empty(ambient_dim: usize) -> Self {
        Self { ambient_dim, vectors: Vec::new() }
    }

    /// The standard basis of the whole space.
    pub fn standard(ambient_dim: usize) -> Self {
        let vectors = (0..ambient_dim)
            .map(|i| {
                let mut e = vec![T::zero(); ambient_dim];
                e[i] = T::one();
                e
            })
            .collect();
        Self { ambient_dim, vectors }
    }

    /// Wraps vectors that are already orthonormal, checking to `ORTH_TOL`.
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<T>>) -> Result<Self> {
        let tol = T::lit(T::ORTH_TOL);
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
            if (vecops::norm(v) - T::one()).abs() > tol {
                return Err(Error::DegenerateInput(format!("basis vector {i} is not unit")));
            }
            for w in &vectors[..i] {
                if vecops::dot(v, w).abs() > tol {
                    return Err(Error::DegenerateInput("basis vectors not orthogonal".into()));
                }
            }
        }
        Ok(Self { ambient_dim, vectors })
    }

    /// Orthonormal basis of the span of arbitrary vectors; dependent
    /// directions are discarded.
    pub fn span_of(ambient_dim: usize, vectors: &[Vec<T>]) -> Self {
        if vectors.is_empty() {
            return Self::empty(ambient_dim);
        }
        let m = DenseMatrix::from_columns(ambient_dim, vectors);
        Self::column_space(&m)
    }

    /// Orthonormal basis of the column space of `m`.
    pub fn column_space(m: &DenseMatrix<T>) -> Self {
        if m.cols() == 0 || m.rows() == 0 {
            return Self::empty(m.rows());
        }
        let cod = Cod::new(m, T::lit(T::RANK_TOL));
        Self { ambient_dim: m.rows(), vectors: cod.range().columns() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }

    /// Basis vectors as the columns of an `ambient_dim × dim` matrix.
    pub fn as_matrix(&self) -> DenseMatrix<T> {
        DenseMatrix::from_columns(self.ambient_dim, &self.vectors)
    }

    /// Coefficients `⟨v, u_i⟩`.
    pub fn coords(&self, v: &[T]) -> Vec<T> {
        self.vectors.iter().map(|u| vecops::dot(u, v)).collect()
    }

    /// `Σ c_i u_i`
    pub fn combine(&self, c: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.ambient_dim];
        for (u, &ci) in self.vectors.iter().zip(c) {
            vecops::axpy(ci, u, &mut out);
        }
        out
    }

    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: v.len() });
        }
        Ok(self.combine(&self.coords(v)))
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim;
        if self.dim() == 0 {
            return Self::standard(n);
        }
        let h = Householder::factor(&self.as_matrix(), true, T::lit(T::RANK_TOL));
        let r = h.rank();
        let q = h.q_columns(n);
        Self { ambient_dim: n, vectors: (r..n).map(|j| q.column(j)).collect() }
    }

    /// Orthonormal basis of `diag(scale) · span`.
    pub fn rescaled(&self, scale: &[T]) -> Self {
        let m = self.as_matrix().scale_rows(scale);
        Self::column_space(&m)
    }
}

/// `Π_span(basis)(v)`
pub fn project<T: Scalar>(basis: &OrthonormalBasis<T>, v: &[T]) -> Result<Vec<T>> {
    basis.project(v)
}

/// Orthonormal bases of `ker A` and `im Aᵀ`.
pub fn kernel_and_complement<T: Scalar>(a: &DenseMatrix<T>) -> Result<(OrthonormalBasis<T>, OrthonormalBasis<T>)> {
    let (m, n) = a.shape();
    if m == 0 {
        return Ok((OrthonormalBasis::standard(n), OrthonormalBasis::empty(n)));
    }
    if m > n {
        return Err(Error::RankDeficient { rank: n, expected: m });
    }
    let h = Householder::factor(&a.transpose(), true, T::lit(T::RANK_TOL));
    if h.rank() < m {
        return Err(Error::RankDeficient { rank: h.rank(), expected: m });
    }
    let q = h.q_columns(n);
    let comp = (0..m).map(|j| q.column(j)).collect();
    let ker = (m..n).map(|j| q.column(j)).collect();
    Ok((OrthonormalBasis { ambient_dim: n, vectors: ker }, OrthonormalBasis { ambient_dim: n, vectors: comp }))
}

/// Minimum-norm solution of `A x = b` (least-squares if inconsistent).
pub fn min_norm_solution<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    if a.rows() == 0 {
        return Ok(vec![T::zero(); a.cols()]);
    }
    Ok(Cod::new(a, T::lit(T::RANK_TOL)).min_norm_solve(b))
}
