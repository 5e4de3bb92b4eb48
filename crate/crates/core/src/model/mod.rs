//! LP instances, the subspace form, iterates, the normalized duality gap
//! and neighborhood membership.

mod io;

pub use io::{GroundTruth, InstanceDocument, PartitionDoc};

use crate::error::{Error, Result};
use crate::linalg::{kernel_and_complement, min_norm_solution, vecops, DenseMatrix, OrthonormalBasis};
use crate::scalar::Scalar;

/// `min ⟨c,x⟩ s.t. Ax = b, x ≥ 0`, optionally with a starting pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance<T> {
    pub a: DenseMatrix<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub x0: Option<Vec<T>>,
    pub s0: Option<Vec<T>>,
}

impl<T: Scalar> LpInstance<T> {
    pub fn new(a: DenseMatrix<T>, b: Vec<T>, c: Vec<T>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        if c.len() != a.cols() {
            return Err(Error::DimensionMismatch { expected: a.cols(), found: c.len() });
        }
        if !vecops::all_finite(&b) || !vecops::all_finite(&c) {
            return Err(Error::InvalidInstance("non-finite data".into()));
        }
        Ok(Self { a, b, c, x0: None, s0: None })
    }

    pub fn with_start(mut self, x0: Vec<T>, s0: Vec<T>) -> Self {
        self.x0 = Some(x0);
        self.s0 = Some(s0);
        self
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Checks rank and, when present, the starting pair.
    pub fn validate(&self) -> Result<SubspaceForm<T>> {
        let sub = to_subspace_form(self)?;
        match (&self.x0, &self.s0) {
            (Some(x0), Some(s0)) => {
                let n = self.n();
                if x0.len() != n || s0.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: x0.len().min(s0.len()) });
                }
                if x0.iter().chain(s0).any(|&v| v <= T::zero() || !v.is_finite()) {
                    return Err(Error::InvalidInstance("starting point not strictly positive".into()));
                }
                let tol = T::lit(T::FEAS_TOL);
                if sub.primal_residual(x0) > tol {
                    return Err(Error::InvalidInstance("x0 violates Ax = b".into()));
                }
                if sub.dual_residual(s0) > tol {
                    return Err(Error::InvalidInstance("s0 - c is not in the row space of A".into()));
                }
            }
            (None, None) => {}
            _ => return Err(Error::InvalidInstance("x0 and s0 must be given together".into())),
        }
        Ok(sub)
    }
}

/// `W = ker A`, `W⊥ = im Aᵀ`, the minimum-norm solution `d` of `Ad = b`, and
/// the cost `c`. `A` and `b` are kept for residual computations.
#[derive(Clone, Debug)]
pub struct SubspaceForm<T> {
    pub w: OrthonormalBasis<T>,
    pub wperp: OrthonormalBasis<T>,
    pub d: Vec<T>,
    pub c: Vec<T>,
    pub a: DenseMatrix<T>,
    pub b: Vec<T>,
}

pub fn to_subspace_form<T: Scalar>(inst: &LpInstance<T>) -> Result<SubspaceForm<T>> {
    let (w, wperp) = kernel_and_complement(&inst.a)?;
    let d = min_norm_solution(&inst.a, &inst.b)?;
    Ok(SubspaceForm { w, wperp, d, c: inst.c.clone(), a: inst.a.clone(), b: inst.b.clone() })
}

impl<T: Scalar> SubspaceForm<T> {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn m(&self) -> usize {
        self.wperp.dim()
    }

    /// `‖Ax − b‖ / (1 + ‖b‖)`
    pub fn primal_residual(&self, x: &[T]) -> T {
        let r = vecops::sub(&self.a.mul_vec(x), &self.b);
        vecops::norm(&r) / (T::one() + vecops::norm(&self.b))
    }

    /// `‖Π_W(s − c)‖ / (1 + ‖c‖)`
    pub fn dual_residual(&self, s: &[T]) -> T {
        let r = self.w.combine(&self.w.coords(&vecops::sub(s, &self.c)));
        vecops::norm(&r) / (T::one() + vecops::norm(&self.c))
    }

    pub fn is_feasible_pair(&self, x: &[T], s: &[T]) -> bool {
        let tol = T::lit(T::FEAS_TOL);
        self.primal_residual(x) <= tol && self.dual_residual(s) <= tol
    }
}

/// Primal-dual point with cached local-geometry quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct Iterate<T> {
    pub x: Vec<T>,
    pub s: Vec<T>,
    pub mu_bar: T,
    /// `(xs/μ̄)^{1/2}`
    pub xi: Vec<T>,
    /// `x/ξ`
    pub x_hat: Vec<T>,
    /// `s/ξ`
    pub s_hat: Vec<T>,
    pub centrality_err: T,
}

impl<T: Scalar> Iterate<T> {
    pub fn new(x: Vec<T>, s: Vec<T>) -> Result<Self> {
        if x.len() != s.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: s.len() });
        }
        if x.is_empty() {
            return Err(Error::DegenerateInput("empty iterate".into()));
        }
        if x.iter().chain(&s).any(|&v| v <= T::zero() || !v.is_finite()) {
            return Err(Error::DegenerateInput("iterate not strictly positive".into()));
        }
        let mu = mu_bar(&x, &s);
        let sqrt_mu = mu.sqrt();
        let xi: Vec<T> = x.iter().zip(&s).map(|(&a, &b)| (a * b / mu).sqrt()).collect();
        let x_hat = x.iter().zip(&s).map(|(&a, &b)| (a / b).sqrt() * sqrt_mu).collect();
        let s_hat = x.iter().zip(&s).map(|(&a, &b)| (b / a).sqrt() * sqrt_mu).collect();
        let dev: Vec<T> = x.iter().zip(&s).map(|(&a, &b)| a * b / mu - T::one()).collect();
        let centrality_err = vecops::norm(&dev);
        Ok(Self { x, s, mu_bar: mu, xi, x_hat, s_hat, centrality_err })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

/// `⟨x,s⟩ / n`
pub fn mu_bar<T: Scalar>(x: &[T], s: &[T]) -> T {
    vecops::dot(x, s) / T::from_usize(x.len()).expect("length")
}

/// `‖xs/μ̄ − 1‖ ≤ β` up to `NBHD_TOL`, plus feasibility.
pub fn in_l2_neighborhood<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>, beta: T) -> bool {
    z.centrality_err <= beta * (T::one() + T::lit(T::NBHD_TOL)) && sub.is_feasible_pair(&z.x, &z.s)
}

/// `x_i s_i ≥ (1−θ)μ̄` for all `i` up to `NBHD_TOL`, plus feasibility.
pub fn in_wide_neighborhood<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>, theta: T) -> bool {
    let lower = (T::one() - theta) * z.mu_bar * (T::one() - T::lit(T::NBHD_TOL));
    z.x.iter().zip(&z.s).all(|(&a, &b)| a * b >= lower) && sub.is_feasible_pair(&z.x, &z.s)
}

/// `|⟨x,s⟩ + ⟨x',s'⟩ − ⟨x,s'⟩ − ⟨x',s⟩|`, which vanishes for feasible pairs.
pub fn gap_identity_check<T: Scalar>(x: &[T], s: &[T], xp: &[T], sp: &[T]) -> T {
    (vecops::dot(x, s) + vecops::dot(xp, sp) - vecops::dot(x, sp) - vecops::dot(xp, s)).abs()
}
