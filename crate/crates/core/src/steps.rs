//! Predictor and corrector directions and the two step-length rules.

use crate::error::Result;
use crate::linalg::qr::Householder;
use crate::linalg::{vecops, DenseMatrix, OrthonormalBasis};
use crate::model::{Iterate, SubspaceForm};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Affine,
    Corrector,
    SubspaceLls,
}

/// A primal-dual direction with `dx ∈ W` and `ds ∈ W⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction<T> {
    pub dx: Vec<T>,
    pub ds: Vec<T>,
    pub kind: StepKind,
}

impl<T: Scalar> Direction<T> {
    /// `‖Δx Δs‖`
    pub fn product_norm(&self) -> T {
        vecops::norm(&vecops::hadamard(&self.dx, &self.ds))
    }
}

/// The subspace `y⁻¹Y` for a fixed `Y` with orthonormal basis, together
/// with the map from its local coordinates back into `Y`.
#[derive(Clone, Debug)]
pub struct ScaledSubspace<T> {
    q: DenseMatrix<T>,
    orig: DenseMatrix<T>,
    r: DenseMatrix<T>,
}

impl<T: Scalar> ScaledSubspace<T> {
    pub fn new(basis: &OrthonormalBasis<T>, y: &[T]) -> Self {
        let n = basis.ambient_dim();
        let k = basis.dim();
        let orig = basis.as_matrix();
        let inv: Vec<T> = y.iter().map(|&v| T::one() / v).collect();
        let scaled = orig.scale_rows(&inv);
        // rows sorted by decreasing norm keep Householder QR row-wise stable
        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<T> = (0..n).map(|i| vecops::norm(scaled.row(i))).collect();
        order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        let h = Householder::factor(&scaled.select_rows(&order), true, T::zero());
        let q_sorted = h.q_columns(k);
        let mut q = DenseMatrix::zeros(n, k);
        for (pos, &row) in order.iter().enumerate() {
            for j in 0..k {
                q.set(row, j, q_sorted.get(pos, j));
            }
        }
        let r = h.r_rows(k);
        let orig = orig.select_cols(h.perm());
        Self { q, orig, r }
    }

    pub fn dim(&self) -> usize {
        self.q.cols()
    }

    /// Orthonormal basis of `y⁻¹Y` as columns.
    pub fn basis(&self) -> &DenseMatrix<T> {
        &self.q
    }

    /// Coordinates of `Π_{y⁻¹Y}(v)` in [`Self::basis`].
    pub fn coords(&self, v: &[T]) -> Vec<T> {
        self.q.tr_mul_vec(v)
    }

    /// `Π_{y⁻¹Y}(v)`
    pub fn project(&self, v: &[T]) -> Vec<T> {
        self.q.mul_vec(&self.coords(v))
    }

    /// The element `y · (Q u)` of `Y`, formed from the basis of `Y`.
    pub fn to_original(&self, u: &[T]) -> Vec<T> {
        let k = self.dim();
        let mut c = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut acc = u[i];
            for j in (i + 1)..k {
                acc -= self.r.get(i, j) * c[j];
            }
            let d = self.r.get(i, i);
            c[i] = if d == T::zero() { T::zero() } else { acc / d };
        }
        self.orig.mul_vec(&c)
    }
}

/// Local geometry at an iterate: `x̂⁻¹W` and `ŝ⁻¹W⊥`.
#[derive(Clone, Debug)]
pub struct LocalGeometry<T> {
    pub primal: ScaledSubspace<T>,
    pub dual: ScaledSubspace<T>,
}

impl<T: Scalar> LocalGeometry<T> {
    pub fn new(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Self {
        Self { primal: ScaledSubspace::new(&sub.w, &z.x_hat), dual: ScaledSubspace::new(&sub.wperp, &z.s_hat) }
    }
}

/// `Δx = −x̂ Π_{x̂⁻¹W}(ξ)`, `Δs = −ŝ Π_{ŝ⁻¹W⊥}(ξ)`.
pub fn affine_direction<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Direction<T> {
    affine_direction_in(&LocalGeometry::new(z, sub), z)
}

pub fn affine_direction_in<T: Scalar>(geom: &LocalGeometry<T>, z: &Iterate<T>) -> Direction<T> {
    let dx = geom.primal.to_original(&geom.primal.coords(&z.xi));
    let ds = geom.dual.to_original(&geom.dual.coords(&z.xi));
    Direction { dx: vecops::scaled(-T::one(), &dx), ds: vecops::scaled(-T::one(), &ds), kind: StepKind::Affine }
}

/// Solution of `sΔx + xΔs = μ̄1 − xs` with `Δx ∈ W`, `Δs ∈ W⊥`.
pub fn corrector_direction<T: Scalar>(z: &Iterate<T>, sub: &SubspaceForm<T>) -> Direction<T> {
    corrector_direction_in(&LocalGeometry::new(z, sub), z)
}

pub fn corrector_direction_in<T: Scalar>(geom: &LocalGeometry<T>, z: &Iterate<T>) -> Direction<T> {
    let v: Vec<T> = z.xi.iter().map(|&t| T::one() / t - t).collect();
    let dx = geom.primal.to_original(&geom.primal.coords(&v));
    let ds = geom.dual.to_original(&geom.dual.coords(&v));
    Direction { dx, ds, kind: StepKind::Corrector }
}

/// `max{β/√n, 1 − ‖ΔxΔs‖/(βμ̄)}` clamped to `[0, 1]`.
pub fn step_length_affine<T: Scalar>(z: &Iterate<T>, dir: &Direction<T>, beta: T) -> T {
    let n = T::from_usize(z.n()).expect("n");
    let a = (beta / n.sqrt()).max(T::one() - dir.product_norm() / (beta * z.mu_bar));
    a.max(T::zero()).min(T::one())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepLength<T> {
    pub alpha: T,
    /// False when `‖ΔxΔs‖ > βμ̄/4`; `alpha` is then zero.
    pub precondition_ok: bool,
}

/// Step length for an arbitrary direction: with
/// `γ = ‖(x+Δx)(s+Δs)‖/μ̄`, `α = max{0, 1 − 4γ/β}`.
pub fn step_length_general<T: Scalar>(z: &Iterate<T>, dir: &Direction<T>, beta: T) -> StepLength<T> {
    let quarter = T::lit(0.25);
    if dir.product_norm() > beta * z.mu_bar * quarter {
        return StepLength { alpha: T::zero(), precondition_ok: false };
    }
    let xp = vecops::add(&z.x, &dir.dx);
    let sp = vecops::add(&z.s, &dir.ds);
    let gamma = vecops::norm(&vecops::hadamard(&xp, &sp)) / z.mu_bar;
    let alpha = (T::one() - T::lit(4.0) * gamma / beta).max(T::zero()).min(T::one());
    StepLength { alpha, precondition_ok: true }
}

/// `(x + αΔx, s + αΔs)` as raw vectors.
pub fn step_point<T: Scalar>(z: &Iterate<T>, dir: &Direction<T>, alpha: T) -> (Vec<T>, Vec<T>) {
    (vecops::add_scaled(&z.x, alpha, &dir.dx), vecops::add_scaled(&z.s, alpha, &dir.ds))
}

/// `z + αΔz` as an iterate; fails if the point leaves the positive orthant.
pub fn apply_step<T: Scalar>(z: &Iterate<T>, dir: &Direction<T>, alpha: T) -> Result<Iterate<T>> {
    let (x, s) = step_point(z, dir, alpha);
    Iterate::new(x, s)
}
