//! Associated partition, lifting maps in local geometry, cheap subspaces
//! and the subspace layered-least-squares direction.

use crate::error::{Error, Result};
use crate::linalg::qr::Cod;
use crate::linalg::{approx_svd, reference_singular_values, vecops, DenseMatrix, OrthonormalBasis};
use crate::model::{Iterate, SubspaceForm};
use crate::scalar::Scalar;
use crate::steps::{affine_direction_in, Direction, LocalGeometry, ScaledSubspace, StepKind};

/// Disjoint index sets covering `0..n`, each sorted.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Partition {
    pub b: Vec<usize>,
    pub n: Vec<usize>,
}

impl Partition {
    /// Partition with the given `B` side; `N` is the complement.
    pub fn from_b(total: usize, b: &[usize]) -> Self {
        let mut mask = vec![false; total];
        for &i in b {
            mask[i] = true;
        }
        Self::from_mask(&mask)
    }

    /// `mask[i]` true puts `i` into `B`.
    pub fn from_mask(mask: &[bool]) -> Self {
        let b = (0..mask.len()).filter(|&i| mask[i]).collect();
        let n = (0..mask.len()).filter(|&i| !mask[i]).collect();
        Self { b, n }
    }

    pub fn len(&self) -> usize {
        self.b.len() + self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|N Δ N'|`
    pub fn n_symmetric_difference(&self, other: &Partition) -> usize {
        let total = self.len().max(other.len());
        let mut a = vec![false; total];
        let mut c = vec![false; total];
        self.n.iter().for_each(|&i| a[i] = true);
        other.n.iter().for_each(|&i| c[i] = true);
        (0..total).filter(|&i| a[i] != c[i]).count()
    }
}

/// `B = {i : |Δx_i/x_i| < |Δs_i/s_i|}`; ties go to `N`.
pub fn associated_partition<T: Scalar>(z: &Iterate<T>, dir_affine: &Direction<T>) -> Partition {
    let mask: Vec<bool> = (0..z.n())
        .map(|i| (dir_affine.dx[i] / z.x[i]).abs() < (dir_affine.ds[i] / z.s[i]).abs())
        .collect();
    Partition::from_mask(&mask)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Dual,
}

/// Matrix form of the lifting map `ℓ_I` on a subspace `Y`: for `x` on the
/// coordinates `I`, the `J`-part of the minimum-norm `w ∈ Y` with
/// `w_I = Π_{π_I(Y)}(x)`.
#[derive(Clone, Debug)]
pub struct LiftingOperator<T> {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    /// `|J| × dim π_I(Y)`, acting on coordinates in `basis_source`.
    pub matrix: DenseMatrix<T>,
    /// Orthonormal basis of `π_I(Y)` inside `R^{|I|}`.
    pub basis_source: OrthonormalBasis<T>,
    q: DenseMatrix<T>,
    cod: Cod<T>,
}

impl<T: Scalar> LiftingOperator<T> {
    /// Builds `ℓ_I` on the span of the orthonormal columns of `q`.
    pub fn from_basis(q: &DenseMatrix<T>, source: &[usize]) -> Result<Self> {
        let n = q.rows();
        let mut mask = vec![false; n];
        for &i in source {
            if i >= n {
                return Err(Error::DimensionMismatch { expected: n, found: i });
            }
            mask[i] = true;
        }
        let source: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
        let target: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
        if source.is_empty() || target.is_empty() {
            return Err(Error::EmptySide);
        }
        let qi = q.select_rows(&source);
        let cod = Cod::new(&qi, T::lit(T::RANK_TOL));
        let r = cod.range().cols();
        let basis_source = OrthonormalBasis::new(source.len(), cod.range().columns())
            .unwrap_or_else(|_| OrthonormalBasis::span_of(source.len(), &cod.range().columns()));
        let mut cols = Vec::with_capacity(r);
        for k in 0..r {
            let mut e = vec![T::zero(); r];
            e[k] = T::one();
            let u = cod.min_norm_from_range_coords(&e);
            let w = q.mul_vec(&u);
            cols.push(vecops::gather(&w, &target));
        }
        let matrix = DenseMatrix::from_columns(target.len(), &cols);
        Ok(Self { source, target, matrix, basis_source, q: q.clone(), cod })
    }

    /// `dim π_I(Y)`
    pub fn rank(&self) -> usize {
        self.basis_source.dim()
    }

    /// Basis coordinates of `Π_{π_I(Y)}(x)`.
    pub fn coords(&self, x: &[T]) -> Vec<T> {
        self.basis_source.coords(x)
    }

    /// Coefficients `u` of the lift `L_I(x) = Q u` in the basis of `Y`.
    pub fn lift_coeffs(&self, x: &[T]) -> Vec<T> {
        self.cod.min_norm_solve(x)
    }

    /// `L_I(x)` as a full vector of `Y`.
    pub fn lift(&self, x: &[T]) -> Vec<T> {
        self.q.mul_vec(&self.lift_coeffs(x))
    }

    /// `ℓ_I(x) = (L_I(x))_J`
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        vecops::gather(&self.lift(x), &self.target)
    }
}

/// `ℓ_I` on `y⁻¹W` (primal side) or `y⁻¹W⊥` (dual side).
pub fn lifting_operator<T: Scalar>(
    sub: &SubspaceForm<T>,
    rescale: &[T],
    source: &[usize],
    side: Side,
) -> Result<LiftingOperator<T>> {
    if rescale.len() != sub.n() {
        return Err(Error::DimensionMismatch { expected: sub.n(), found: rescale.len() });
    }
    if rescale.iter().any(|&v| v <= T::zero()) {
        return Err(Error::DegenerateInput("rescaling must be positive".into()));
    }
    let basis = match side {
        Side::Primal => &sub.w,
        Side::Dual => &sub.wperp,
    };
    let scaled = ScaledSubspace::new(basis, rescale);
    LiftingOperator::from_basis(scaled.basis(), source)
}

/// `τ = β / (16 √n)`
pub fn threshold<T: Scalar>(beta: T, n: usize) -> T {
    beta / (T::lit(16.0) * T::from_usize(n).expect("n").sqrt())
}

/// Cheap subspaces `V ⊆ π_N(x̂⁻¹W)` and `U ⊆ π_B(ŝ⁻¹W⊥)`.
#[derive(Clone, Debug)]
pub struct CheapSubspaces<T> {
    pub v: OrthonormalBasis<T>,
    pub u: OrthonormalBasis<T>,
    pub tau: T,
    pub rayleigh_primal: Vec<T>,
    pub rayleigh_dual: Vec<T>,
    pub primal_lift: LiftingOperator<T>,
    pub dual_lift: LiftingOperator<T>,
}

fn cheap_prefix<T: Scalar>(op: &LiftingOperator<T>, cutoff: T) -> Result<(OrthonormalBasis<T>, Vec<T>)> {
    let ambient = op.source.len();
    if op.rank() == 0 {
        return Ok((OrthonormalBasis::empty(ambient), Vec::new()));
    }
    let svd = approx_svd(&op.matrix)?;
    let keep = svd.rayleigh.iter().rposition(|&r| r <= cutoff).map_or(0, |p| p + 1);
    let vecs: Vec<Vec<T>> = (0..keep).map(|j| op.basis_source.combine(&svd.v.column(j))).collect();
    let basis = OrthonormalBasis::new(ambient, vecs.clone()).unwrap_or_else(|_| OrthonormalBasis::span_of(ambient, &vecs));
    Ok((basis, svd.rayleigh))
}

pub fn cheap_subspaces<T: Scalar>(
    z: &Iterate<T>,
    part: &Partition,
    sub: &SubspaceForm<T>,
    beta: T,
) -> Result<CheapSubspaces<T>> {
    cheap_subspaces_in(&LocalGeometry::new(z, sub), z, part, beta)
}

pub fn cheap_subspaces_in<T: Scalar>(
    geom: &LocalGeometry<T>,
    z: &Iterate<T>,
    part: &Partition,
    beta: T,
) -> Result<CheapSubspaces<T>> {
    if part.b.is_empty() || part.n.is_empty() {
        return Err(Error::EmptySide);
    }
    let n = z.n();
    let tau = threshold(beta, n);
    let cutoff = tau / T::from_usize(n).expect("n");
    let primal_lift = LiftingOperator::from_basis(geom.primal.basis(), &part.n)?;
    let dual_lift = LiftingOperator::from_basis(geom.dual.basis(), &part.b)?;
    let (v, rayleigh_primal) = cheap_prefix(&primal_lift, cutoff)?;
    let (u, rayleigh_dual) = cheap_prefix(&dual_lift, cutoff)?;
    Ok(CheapSubspaces { v, u, tau, rayleigh_primal, rayleigh_dual, primal_lift, dual_lift })
}

/// Subspace LLS direction with its residuals `ρ^p = ξ + δ^p`,
/// `ρ^d = ξ + δ^d` in local coordinates.
#[derive(Clone, Debug)]
pub struct LlsDirection<T> {
    pub dir: Direction<T>,
    pub rho_p: Vec<T>,
    pub rho_d: Vec<T>,
    /// `‖ρ^p_N‖`
    pub rho_p_n: T,
    /// `‖ρ^d_B‖`
    pub rho_d_b: T,
}

/// Computes the subspace LLS direction. `cheap` may be `None` only when a
/// side of the partition is empty, in which case the one-sided affine
/// fallback is used.
pub fn subspace_lls_direction<T: Scalar>(
    z: &Iterate<T>,
    part: &Partition,
    cheap: Option<&CheapSubspaces<T>>,
    geom: &LocalGeometry<T>,
) -> Result<LlsDirection<T>> {
    let n = z.n();
    let (dx, ds) = if part.n.is_empty() || part.b.is_empty() {
        let aff = affine_direction_in(geom, z);
        if part.n.is_empty() {
            (vec![T::zero(); n], aff.ds)
        } else {
            (aff.dx, vec![T::zero(); n])
        }
    } else {
        let cheap = cheap.ok_or(Error::EmptySide)?;
        let xi_n = vecops::gather(&z.xi, &part.n);
        let delta_n = vecops::scaled(-T::one(), &cheap.v.project(&xi_n)?);
        let dx = geom.primal.to_original(&cheap.primal_lift.lift_coeffs(&delta_n));
        let xi_b = vecops::gather(&z.xi, &part.b);
        let delta_b = vecops::scaled(-T::one(), &cheap.u.project(&xi_b)?);
        let ds = geom.dual.to_original(&cheap.dual_lift.lift_coeffs(&delta_b));
        (dx, ds)
    };
    let rho_p: Vec<T> = (0..n).map(|i| z.xi[i] + dx[i] / z.x_hat[i]).collect();
    let rho_d: Vec<T> = (0..n).map(|i| z.xi[i] + ds[i] / z.s_hat[i]).collect();
    let rho_p_n = vecops::norm(&vecops::gather(&rho_p, &part.n));
    let rho_d_b = vecops::norm(&vecops::gather(&rho_d, &part.b));
    Ok(LlsDirection { dir: Direction { dx, ds, kind: StepKind::SubspaceLls }, rho_p, rho_d, rho_p_n, rho_d_b })
}

fn padded_singular_values<T: Scalar>(m: &DenseMatrix<T>, len: usize) -> Result<Vec<T>> {
    let mut s = if m.cols() == 0 || m.rows() == 0 { Vec::new() } else { reference_singular_values(m)? };
    s.resize(len.max(s.len()), T::zero());
    Ok(s)
}

/// `max_i σ_{i+|NΔN̂|}(ℓ_N̂^W) − σ_i(ℓ_N^W)` over the reference singular
/// values; non-positive when the shift inequality holds.
pub fn singular_value_shift_check<T: Scalar>(w: &OrthonormalBasis<T>, part_a: &Partition, part_b: &Partition) -> Result<T> {
    let n = w.ambient_dim();
    let q = w.as_matrix();
    let la = LiftingOperator::from_basis(&q, &part_a.n)?;
    let lb = LiftingOperator::from_basis(&q, &part_b.n)?;
    let sa = padded_singular_values(&la.matrix, n)?;
    let sb = padded_singular_values(&lb.matrix, n)?;
    let shift = part_a.n_symmetric_difference(part_b);
    let mut worst = T::neg_infinity();
    for i in 0..sa.len() {
        let rhs = sb.get(i + shift).copied().unwrap_or(T::zero());
        worst = worst.max(rhs - sa[i]);
    }
    Ok(worst)
}
