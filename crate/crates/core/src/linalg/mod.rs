//! Dense linear algebra: matrices, orthonormal bases, projections,
//! Gram-Schmidt, the deterministic approximate SVD and a Jacobi reference
//! SVD used as a test oracle.

mod basis;
mod gs;
mod matrix;
pub(crate) mod qr;
mod svd;
pub mod vecops;

pub use basis::{kernel_and_complement, min_norm_solution, project, OrthonormalBasis};
pub use gs::{orthogonalize, Orthogonalized};
pub use matrix::DenseMatrix;
pub use qr::solve_square;
pub use svd::{approx_svd, reference_singular_values, reference_singular_values_with, ApproxSvdResult};
