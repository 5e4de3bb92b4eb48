//! Interior point method for dense LPs with subspace layered-least-squares
//! steps, plus a toolkit for exploring central-path geometry.

pub mod cplab;
pub mod error;
pub mod gen;
pub mod linalg;
pub mod lls;
pub mod model;
pub mod scalar;
pub mod solver;
pub mod steps;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type Basis = linalg::OrthonormalBasis<f64>;
pub type Instance = model::LpInstance<f64>;
pub type Subspaces = model::SubspaceForm<f64>;
pub type Point = model::Iterate<f64>;
pub type Config = solver::SolverConfig<f64>;
pub type Outcome = solver::Solution<f64>;
