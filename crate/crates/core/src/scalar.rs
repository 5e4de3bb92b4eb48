//! Scalar abstraction shared by the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point type the solver and analysis routines are generic over.
///
/// The associated constants are the default tolerances for that precision.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative threshold below which a column is treated as dependent.
    const RANK_TOL: f64;
    /// Orthonormality tolerance accepted for stored bases.
    const ORTH_TOL: f64;
    /// Relative feasibility tolerance for iterates and instances.
    const FEAS_TOL: f64;
    /// Slack added to neighborhood membership tests.
    const NBHD_TOL: f64;

    /// Converts an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("representable literal")
    }

    /// Widens to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const RANK_TOL: f64 = 1e-10;
    const ORTH_TOL: f64 = 1e-9;
    const FEAS_TOL: f64 = 1e-9;
    const NBHD_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const RANK_TOL: f64 = 1e-5;
    const ORTH_TOL: f64 = 1e-4;
    const FEAS_TOL: f64 = 1e-4;
    const NBHD_TOL: f64 = 1e-6;
}
