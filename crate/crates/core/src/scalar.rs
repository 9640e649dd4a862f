//! Floating point abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Relative tolerance the adaptive ODE integrator targets by default.
    const ODE_RTOL: f64;
    /// Default absolute tolerance on eigenvalue roots.
    const ROOT_TOL: f64;

    /// Converts an `f64` literal. Panics only if the value is unrepresentable,
    /// which cannot happen for finite literals in `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits a float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const ODE_RTOL: f64 = 1e-6;
    const ROOT_TOL: f64 = 1e-5;
}

impl Scalar for f64 {
    const ODE_RTOL: f64 = 1e-11;
    const ROOT_TOL: f64 = 1e-10;
}
