//! Scalar abstraction shared by every geometric routine.
//!
//! All math in this crate is written against [`Scalar`], which `f32` and
//! `f64` implement. Tolerances that are meaningful only in double precision
//! are widened for `f32` through [`Scalar::tol`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Default central-difference step (radians) for local metric estimates.
    const FD_STEP: f64;

    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance that is `x` in double precision and never tighter than a
    /// few hundred ulps of this type.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(256.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    /// Degrees to radians.
    #[inline]
    fn deg(x: f64) -> Self {
        Self::lit(x.to_radians())
    }
}

impl Scalar for f32 {
    const FD_STEP: f64 = 1e-3;
}

impl Scalar for f64 {
    const FD_STEP: f64 = 1e-5;
}
