//! Scalar abstraction for all numeric code in this crate.
//!
//! Every simulator, network and optimizer routine is generic over [`Real`]
//! so the same code runs in `f32` or `f64`. The crate root exports `f64`
//! aliases for the common case; `f32` is mostly useful for quick
//! experiments and for checking that nothing silently depends on double
//! precision.

use std::fmt;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar used throughout the crate.
///
/// The bound is a plain capability list: IEEE float operations, in-place
/// arithmetic, conversion from literals, and enough formatting to appear in
/// error messages and CSV output.
pub trait Real:
    Float + FromPrimitive + NumAssign + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
///
/// Panics only if the target type cannot represent ordinary finite values,
/// which cannot happen for the float types this crate is instantiated at.
#[inline]
pub fn real<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("finite f64 constant must convert to the scalar type")
}
