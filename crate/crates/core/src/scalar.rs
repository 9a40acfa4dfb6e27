//! The floating-point abstraction every engine is written against.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the engines are generic over: `f32` or `f64`.
///
/// The tolerances quoted throughout the crate (1e-10, 1e-12, ...) are
/// `f64` tolerances; `f32` instantiations work but only to single precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    // f64 -> f32 / f64 never fails (it may round)
    T::from_f64(x).unwrap()
}

/// Converts a count into `T`.
#[inline(always)]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).unwrap()
}
