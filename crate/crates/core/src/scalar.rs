//! Floating-point abstraction the rest of the crate is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar type for all billiard arithmetic: `f32` or `f64`.
///
/// The crate-root aliases pin `f64`, which is what the CLI and the
/// acceptance suite use; `f32` stays available for quick sweeps where
/// eight digits are enough.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only on values a float cannot
    /// represent at all, so it is safe for the fixed constants used here.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal not representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count not representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::one() / Self::two()
    }

    #[inline]
    fn four() -> Self {
        Self::two() + Self::two()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
