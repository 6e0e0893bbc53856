use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type used for positions and similarity scores: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable as a float")
    }

    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }

    /// `num / den`, or `zero_case` when the denominator is zero.
    fn ratio_or(num: usize, den: usize, zero_case: Self) -> Self {
        if den == 0 {
            zero_case
        } else {
            Self::of_usize(num) / Self::of_usize(den)
        }
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
