//! Floating point abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the solvers are generic over: `f32` or `f64`.
///
/// Tolerances throughout the crate are written for `f64`; with `f32` the
/// algorithms still run but iteration limits, not tolerances, end most
/// refinements.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// `self^(num/den)` for a rational exponent.
    #[inline]
    fn powr(self, num: i32, den: i32) -> Self {
        self.powf(Self::lit(num as f64 / den as f64))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// True when `x` is zero relative to `scale`, allowing a few ulps of roundoff.
#[inline]
pub(crate) fn near_zero<S: Scalar>(x: S, scale: S) -> bool {
    x.abs() <= S::lit(64.0) * S::epsilon() * scale.abs().max(S::min_positive_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_power() {
        assert!((8.0f64.powr(2, 3) - 4.0).abs() < 1e-14);
        assert!((8.0f32.powr(1, 3) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn near_zero_is_relative() {
        assert!(near_zero(1e-15, 1.0));
        assert!(!near_zero(1e-10, 1.0));
        assert!(near_zero(1e-5, 1e11));
    }
}
