//! Floating point abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the numerical core is generic over (`f32` or `f64`).
pub trait Real:
    Float
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
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Converts an `f64` literal. Values outside the range saturate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest probability kept before taking logarithms.
    fn prob_floor() -> Self;

    /// Largest probability strictly below one.
    #[inline]
    fn prob_ceil() -> Self {
        Self::one() - Self::epsilon() / Self::lit(2.0)
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn prob_floor() -> Self {
        1e-300
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn prob_floor() -> Self {
        f32::MIN_POSITIVE
    }
}

/// Standard normal CDF.
#[inline]
pub fn norm_cdf<T: Real>(z: T) -> T {
    T::lit(0.5) * (-z / T::lit(std::f64::consts::SQRT_2)).erfc()
}

/// Standard normal density.
#[inline]
pub fn norm_pdf<T: Real>(z: T) -> T {
    let inv_sqrt_2pi = T::lit(0.398_942_280_401_432_7);
    inv_sqrt_2pi * (-(z * z) / T::lit(2.0)).exp()
}

/// `P(lo < Z <= hi)` for a standard normal `Z`, computed in the tail that keeps precision.
#[inline]
pub fn norm_interval<T: Real>(lo: T, hi: T) -> T {
    if hi <= lo {
        return T::zero();
    }
    if lo > T::zero() {
        // both bounds in the upper tail: difference of survival functions
        norm_cdf(-lo) - norm_cdf(-hi)
    } else {
        norm_cdf(hi) - norm_cdf(lo)
    }
}
