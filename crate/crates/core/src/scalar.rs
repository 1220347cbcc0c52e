//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};

/// Real floating-point scalar used throughout the crate.
///
/// Implemented for `f32` and `f64`. Default tolerances are expressed in
/// `f64` and converted with [`Real::lit`]; tolerances that would fall below
/// the type's resolution are clamped with [`Real::floor_eps`].
pub trait Real:
    Float + FloatConst + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("f64 literal representable")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn from_usize(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `max(x, k * epsilon)`: keeps a tolerance above the rounding level of the type.
    #[inline]
    fn floor_eps(x: f64, k: f64) -> Self {
        let v = Self::lit(x);
        let floor = Self::lit(k) * Self::epsilon();
        if v > floor {
            v
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Sign as `+1` / `-1`; zero maps to `+1`.
#[inline]
pub(crate) fn sign_of<F: Real>(x: F) -> F {
    if x < F::zero() {
        -F::one()
    } else {
        F::one()
    }
}
