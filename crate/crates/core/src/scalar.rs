//! Scalar abstraction shared by the continuous parts of the model.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance under which a value is snapped to the nearest integer
    /// before taking a ceiling or floor.
    fn integer_guard() -> Self {
        let eps = Self::epsilon() * Self::from_f64(8.0).unwrap();
        let guard = Self::from_f64(1e-9).unwrap();
        if eps > guard {
            eps
        } else {
            guard
        }
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

fn snap<T: Scalar>(x: T) -> Option<T> {
    let nearest = x.round();
    let scale = T::one().max(x.abs());
    if (x - nearest).abs() <= T::integer_guard() * scale {
        Some(nearest)
    } else {
        None
    }
}

/// `⌈x⌉` for a finite non-negative `x`, treating values within the integer guard
/// of an integer as that integer. Returns `None` for non-finite or negative input.
pub fn guarded_ceil<T: Scalar>(x: T) -> Option<u64> {
    if !x.is_finite() || x < T::zero() {
        return None;
    }
    snap(x).unwrap_or_else(|| x.ceil()).to_u64()
}

/// `⌊x⌋` with the same snapping rule as [`guarded_ceil`].
pub fn guarded_floor<T: Scalar>(x: T) -> Option<u64> {
    if !x.is_finite() || x < T::zero() {
        return None;
    }
    snap(x).unwrap_or_else(|| x.floor()).to_u64()
}
