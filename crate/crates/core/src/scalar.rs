//! Scalar abstraction shared by every floating-point module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// `Debug` output is required to be a lossless round trip through `FromStr`,
/// which holds for both primitive float types.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the primitive floats.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

pub(crate) fn dist_sq<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// `a + t (b - a)`
pub(crate) fn lerp<T: Real>(a: &[T], b: &[T], t: T) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect()
}
