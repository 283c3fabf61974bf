//! Scalar abstraction shared by the linear-algebra, root-data and flag modules.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by every generic routine in this crate.
///
/// Implemented for `f32` and `f64`. Everything downstream of the flag module
/// (sampling, regression, reports) is pinned to `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::Debug {
    /// Unit roundoff of the type.
    fn unit_roundoff() -> Self {
        Self::default_epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}
