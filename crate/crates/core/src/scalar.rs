//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt;

use nalgebra as na;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`) underlying the complex matrices.
///
/// Tolerances throughout the crate are written as `f64` literals and converted
/// with [`Real::lit`]; the default thresholds assume double precision.
pub trait Real:
    na::RealField + Copy + FromPrimitive + ToPrimitive + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Widens (or narrows) into `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex entry type used by every matrix in the crate.
pub type Complex<T> = na::Complex<T>;
