//! Scalar abstraction: every numeric routine is generic over [`Real`].

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over: `f32` or `f64`.
///
/// `nalgebra::RealField` supplies the field operations and elementary
/// functions; the `num_traits` bounds cover conversions from configuration
/// constants and into reports.
pub trait Real: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive + Default {
    /// Lossy conversion from an `f64` constant.
    fn cast(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// Lossy conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    fn infinity() -> Self {
        Self::cast(f64::INFINITY)
    }
}

impl Real for f32 {}
impl Real for f64 {}
