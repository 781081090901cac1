use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar used by the estimator.
///
/// Needs arithmetic with division plus an ordering, so exact rationals
/// qualify alongside the float types.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    /// Converts a decimal literal. Exact for rationals up to the
    /// approximation `FromPrimitive::from_f64` makes.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

/// Floating-point scalar for statistics that need square roots.
pub trait Real: Scalar + Float + Default + Send + Sync {}

impl<T> Real for T where T: Scalar + Float + Default + Send + Sync {}
