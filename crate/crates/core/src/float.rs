use std::iter::Sum;

use ndarray::NdFloat;
use num_traits::FromPrimitive;

/// Floating point scalar used by every numeric routine in the crate.
///
/// Implemented for [`f32`] and [`f64`]. The simulation generator and the
/// result store work in `f64`; solvers, metrics and the ANOVA machinery are
/// generic so they can be run in single precision as well.
pub trait Float: NdFloat + FromPrimitive + Sum + for<'a> Sum<&'a Self> + Default {
    /// Converts an `f64` constant into `Self`.
    fn cst(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// Converts a count into `Self`.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Float for f32 {}
impl Float for f64 {}
