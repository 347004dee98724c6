//! Scalar abstraction: every numeric kernel in this crate is generic over a
//! real floating-point type.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, NumAssign};

/// Real scalar type the tensor algebra and the dense kernels operate on.
///
/// `f32` and `f64` satisfy the bound; `f64` is the type the concrete aliases
/// at the crate root use and the one the CLI works in.
pub trait Real: Float + NumAssign + Sum + fmt::Debug + fmt::Display + 'static {
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn from_f64(v: f64) -> Self {
        num_traits::cast(v).expect("finite f64 constant must convert")
    }

    /// Lossy conversion to `f64`, used for reporting and serialization.
    /// (Named to avoid clashing with `ToPrimitive::to_f64`.)
    fn as_f64(self) -> f64 {
        num_traits::cast(self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Float + NumAssign + Sum + fmt::Debug + fmt::Display + 'static {}
