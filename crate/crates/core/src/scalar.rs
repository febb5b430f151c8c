//! Floating-point abstraction for the analytic model.
//!
//! The model is written against this trait so the same formulas run in
//! f32 or f64; concrete code elsewhere in the crate uses the [`crate::Real`]
//! alias.

use num_traits::{Float, FromPrimitive};

/// Any IEEE float wide enough for the model's log-space sums.
pub trait Scalar: Float + FromPrimitive + core::fmt::Debug + core::fmt::Display {
    /// Lossless conversion from a small integer count.
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("count fits in the scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
