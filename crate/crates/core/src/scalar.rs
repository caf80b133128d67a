//! Floating-point abstraction shared by every numeric type in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Scalar type for masses, memberships, and feature values.
///
/// Implemented for `f32` and `f64`. The two tolerance hooks exist because
/// the thresholds that make sense for `f64` sit below `f32` resolution.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Maximum |Σm − 1| accepted when building a mass function.
    fn normalization_tolerance() -> Self;

    /// Smallest admissible `1 − K` in Dempster's rule.
    fn conflict_tolerance() -> Self;

    /// Lossy conversion from an `f64` literal.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn normalization_tolerance() -> Self {
        1e-6
    }

    fn conflict_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn normalization_tolerance() -> Self {
        1e-5
    }

    fn conflict_tolerance() -> Self {
        1e-6
    }
}
