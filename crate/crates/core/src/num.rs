//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for probabilities, information measures and map weights.
///
/// Implemented for `f32` and `f64`. Raw data stays in `f64` inside a
/// [`Relation`](crate::dataset::Relation); algorithms convert on entry.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Tolerance used when comparing criteria for ties.
    const TIE_EPS: Self;

    fn from_f64_lossy(v: f64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as a float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const TIE_EPS: Self = 1e-6;

    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    const TIE_EPS: Self = 1e-12;

    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

/// Formats `v` with at most 12 significant digits, trimming trailing zeros.
///
/// Integral values print without a fractional part, so years and counts
/// survive a CSV round trip unchanged.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let rounded: f64 = format!("{:.11e}", v).parse().unwrap_or(v);
    format!("{}", rounded)
}
