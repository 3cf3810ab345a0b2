use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Real scalar used throughout the crate. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// sign(l) with sign(0) = 0.
pub fn sign(l: i64) -> i64 {
    l.signum()
}
