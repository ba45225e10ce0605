//! Scalar abstraction shared by the neuron, synapse and graph-construction
//! arithmetic. Everything numeric is generic over [`Real`], which is
//! implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::soa::Accumulate;

/// Floating point type usable as model state and in graph construction.
pub trait Real: Float + FromPrimitive + ToPrimitive + Accumulate + Debug + Display + Send + Sync + 'static {
    /// Converts a literal or parameter value. Values outside the range of
    /// `Self` saturate to infinity, as with `as` casts.
    fn of(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
}
