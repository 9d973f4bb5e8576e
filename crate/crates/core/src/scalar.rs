//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::sync::Arc;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar the solvers are generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `Real` can represent (a rounding of) any `f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count or index.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    /// Lossy conversion used for error reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shared, thread-safe scalar function of one variable.
pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Wraps a closure as a [`ScalarFn`].
pub fn scalar_fn<T, F>(f: F) -> ScalarFn<T>
where
    F: Fn(T) -> T + Send + Sync + 'static,
{
    Arc::new(f)
}
