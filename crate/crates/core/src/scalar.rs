//! Scalar abstraction for the simulator core.
//!
//! Everything that touches amplitudes or density-matrix elements is generic over
//! [`Real`], so the same kernels run in `f32` or `f64`. The crate root exposes
//! `f64` aliases, which is what the harness and all stated tolerances assume.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type usable as the real part of simulator amplitudes.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Sum + Debug + Display + Send + Sync + 'static
{
    /// Tolerance for structural checks (Hermiticity, idempotency, CPTP completeness).
    fn check_tolerance() -> Self;

    /// Threshold under which a postselected probability counts as empty.
    fn empty_threshold() -> Self;

    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn check_tolerance() -> Self {
        1e-9
    }

    fn empty_threshold() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn check_tolerance() -> Self {
        1e-4
    }

    fn empty_threshold() -> Self {
        1e-7
    }
}
