//! Floating-point scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. The crate root exposes `f64` aliases for
//! the common types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type usable by the contagion, spectral and reconstruction code.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Default convergence threshold on `max |Δh|`.
    const CONTAGION_TOL: f64;
    /// Distance from the clip boundary under which a bank counts as defaulted.
    const DEFAULT_EPS: f64;
    /// Half-width of the band around 1 reported as critical.
    const CRITICAL_BAND: f64;

    /// Lossless for every literal used in the crate.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in a float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// `self > 0`; false for NaN.
    fn is_positive(self) -> bool {
        self > Self::zero()
    }
}

impl Scalar for f64 {
    const CONTAGION_TOL: f64 = 1e-10;
    const DEFAULT_EPS: f64 = 1e-12;
    const CRITICAL_BAND: f64 = 1e-9;
}

impl Scalar for f32 {
    const CONTAGION_TOL: f64 = 1e-6;
    const DEFAULT_EPS: f64 = 1e-6;
    const CRITICAL_BAND: f64 = 1e-5;
}
