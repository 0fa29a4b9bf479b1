//! Scalar abstraction shared by the measure, process and certificate code.
//!
//! Everything that is pure arithmetic over probabilities and bound terms is
//! written against [`Scalar`], so it runs in `f32` as well as `f64`. The
//! simulators and learners fix `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

pub trait Scalar: Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Tolerance used when checking that weights sum to one.
    ///
    /// `1e-12` for `f64`; scaled up to a few ulps per term for narrower types.
    fn simplex_tolerance(len: usize) -> Self {
        let ulps = Self::epsilon() * Self::from_count(16 * len.max(1));
        ulps.max(Self::lit(1e-12))
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}
