//! Scalar abstraction for the probability arithmetic.
//!
//! All distribution and bound computations are generic over [`Real`], so the
//! same code runs at `f64` (the default everywhere) or `f32`. Tolerances that
//! depend on the working precision live here as associated constants rather
//! than being sprinkled through the numeric code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used for probabilities and timesteps.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Tolerance on `sum(masses) + tail_mass = 1`.
    const NORM_EPS: Self;

    /// Generic slack for empirical checks (NBU margins and the like), scaled
    /// to what convolution chains at this precision can accumulate.
    const CHECK_EPS: Self;

    fn of_f64(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 conversion")
    }

    fn of_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 conversion")
    }

    fn half() -> Self {
        Self::of_f64(0.5)
    }

    fn two() -> Self {
        Self::of_f64(2.0)
    }
}

impl Real for f64 {
    const NORM_EPS: Self = 1e-12;
    const CHECK_EPS: Self = 1e-9;
}

impl Real for f32 {
    const NORM_EPS: Self = 1e-4;
    const CHECK_EPS: Self = 1e-3;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(<f64 as Real>::of_u64(7), 7.0);
        assert_eq!(<f32 as Real>::of_f64(0.25), 0.25f32);
        assert_eq!(f64::half() + f64::half(), 1.0);
    }
}
