//! Scalar abstractions.
//!
//! Floating-point code is written against [`Real`]; formulas that only need
//! field arithmetic are written against [`Field`] so they can also be
//! evaluated exactly over rationals.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_rational::{BigRational, Rational64};
use num_traits::{Float, FromPrimitive, Num, NumAssign};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to every Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact or approximate field arithmetic.
pub trait Field: Clone + PartialEq + PartialOrd + Debug + Num + Neg<Output = Self> {
    fn from_u64(x: u64) -> Self;
}

impl Field for f32 {
    fn from_u64(x: u64) -> Self {
        x as f32
    }
}

impl Field for f64 {
    fn from_u64(x: u64) -> Self {
        x as f64
    }
}

impl Field for Rational64 {
    fn from_u64(x: u64) -> Self {
        Rational64::from_integer(i64::try_from(x).expect("u64 fits in i64"))
    }
}

impl Field for BigRational {
    fn from_u64(x: u64) -> Self {
        BigRational::from_integer(x.into())
    }
}
