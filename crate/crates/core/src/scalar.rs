//! Floating-point scalar abstraction.
//!
//! All path arithmetic in this crate is written against [`Scalar`] so the
//! same code runs at `f32` or `f64`. Estimator-facing code uses the `f64`
//! aliases exported from the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

pub trait Scalar:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Standard normal draw.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform draw on the open interval (0, 1).
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Open01.sample(rng)
    }
}

impl Scalar for f32 {
    #[inline]
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Open01.sample(rng)
    }
}

/// Convert an `f64` constant into the working scalar.
#[inline]
pub fn cst<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

/// Convert the working scalar back to `f64` for reporting.
#[inline]
pub fn real<T: Scalar>(x: T) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}

/// Gaussian draw with the given mean and variance.
#[inline]
pub fn normal_draw<T: Scalar, R: Rng + ?Sized>(mean: T, var: T, rng: &mut R) -> T {
    debug_assert!(var >= T::zero());
    mean + var.sqrt() * T::std_normal(rng)
}
