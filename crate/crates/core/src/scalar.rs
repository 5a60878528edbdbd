//! Exact scalar fields.
//!
//! Everything in this crate is generic over a [`Scalar`]: an exact field of
//! characteristic zero whose elements can be mapped into the rationals. The
//! arbitrary-precision [`BigRational`] is the working default; the fixed-width
//! ratios are handy for small tests but overflow like any machine integer.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};

/// An exact field of constants.
pub trait Scalar:
    Clone + Debug + Display + Eq + Ord + Hash + Num + Signed + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    fn to_big_rational(&self) -> BigRational;

    /// `None` when the value does not fit the representation.
    fn from_big_rational(q: &BigRational) -> Option<Self>;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }

    fn from_big_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }

    // Integer operands skip the gcd normalisation, which num-bigint runs
    // in time quadratic in the size of the numerator even against 1.
    fn add_ref(&self, other: &Self) -> Self {
        if self.is_integer() && other.is_integer() {
            BigRational::from_integer(self.numer() + other.numer())
        } else {
            self + other
        }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        if self.is_integer() && other.is_integer() {
            BigRational::from_integer(self.numer() - other.numer())
        } else {
            self - other
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_integer() && other.is_integer() {
            BigRational::from_integer(self.numer() * other.numer())
        } else {
            self * other
        }
    }
}

macro_rules! fixed_ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn from_i64(v: i64) -> Self {
                Ratio::from_integer(<$int>::try_from(v).expect("value out of range"))
            }

            fn to_big_rational(&self) -> BigRational {
                BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }

            fn from_big_rational(q: &BigRational) -> Option<Self> {
                let n = <$int>::try_from(q.numer().clone()).ok()?;
                let d = <$int>::try_from(q.denom().clone()).ok()?;
                Some(Ratio::new(n, d))
            }
        }
    };
}

fixed_ratio_scalar!(i64);
fixed_ratio_scalar!(i128);

/// Minimal field interface used by the generic linear algebra. Implemented by
/// every [`Scalar`] and by the rational functions over one.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
}

impl<S: Scalar> Field for S {}
