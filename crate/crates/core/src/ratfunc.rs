//! Elements of the rational function field `k(t)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::scalar::Scalar;

/// A rational function in canonical form.
///
/// The denominator is monic and coprime to the numerator, and zero is
/// stored as `0/1`. Two equal functions therefore have identical fields,
/// which makes derived equality and hashing exact.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction<S: Scalar> {
    num: Poly<S>,
    den: Poly<S>,
}

impl<S: Scalar> RationalFunction<S> {
    /// Builds `num / den` in lowest terms. Panics when `den` is zero.
    pub fn new(num: Poly<S>, den: Poly<S>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = S::one() / lc;
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(S::from_i64(c))
    }

    /// The coordinate function `t`.
    pub fn t() -> Self {
        Self::from_poly(Poly::var())
    }

    pub fn numer(&self) -> &Poly<S> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<S> {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The value in `k` when the function is constant.
    pub fn as_constant(&self) -> Option<S> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self::new(self.den.clone(), self.num.clone()))
    }

    /// Integer power; negative exponents invert. Panics for `0^(-k)`.
    pub fn powi(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).expect("exponent too large");
        RationalFunction { num: base.num.pow(k), den: base.den.pow(k) }
    }

    /// Formal derivative with respect to `t`.
    pub fn derivative(&self) -> Self {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(top, &self.den * &self.den)
    }

    /// `deg den - deg num`, the order at infinity. `None` for zero.
    pub fn valuation_at_infinity(&self) -> Option<i64> {
        let n = self.num.degree()?;
        Some(self.den.deg() as i64 - n as i64)
    }

    /// `max(deg num, deg den)`: the number of poles counted with
    /// multiplicity.
    pub fn degree_height(&self) -> u64 {
        self.num.deg().max(self.den.deg()) as u64
    }

    /// Value at `x`, `None` at a pole.
    pub fn eval(&self, x: &S) -> Option<S> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn scale(&self, c: &S) -> Self {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Display with parentheses when the text is not a single atom, for
    /// embedding as a coefficient.
    pub fn to_grouped_string(&self) -> String {
        let s = self.to_string();
        if s.chars().all(|c| c.is_ascii_alphanumeric()) {
            s
        } else {
            format!("({s})")
        }
    }
}

impl<S: Scalar> From<Poly<S>> for RationalFunction<S> {
    fn from(p: Poly<S>) -> Self {
        Self::from_poly(p)
    }
}

impl<S: Scalar> Zero for RationalFunction<S> {
    fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<S: Scalar> One for RationalFunction<S> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<S: Scalar> Add<&RationalFunction<S>> for &RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn add(self, rhs: &RationalFunction<S>) -> RationalFunction<S> {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone());
        }
        let top = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(top, &self.den * &rhs.den)
    }
}

impl<S: Scalar> Sub<&RationalFunction<S>> for &RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn sub(self, rhs: &RationalFunction<S>) -> RationalFunction<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Mul<&RationalFunction<S>> for &RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn mul(self, rhs: &RationalFunction<S>) -> RationalFunction<S> {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<S: Scalar> Div<&RationalFunction<S>> for &RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn div(self, rhs: &RationalFunction<S>) -> RationalFunction<S> {
        self * &rhs.inv().expect("division by zero rational function")
    }
}

impl<S: Scalar> Neg for &RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn neg(self) -> RationalFunction<S> {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl<S: Scalar> Neg for RationalFunction<S> {
    type Output = RationalFunction<S>;
    fn neg(self) -> RationalFunction<S> {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<RationalFunction<S>> for RationalFunction<S> {
            type Output = RationalFunction<S>;
            fn $m(self, rhs: RationalFunction<S>) -> RationalFunction<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl<S: Scalar> crate::scalar::Field for RationalFunction<S> {}

impl<S: Scalar> fmt::Display for RationalFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type R = RationalFunction<BigRational>;
    type P = Poly<BigRational>;

    #[test]
    fn canonical_form() {
        let f = R::new(P::from_i64s(&[0, 2, 2]), P::from_i64s(&[2, 2]));
        assert_eq!(f, R::from_poly(P::from_i64s(&[0, 1])));
        let g = R::new(P::from_i64s(&[1]), P::from_i64s(&[4, 2]));
        assert!(g.denom().is_monic());
        assert_eq!(g.numer(), &P::constant(BigRational::from_ratio(1, 2)));
        assert_eq!(R::new(P::zero(), P::from_i64s(&[1, 1])).denom(), &P::one());
    }

    #[test]
    fn field_operations() {
        let t = R::t();
        let one = R::one();
        let f = &(&t * &t) / &(&t + &one);
        assert_eq!(&(&f * &(&t + &one)) / &(&t * &t), one);
        assert_eq!(&(&f - &f), &R::zero());
        assert_eq!(f.powi(-2), (&(&t + &one) / &(&t * &t)).powi(2));
        assert_eq!(f.valuation_at_infinity(), Some(-1));
    }

    #[test]
    fn derivative_quotient_rule() {
        let f = (&R::t() + &R::one()).inv().unwrap();
        let expected = -(&(&R::t() + &R::one()).powi(2)).inv().unwrap();
        assert_eq!(f.derivative(), expected);
    }

    #[test]
    fn display() {
        let f = &(&R::t() * &R::t()) / &(&R::t() - &R::from_i64(2));
        assert_eq!(f.to_string(), "(t^2)/(t-2)");
        assert_eq!(R::t().to_grouped_string(), "t");
        assert_eq!(R::from_i64(-3).to_grouped_string(), "(-3)");
    }
}
