//! Dense univariate polynomials over an exact scalar field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// A polynomial stored as coefficients from the constant term upward.
///
/// The coefficient vector never has a trailing zero, so the zero polynomial
/// is the empty vector and `degree` is well defined for everything else.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The coordinate `t`.
    pub fn var() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    /// `c * t^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `t - a`.
    pub fn linear(a: S) -> Self {
        Self::new(vec![-a, S::one()])
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect() }
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = S::one() / self.leading_coeff();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let inv_lc = S::one() / divisor.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * inv_lc.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub_ref(&c.mul_ref(dc));
            }
            quot[k] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Quotient of an exact division, `None` when a remainder is left.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() { other.monic() } else { self.monic() };
        }
        if self.deg().min(other.deg()) >= 2 {
            let lift = |p: &Self| p.coeffs.iter().map(S::to_big_rational).collect::<Vec<_>>();
            if let Some(g) = crate::modular::rational_gcd(&lift(self), &lift(other)) {
                if let Some(coeffs) = g.iter().map(S::from_big_rational).collect::<Option<Vec<_>>>() {
                    return Self::new(coeffs);
                }
            }
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree decomposition by Yun's algorithm.
    ///
    /// Returns monic, pairwise coprime, squarefree `s_1, s_2, ...` with
    /// `self = lc * s_1 * s_2^2 * s_3^3 * ...`. Trailing ones are dropped.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            out.push(a);
        }
        while out.last().is_some_and(|s| s.is_one()) {
            out.pop();
        }
        out
    }

    /// The monic `h` with `h^d` equal to the monic associate of `self`, if
    /// there is one. Nonzero constants have the root `1`.
    pub fn dth_root(&self, d: u32) -> Option<Self> {
        assert!(d >= 1 && !self.is_zero(), "dth_root needs d >= 1 and a nonzero polynomial");
        let n = self.deg();
        if n % d as usize != 0 {
            return None;
        }
        let f = self.monic();
        if n == 0 {
            return Some(Self::one());
        }
        let lifted: Vec<_> = f.coeffs.iter().map(S::to_big_rational).collect();
        match crate::modular::rational_dth_root(&lifted, d) {
            crate::modular::RootSearch::Root(h) => match h.iter().map(S::from_big_rational).collect() {
                Some(coeffs) => Some(Self::new(coeffs)),
                None => f.dth_root_by_series(d),
            },
            crate::modular::RootSearch::NoRoot => None,
            crate::modular::RootSearch::Unknown => f.dth_root_by_series(d),
        }
    }

    /// Exact series expansion of `(f / t^n)^(1/d)` in `1/t`, for a monic
    /// `f`.
    fn dth_root_by_series(&self, d: u32) -> Option<Self> {
        let rev: Vec<S> = self.coeffs.iter().rev().cloned().collect();
        let dd = S::from_i64(i64::from(d));
        let top = self.deg() / d as usize;
        let mut root = vec![S::one()];
        for k in 1..=top {
            let mut acc = S::zero();
            for j in 1..=k {
                if rev[j].is_zero() {
                    continue;
                }
                let weight = S::from_i64(j as i64) / dd.clone() - S::from_i64((k - j) as i64);
                acc = acc + rev[j].clone() * root[k - j].clone() * weight;
            }
            root.push(acc / S::from_i64(k as i64));
        }
        root.reverse();
        let h = Poly::new(root);
        (h.pow(d) == *self).then_some(h)
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Self {
        if self.is_constant() {
            return Self::one();
        }
        let f = self.monic();
        f.div_exact(&f.gcd(&f.derivative())).expect("gcd divides")
    }

    pub fn is_squarefree(&self) -> bool {
        self.is_constant() || self.gcd(&self.derivative()).is_one()
    }

    /// Multiplicity of `factor` in `self`, for a nonconstant factor and
    /// nonzero `self`. Returns the multiplicity and the cofactor.
    pub fn split_power(&self, factor: &Self) -> (usize, Self) {
        assert!(!factor.is_constant(), "split_power needs a nonconstant factor");
        let mut k = 0;
        let mut rest = self.clone();
        while let Some(q) = rest.div_exact(factor) {
            rest = q;
            k += 1;
        }
        (k, rest)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<S: Scalar> Zero for Poly<S> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Scalar> One for Poly<S> {
    fn one() -> Self {
        Poly::one()
    }
}

impl<S: Scalar> Add<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).add_ref(&rhs.coeff(k))).collect())
    }
}

impl<S: Scalar> Sub<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).sub_ref(&rhs.coeff(k))).collect())
    }
}

impl<S: Scalar> Mul<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if self.coeffs.len().min(rhs.coeffs.len()) > 8 {
            let lift = |p: &Poly<S>| p.coeffs.iter().map(S::to_big_rational).collect::<Vec<_>>();
            let prod = crate::modular::rational_mul(&lift(self), &lift(rhs));
            if let Some(coeffs) = prod.iter().map(S::from_big_rational).collect::<Option<Vec<_>>>() {
                return Poly::new(coeffs);
            }
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(out)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<Poly<S>> for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: Poly<S>) -> Poly<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Writes a coefficient-times-power term list in the exchange grammar,
/// e.g. `t^2-3/2*t+1`.
pub(crate) fn write_terms<S: Scalar>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (S, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, mono) in terms {
        let neg = c < S::zero();
        let mag = if neg { -c } else { c };
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { "-" } else { "+" })?;
        }
        first = false;
        match (mag.is_one(), mono.is_empty()) {
            (_, true) => write!(f, "{mag}")?,
            (true, false) => f.write_str(&mono)?,
            (false, false) => write!(f, "{mag}*{mono}")?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let mono = match k {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{k}"),
                };
                (c.clone(), mono)
            });
        write_terms(f, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type P = Poly<BigRational>;

    fn p(cs: &[i64]) -> P {
        P::from_i64s(cs)
    }

    #[test]
    fn dth_roots() {
        let h = p(&[3, -1, 0, 2]);
        let f = &h.pow(3) * &p(&[-5]);
        assert_eq!(f.dth_root(3), Some(h.monic()));
        assert_eq!(f.dth_root(2), None);
        assert_eq!(p(&[7]).dth_root(4), Some(P::one()));
        assert_eq!((&h.pow(2) * &p(&[1, 1])).dth_root(2), None);
        // t^2 (t + 1)^2 (t - 1)^4 is a square but not a fourth power.
        let g = &p(&[0, 1]).pow(2) * &(&p(&[1, 1]).pow(2) * &p(&[-1, 1]).pow(4));
        assert!(g.dth_root(2).is_some());
        assert!(g.dth_root(4).is_none());
    }

    #[test]
    fn long_products_match_schoolbook() {
        let a = P::new((0..20).map(|k| BigRational::new((k * k - 7).into(), (k + 1).into())).collect());
        let b = P::new((0..15).map(|k| BigRational::new((3 - k).into(), (2 * k + 3).into())).collect());
        let mut naive = vec![BigRational::zero(); 34];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                naive[i + j] += x * y;
            }
        }
        assert_eq!(&a * &b, P::new(naive));
    }

    #[test]
    fn division_reconstructs() {
        let a = p(&[1, 0, -3, 2, 5]);
        let b = p(&[2, 1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.deg() < b.deg());
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let common = p(&[-1, 1]);
        let a = &common * &p(&[2, 0, 1]);
        let b = &common * &p(&[3, 3]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]).monic());
        assert!(p(&[1, 1]).gcd(&p(&[0, 1])).is_one());
    }

    #[test]
    fn yun_recovers_multiplicities() {
        let s1 = p(&[1, 1]);
        let s3 = p(&[1, 0, 1]);
        let f = (&s1 * &s3.pow(3)).scale(&BigRational::from_i64(7));
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], s1);
        assert!(dec[1].is_one());
        assert_eq!(dec[2], s3);
    }

    #[test]
    fn display_round_trip_shape() {
        let f = P::new(vec![
            BigRational::from_i64(1),
            BigRational::from_ratio(-3, 2),
            BigRational::from_i64(1),
        ]);
        assert_eq!(f.to_string(), "t^2-3/2*t+1");
        assert_eq!(P::zero().to_string(), "0");
        assert_eq!(p(&[0, -1]).to_string(), "-t");
    }

    #[test]
    fn derivative_and_eval() {
        let f = p(&[1, 2, 3]);
        assert_eq!(f.derivative(), p(&[2, 6]));
        assert_eq!(f.eval(&BigRational::from_i64(2)), BigRational::from_i64(17));
    }

    #[test]
    fn fixed_width_scalars_work() {
        let f = Poly::<num_rational::Rational64>::from_i64s(&[-1, 0, 1]);
        let g = Poly::<num_rational::Rational64>::from_i64s(&[1, 1]);
        assert_eq!(f.gcd(&g), g);
    }
}
