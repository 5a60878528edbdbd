//! Multivariate polynomials over `K = k(t)`.
//!
//! Terms live in a map ordered by graded lexicographic order with
//! `x1 > x2 > ... > xn`, so the last entry is the leading term. "Monic"
//! always refers to that term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ffcore::{self, projective_height, FunctionField};
use crate::parse::{parse_expr, Algebra};
use crate::place::ClosedPoint;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

/// An exponent vector ordered graded lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient(&self, other: &Self) -> Self {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    /// All monomials in `n` variables of total degree at most `m`, in
    /// increasing graded lexicographic order.
    pub fn up_to_degree(n: usize, m: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=m {
            let mut layer = Vec::new();
            compositions(n, deg, &mut vec![0; n], 0, &mut layer);
            layer.sort();
            out.extend(layer);
        }
        out
    }

    /// `Π g_j^{e_j}`.
    pub fn eval<S: Scalar>(&self, g: &[RationalFunction<S>]) -> RationalFunction<S> {
        self.0
            .iter()
            .zip(g)
            .filter(|(&e, _)| e > 0)
            .fold(RationalFunction::one(), |acc, (&e, x)| &acc * &x.powi(i64::from(e)))
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(names)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, name)| if e == 1 { name.clone() } else { format!("{name}^{e}") })
            .collect();
        parts.join("*")
    }
}

fn compositions(n: usize, left: u32, cur: &mut Vec<u32>, k: usize, out: &mut Vec<Monomial>) {
    if k + 1 == n {
        cur[k] = left;
        out.push(Monomial(cur.clone()));
        return;
    }
    if n == 0 {
        if left == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    for e in 0..=left {
        cur[k] = e;
        compositions(n, left - e, cur, k + 1, out);
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `n` variables with coefficients in `k(t)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MvPoly<S: Scalar> {
    nvars: usize,
    terms: BTreeMap<Monomial, RationalFunction<S>>,
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("x{j}")).collect()
}

impl<S: Scalar> MvPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        MvPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, RationalFunction::one())
    }

    pub fn constant(nvars: usize, c: RationalFunction<S>) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        Self::term(Monomial::var(nvars, j), RationalFunction::one())
    }

    pub fn term(m: Monomial, c: RationalFunction<S>) -> Self {
        let nvars = m.0.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MvPoly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, RationalFunction<S>)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: RationalFunction<S>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &RationalFunction<S>)> {
        self.terms.iter()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &RationalFunction<S>> {
        self.terms.values()
    }

    pub fn coeff(&self, m: &Monomial) -> RationalFunction<S> {
        self.terms.get(m).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for elements of `K` (including zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn as_constant(&self) -> Option<RationalFunction<S>> {
        self.is_constant().then(|| self.coeff(&Monomial::one(self.nvars)))
    }

    pub fn is_one_poly(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|m| m.0[j]).max().unwrap_or(0)
    }

    pub fn involves(&self, j: usize) -> bool {
        self.terms.keys().any(|m| m.0[j] > 0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &RationalFunction<S>)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> RationalFunction<S> {
        self.leading_term().map_or_else(RationalFunction::zero, |(_, c)| c.clone())
    }

    pub fn is_monic(&self) -> bool {
        self.leading_term().is_some_and(|(_, c)| c.is_one())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero")),
        }
    }

    pub fn scale(&self, c: &RationalFunction<S>) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MvPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        MvPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&Monomial, &RationalFunction<S>) -> RationalFunction<S>) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(m, c))))
    }

    /// `∂/∂x_j`.
    pub fn partial(&self, j: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m.0[j] > 0).map(|(m, c)| {
                let mut e = m.clone();
                e.0[j] -= 1;
                (e, c.scale(&S::from_i64(i64::from(m.0[j]))))
            }),
        )
    }

    /// Value at a point of `K^n`.
    pub fn eval(&self, point: &[RationalFunction<S>]) -> RationalFunction<S> {
        assert_eq!(point.len(), self.nvars, "point arity mismatch");
        self.terms
            .iter()
            .fold(RationalFunction::zero(), |acc, (m, c)| &acc + &(c * &m.eval(point)))
    }

    /// Substitutes `x_j = value`; the result keeps `n` variables but no
    /// longer involves `x_j`.
    pub fn substitute(&self, j: usize, value: &RationalFunction<S>) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| {
                let mut e = m.clone();
                let k = std::mem::take(&mut e.0[j]);
                (e, c * &value.powi(i64::from(k)))
            }),
        )
    }

    /// Coefficients with respect to `x_j`, indexed by the power of `x_j`.
    pub fn coeffs_in(&self, j: usize) -> Vec<Self> {
        let mut out = vec![Self::zero(self.nvars); self.degree_in(j) as usize + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (m, c) in &self.terms {
            let mut e = m.clone();
            let k = std::mem::take(&mut e.0[j]) as usize;
            out[k].terms.insert(e, c.clone());
        }
        out
    }

    /// Inverse of [`coeffs_in`](Self::coeffs_in).
    pub fn from_coeffs_in(nvars: usize, j: usize, coeffs: &[Self]) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                let mut e = m.clone();
                e.0[j] += k as u32;
                p.add_term(e, a.clone());
            }
        }
        p
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one(self.nvars) };
        let mut e = first.0.clone();
        for m in it {
            for (a, b) in e.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        Monomial(e)
    }

    /// Exact quotient, `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (lm, lc) = divisor.leading_term().expect("division by zero polynomial");
        let lc_inv = lc.inv().expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return None;
            }
            let q = MvPoly::term(lm.quotient(m), c * &lc_inv);
            rem = &rem - &(&q * divisor);
            quot = &quot + &q;
        }
        Some(quot)
    }

    /// Gauss valuation `min_i v_p(a_i)`.
    pub fn gauss_valuation(&self, p: &ClosedPoint<S>) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroInput("gauss_valuation"));
        }
        Ok(self
            .coefficients()
            .map(|c| ffcore::valuation(c, p).finite().expect("stored coefficients are nonzero"))
            .min()
            .expect("nonzero polynomial"))
    }

    /// `h(F) = Σ_p -v_p(F)`, the projective height of the coefficients.
    pub fn height(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroInput("height"));
        }
        projective_height(&self.coefficients().cloned().collect::<Vec<_>>())
    }

    /// `h̃(F) = Σ_p -min{0, v_p(F)}`: the projective height of the
    /// coefficients together with 1.
    pub fn relevant_height(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroInput("relevant_height"));
        }
        let mut cs: Vec<_> = self.coefficients().cloned().collect();
        cs.push(RationalFunction::one());
        projective_height(&cs)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mono = m.display_with(names);
            let (neg, mag) = match c.as_constant() {
                Some(k) if k < S::zero() => (true, -c),
                _ => (false, c.clone()),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { "-" } else { "+" });
            }
            match (mag.is_one(), mono.is_empty()) {
                (_, true) => out.push_str(&mag.to_grouped_string()),
                (true, false) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&mag.to_grouped_string());
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }

    /// Parses a polynomial in the given variable names; `t` always denotes
    /// the generator of `K`.
    pub fn parse_with(src: &str, names: &[String]) -> Result<Self> {
        parse_expr(src)?.eval(&PolyAlgebra { names: names.to_vec(), _s: std::marker::PhantomData })
    }

    /// Parses a polynomial in `x1..xn`.
    pub fn parse(src: &str, nvars: usize) -> Result<Self> {
        Self::parse_with(src, &default_names(nvars))
    }
}

impl<S: Scalar> fmt::Display for MvPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.nvars)))
    }
}

struct PolyAlgebra<S: Scalar> {
    names: Vec<String>,
    _s: std::marker::PhantomData<S>,
}

impl<S: Scalar> Algebra for PolyAlgebra<S> {
    type Elem = MvPoly<S>;

    fn int(&self, n: &BigInt) -> Result<Self::Elem> {
        let c = FunctionField::<S>::default().int(n)?;
        Ok(MvPoly::constant(self.names.len(), c))
    }
    fn var(&self, name: &str) -> Result<Self::Elem> {
        let n = self.names.len();
        if name == "t" {
            return Ok(MvPoly::constant(n, RationalFunction::t()));
        }
        match self.names.iter().position(|x| x == name) {
            Some(j) => Ok(MvPoly::var(n, j)),
            None => Err(Error::Parse { pos: 0, msg: format!("unknown variable {name}") }),
        }
    }
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        &a + &b
    }
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        &a - &b
    }
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        &a * &b
    }
    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem> {
        match b.as_constant() {
            Some(c) if !c.is_zero() => Ok(a.scale(&c.inv().expect("nonzero"))),
            _ => a.div_exact(&b).ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "division by a non-divisor polynomial".into(),
            }),
        }
    }
    fn pow(&self, a: Self::Elem, e: i64) -> Result<Self::Elem> {
        if e >= 0 {
            return Ok(a.pow(u32::try_from(e).map_err(|_| Error::Parse {
                pos: 0,
                msg: "exponent too large".into(),
            })?));
        }
        match a.as_constant() {
            Some(c) if !c.is_zero() => Ok(MvPoly::constant(self.names.len(), c.powi(e))),
            _ => Err(Error::Parse { pos: 0, msg: "negative power of a non-constant".into() }),
        }
    }
    fn neg(&self, a: Self::Elem) -> Self::Elem {
        -&a
    }
}

impl<S: Scalar> Add<&MvPoly<S>> for &MvPoly<S> {
    type Output = MvPoly<S>;
    fn add(self, rhs: &MvPoly<S>) -> MvPoly<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub<&MvPoly<S>> for &MvPoly<S> {
    type Output = MvPoly<S>;
    fn sub(self, rhs: &MvPoly<S>) -> MvPoly<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<S: Scalar> Mul<&MvPoly<S>> for &MvPoly<S> {
    type Output = MvPoly<S>;
    fn mul(self, rhs: &MvPoly<S>) -> MvPoly<S> {
        let mut out = MvPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl<S: Scalar> Neg for &MvPoly<S> {
    type Output = MvPoly<S>;
    fn neg(self) -> MvPoly<S> {
        MvPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<MvPoly<S>> for MvPoly<S> {
            type Output = MvPoly<S>;
            fn $m(self, rhs: MvPoly<S>) -> MvPoly<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

mod gcd;
pub use gcd::*;
