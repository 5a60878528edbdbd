//! Places of `k(t)`: closed points and finite sets of them.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// A place of `k(t)`: a monic irreducible polynomial or the point at
/// infinity. A finite place of degree `e` stands for the `e` conjugate
/// geometric points it contains.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ClosedPoint<S: Scalar> {
    Finite(Poly<S>),
    Infinity,
}

impl<S: Scalar> ClosedPoint<S> {
    /// A finite place after checking that `minpoly` is monic and
    /// irreducible over the rationals.
    pub fn finite(minpoly: Poly<S>) -> Result<Self> {
        if minpoly.is_constant() {
            return Err(Error::NotAPlace(format!("{minpoly} is constant")));
        }
        if !minpoly.is_monic() {
            return Err(Error::NotAPlace(format!("{minpoly} is not monic")));
        }
        certify_irreducible(&minpoly)?;
        Ok(ClosedPoint::Finite(minpoly))
    }

    /// `t - a`.
    pub fn rational(a: S) -> Self {
        ClosedPoint::Finite(Poly::linear(a))
    }

    pub fn degree(&self) -> u64 {
        match self {
            ClosedPoint::Finite(p) => p.deg() as u64,
            ClosedPoint::Infinity => 1,
        }
    }

    pub fn minpoly(&self) -> Option<&Poly<S>> {
        match self {
            ClosedPoint::Finite(p) => Some(p),
            ClosedPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ClosedPoint::Infinity)
    }
}

impl<S: Scalar> fmt::Display for ClosedPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedPoint::Finite(p) => write!(f, "{p}"),
            ClosedPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// A finite set of places.
///
/// The finite part is kept as pairwise coprime, squarefree, monic blocks;
/// the set contains exactly the places dividing some block. A block can be
/// a single minimal polynomial or the product of several, so supports of
/// given functions are representable without factoring them.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PlaceSet<S: Scalar> {
    blocks: Vec<Poly<S>>,
    infinity: bool,
}

impl<S: Scalar> PlaceSet<S> {
    pub fn empty() -> Self {
        PlaceSet { blocks: Vec::new(), infinity: false }
    }

    pub fn infinity_only() -> Self {
        PlaceSet { blocks: Vec::new(), infinity: true }
    }

    pub fn from_points(points: &[ClosedPoint<S>]) -> Self {
        let mut s = Self::empty();
        for p in points {
            s.insert(p);
        }
        s
    }

    /// All zeros and poles of the given functions, plus infinity when
    /// `with_infinity` is set.
    pub fn support_of(fs: &[crate::RationalFunction<S>], with_infinity: bool) -> Self {
        let mut s = PlaceSet { blocks: Vec::new(), infinity: with_infinity };
        for f in fs {
            s.add_block(f.numer());
            s.add_block(f.denom());
        }
        s
    }

    /// Adds every place dividing `p` (which need not be squarefree).
    pub fn add_block(&mut self, p: &Poly<S>) {
        if p.is_constant() {
            return;
        }
        let mut rest = p.squarefree_part();
        for b in &self.blocks {
            let g = rest.gcd(b);
            if !g.is_one() {
                rest = rest.div_exact(&g).expect("gcd divides");
            }
        }
        if !rest.is_constant() {
            self.blocks.push(rest);
            self.blocks.sort_by(poly_order);
        }
    }

    pub fn insert(&mut self, p: &ClosedPoint<S>) {
        match p {
            ClosedPoint::Finite(m) => self.add_block(m),
            ClosedPoint::Infinity => self.infinity = true,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for b in &other.blocks {
            s.add_block(b);
        }
        s.infinity |= other.infinity;
        s
    }

    pub fn contains(&self, p: &ClosedPoint<S>) -> bool {
        match p {
            ClosedPoint::Finite(m) => self.blocks.iter().any(|b| m.divides(b)),
            ClosedPoint::Infinity => self.infinity,
        }
    }

    pub fn contains_infinity(&self) -> bool {
        self.infinity
    }

    pub fn blocks(&self) -> &[Poly<S>] {
        &self.blocks
    }

    /// Product of the finite blocks: a monic squarefree polynomial whose
    /// irreducible factors are the finite places of the set.
    pub fn finite_support(&self) -> Poly<S> {
        self.blocks.iter().fold(Poly::one(), |acc, b| &acc * b)
    }

    /// The individual places of the set. Rational roots are split off each
    /// block; whatever remains must certify as irreducible.
    pub fn points(&self) -> Result<Vec<ClosedPoint<S>>> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for f in split_into_places(b)? {
                out.push(ClosedPoint::Finite(f));
            }
        }
        if self.infinity {
            out.push(ClosedPoint::Infinity);
        }
        Ok(out)
    }

    /// `|S|`, counting a place of degree `e` as `e` geometric points.
    pub fn size(&self) -> u64 {
        self.blocks.iter().map(|b| b.deg() as u64).sum::<u64>() + u64::from(self.infinity)
    }

    /// Whether every place dividing the squarefree polynomial `b` is in
    /// the set. Blocks of a coprime refinement are either inside or
    /// disjoint, so this is the membership test for them.
    pub fn covers(&self, b: &Poly<S>) -> bool {
        b.squarefree_part().divides(&self.finite_support())
    }

    /// Parses a comma separated list such as `t, t-1, t^2+1, inf`.
    /// Finite entries must be monic; each is taken as the set of places
    /// dividing it.
    pub fn parse(src: &str) -> Result<Self> {
        let mut s = Self::empty();
        for item in src.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            if item == "inf" {
                s.infinity = true;
                continue;
            }
            let f = crate::ffcore::parse_rational_function::<S>(item)?;
            if !f.is_polynomial() || f.numer().is_constant() || !f.numer().is_monic() {
                return Err(Error::NotAPlace(item.to_string()));
            }
            s.add_block(f.numer());
        }
        Ok(s)
    }
}

impl<S: Scalar> fmt::Display for PlaceSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        if self.infinity {
            parts.push("inf".into());
        }
        f.write_str(&parts.join(", "))
    }
}

/// Deterministic order: by degree, then by coefficients from the top.
pub(crate) fn poly_order<S: Scalar>(a: &Poly<S>, b: &Poly<S>) -> std::cmp::Ordering {
    a.deg()
        .cmp(&b.deg())
        .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
}

/// Checks irreducibility over the rationals.
///
/// Rational roots are searched exactly. Beyond that the factor degrees
/// allowed by distinct-degree factorization modulo several primes are
/// intersected; if only the trivial splitting survives the polynomial is
/// irreducible. When the sieve is inconclusive an error is returned rather
/// than a guess.
pub fn certify_irreducible<S: Scalar>(p: &Poly<S>) -> Result<()> {
    let n = p.deg();
    if n == 0 {
        return Err(Error::NotAPlace(format!("{p} is constant")));
    }
    if n == 1 {
        return Ok(());
    }
    let ints = integer_primitive(p);
    let exact_roots = match rational_root(&ints) {
        RootSearch::Found(root) => {
            return Err(Error::NotAPlace(format!("{p} has the rational root {root}")));
        }
        RootSearch::NoneExist => true,
        RootSearch::TooLarge => false,
    };
    if n <= 3 && exact_roots {
        return Ok(());
    }
    if !p.is_squarefree() {
        return Err(Error::NotAPlace(format!("{p} is not squarefree")));
    }
    let mut possible: BTreeSet<usize> = (0..=n).collect();
    for &prime in SIEVE_PRIMES {
        let Some(pattern) = degree_pattern_mod(&ints, prime) else { continue };
        let sums = subset_sums(&pattern, n);
        possible.retain(|d| sums.contains(d));
        if possible.len() == 2 {
            return Ok(());
        }
    }
    Err(Error::NotAPlace(format!("cannot certify irreducibility of {p}")))
}

/// Splits a monic squarefree polynomial into monic irreducible factors,
/// when this can be certified.
fn split_into_places<S: Scalar>(p: &Poly<S>) -> Result<Vec<Poly<S>>> {
    let mut rest = p.monic();
    let mut out = Vec::new();
    while rest.deg() > 1 {
        match rational_root(&integer_primitive(&rest)) {
            RootSearch::Found(root) => {
                let Some(a) = S::from_big_rational(&root) else { break };
                let lin = Poly::linear(a);
                rest = rest.div_exact(&lin).expect("root gives a factor");
                out.push(lin);
            }
            _ => break,
        }
    }
    if rest.deg() >= 1 {
        certify_irreducible(&rest)?;
        out.push(rest);
    }
    out.sort_by(poly_order);
    Ok(out)
}

const SIEVE_PRIMES: &[u64] = &[
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127,
];

/// Coefficients scaled to coprime integers, constant term first.
pub(crate) fn integer_primitive<S: Scalar>(p: &Poly<S>) -> Vec<BigInt> {
    let qs: Vec<BigRational> = p.coeffs().iter().map(Scalar::to_big_rational).collect();
    let l = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = qs.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

enum RootSearch {
    Found(BigRational),
    NoneExist,
    TooLarge,
}

fn rational_root(ints: &[BigInt]) -> RootSearch {
    if ints[0].is_zero() {
        return RootSearch::Found(BigRational::zero());
    }
    let lead = ints.last().expect("nonzero polynomial");
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(lead)) else {
        return RootSearch::TooLarge;
    };
    let eval = |x: &BigRational| {
        ints.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from(c.clone()))
    };
    for a in &ps {
        for b in &qs {
            for sign in [1, -1] {
                let x = BigRational::new(a * sign, b.clone());
                if eval(&x).is_zero() {
                    return RootSearch::Found(x);
                }
            }
        }
    }
    RootSearch::NoneExist
}

fn subset_sums(parts: &[usize], n: usize) -> BTreeSet<usize> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in parts {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    (0..=n).filter(|&s| reach[s]).collect()
}

type ModPoly = Vec<u64>;

fn mp_trim(mut a: ModPoly) -> ModPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mp_inv(a: u64, p: u64) -> u64 {
    mp_pow(a, p - 2, p)
}

fn mp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn mp_rem(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut a = a.clone();
    let db = b.len() - 1;
    let inv = mp_inv(b[db], p);
    while a.len() > db {
        let c = a[a.len() - 1] * inv % p;
        let shift = a.len() - 1 - db;
        for (j, bc) in b.iter().enumerate() {
            a[shift + j] = (a[shift + j] + p - c * bc % p) % p;
        }
        a = mp_trim(a);
    }
    a
}

fn mp_div(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut a = a.clone();
    let db = b.len() - 1;
    let inv = mp_inv(b[db], p);
    let mut q = vec![0; a.len().saturating_sub(db)];
    while a.len() > db {
        let c = a[a.len() - 1] * inv % p;
        let shift = a.len() - 1 - db;
        q[shift] = c;
        for (j, bc) in b.iter().enumerate() {
            a[shift + j] = (a[shift + j] + p - c * bc % p) % p;
        }
        a.pop();
        a = mp_trim(a);
    }
    mp_trim(q)
}

fn mp_mulmod(a: &ModPoly, b: &ModPoly, m: &ModPoly, p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    mp_rem(&mp_trim(out), m, p)
}

fn mp_gcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = mp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mp_sub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    mp_trim(
        (0..n)
            .map(|k| (a.get(k).copied().unwrap_or(0) + p - b.get(k).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

/// Degrees of the irreducible factors modulo `p`, or `None` when `p`
/// divides the leading coefficient or the reduction is not squarefree.
fn degree_pattern_mod(ints: &[BigInt], p: u64) -> Option<Vec<usize>> {
    let bp = BigInt::from(p);
    let f: ModPoly = ints
        .iter()
        .map(|c| c.mod_floor(&bp).to_u64().expect("reduced residue"))
        .collect();
    if f.last() == Some(&0) {
        return None;
    }
    let df: ModPoly =
        mp_trim(f.iter().enumerate().skip(1).map(|(k, c)| (k as u64 % p) * c % p).collect());
    if df.is_empty() || mp_gcd(&f, &df, p).len() != 1 {
        return None;
    }
    let mut rest = f;
    let mut pattern = Vec::new();
    let x: ModPoly = vec![0, 1];
    let mut h = x.clone();
    let mut i = 0;
    while rest.len() > 1 {
        i += 1;
        if 2 * i > rest.len() - 1 {
            pattern.push(rest.len() - 1);
            break;
        }
        // h <- h^p mod rest
        let mut acc: ModPoly = vec![1];
        let mut base = mp_rem(&h, &rest, p);
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mp_mulmod(&acc, &base, &rest, p);
            }
            base = mp_mulmod(&base, &base, &rest, p);
            e >>= 1;
        }
        h = acc;
        let g = mp_gcd(&rest, &mp_sub(&h, &x, p), p);
        if g.len() > 1 {
            let k = (g.len() - 1) / i;
            pattern.extend(std::iter::repeat_n(i, k));
            rest = mp_div(&rest, &g, p);
            h = mp_rem(&h, &rest, p);
        }
    }
    Some(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Poly<BigRational>;

    fn p(cs: &[i64]) -> P {
        P::from_i64s(cs)
    }

    #[test]
    fn irreducibility_certificates() {
        assert!(certify_irreducible(&p(&[1, 0, 1])).is_ok());
        assert!(certify_irreducible(&p(&[-2, 0, 0, 1])).is_ok());
        assert!(certify_irreducible(&p(&[-1, 0, 1])).is_err());
        assert!(certify_irreducible(&p(&[1, 1, 0, 0, 1])).is_ok());
        assert!(certify_irreducible(&p(&[-2, 0, 0, 0, 1])).is_ok());
        // (t^2+1)(t^2+2) has no rational root but is reducible.
        assert!(certify_irreducible(&(&p(&[1, 0, 1]) * &p(&[2, 0, 1]))).is_err());
    }

    #[test]
    fn degree_pattern_of_product() {
        let f = &p(&[1, 0, 1]) * &p(&[-2, 1]);
        let ints = integer_primitive(&f);
        let mut pat = degree_pattern_mod(&ints, 7).unwrap();
        pat.sort();
        // t^2+1 is irreducible mod 7 since -1 is not a square there.
        assert_eq!(pat, vec![1, 2]);
    }

    #[test]
    fn place_set_weights_and_membership() {
        let s = PlaceSet::from_points(&[
            ClosedPoint::finite(p(&[0, 1])).unwrap(),
            ClosedPoint::finite(p(&[1, 0, 1])).unwrap(),
            ClosedPoint::Infinity,
            ClosedPoint::finite(p(&[0, 1])).unwrap(),
        ]);
        assert_eq!(s.size(), 4);
        assert!(s.contains(&ClosedPoint::rational(BigRational::zero())));
        assert!(!s.contains(&ClosedPoint::rational(BigRational::one())));
        assert!(s.contains(&ClosedPoint::Infinity));
        let parsed = PlaceSet::<BigRational>::parse("t, t^2+1, inf").unwrap();
        assert_eq!(parsed, s);
        assert!(PlaceSet::<BigRational>::parse("2*t").is_err());
    }
}
