//! Univariate arithmetic over the rationals by reduction modulo word-size
//! primes.
//!
//! Euclid's algorithm over `Q` suffers from coefficient growth that makes
//! degree-50 inputs take seconds. Here the inputs are scaled to integer
//! polynomials, the work is done modulo a sequence of primes and the
//! result is lifted by Chinese remaindering and checked exactly.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;

/// Primes below `2^31`, so products of residues fit in a `u64`.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        (1u64..(1 << 31)).rev().filter(|&n| n % 2 == 1 && is_prime(n)).take(400).collect()
    })
}

/// Miller-Rabin with the bases 2, 7 and 61, exact below `4.7 · 10^9`.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2, 3, 5, 7, 11, 13, 61] {
        if n % small == 0 {
            return n == small;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    [2u64, 7, 61].iter().all(|&a| {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                return true;
            }
        }
        false
    })
}

fn primitive_integer(coeffs: &[BigRational]) -> Vec<BigInt> {
    let l = coeffs.iter().fold(BigInt::one(), |acc, c| if c.is_integer() { acc } else { acc.lcm(c.denom()) });
    let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn residue(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue below p")
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` by `b` modulo `p`; `b` nonzero with a nonzero top
/// coefficient.
fn rem_mod(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while a.len() > db {
        let top = a.len() - 1;
        let c = a[top] * inv % p;
        if c != 0 {
            let shift = top - db;
            for (j, &bj) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + p - c * bj % p) % p;
            }
        }
        a.pop();
        trim(&mut a);
    }
    a
}

/// Monic gcd modulo `p`.
fn gcd_mod(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a, b);
    while !b.is_empty() {
        let r = rem_mod(a, &b, p);
        a = b;
        b = r;
    }
    let inv = inv_mod(*a.last().expect("nonzero gcd"), p);
    a.iter().map(|c| c * inv % p).collect()
}

fn symmetric(h: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    h.iter().map(|c| if c > &half { c - m } else { c.clone() }).collect()
}

fn divides(d: &[BigRational], f: &[BigRational]) -> bool {
    let dd = d.len() - 1;
    let mut rem = f.to_vec();
    let inv = BigRational::one() / &d[dd];
    while rem.len() > dd {
        let top = rem.len() - 1;
        let c = &rem[top] * &inv;
        if !c.is_zero() {
            let shift = top - dd;
            for (j, dj) in d.iter().enumerate() {
                rem[shift + j] = rem[shift + j].sub_ref(&c.mul_ref(dj));
            }
        }
        rem.pop();
        while rem.last().is_some_and(Zero::is_zero) {
            rem.pop();
        }
    }
    rem.is_empty()
}

/// Product of two polynomials, convolving over the integers after clearing
/// denominators so that no intermediate sum is reduced.
pub(crate) fn rational_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let scale = |v: &[BigRational]| -> (Vec<BigInt>, BigInt) {
        let l = v.iter().fold(BigInt::one(), |acc, c| if c.is_integer() { acc } else { acc.lcm(c.denom()) });
        (v.iter().map(|c| c.numer() * (&l / c.denom())).collect(), l)
    };
    let ((ia, la), (ib, lb)) = (scale(a), scale(b));
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in ia.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in ib.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    let denom = la * lb;
    if denom.is_one() {
        return out.into_iter().map(BigRational::from_integer).collect();
    }
    out.into_iter().map(|c| BigRational::new(c, denom.clone())).collect()
}

fn mul_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Coefficients of the monic `d`-th root of the monic `f` modulo `p`, if
/// the candidate read off the top coefficients really is one. Needs
/// `p > deg f`.
fn root_mod(f: &[u64], d: u32, p: u64) -> Option<Vec<u64>> {
    let n = f.len() - 1;
    let top = n / d as usize;
    let inv_d = inv_mod(u64::from(d) % p, p);
    // Series of (f / t^n)^(1/d) in 1/t: k·y_k = Σ_j f_{n-j} y_{k-j} (j/d - (k - j)).
    let mut root = vec![1u64];
    for k in 1..=top {
        let mut acc = 0;
        for j in 1..=k {
            let weight = (j as u64 * inv_d % p + p - (k - j) as u64 % p) % p;
            acc = (acc + f[n - j] * root[k - j] % p * weight) % p;
        }
        root.push(acc * inv_mod(k as u64, p) % p);
    }
    root.reverse();
    let mut power = vec![1u64];
    for _ in 0..d {
        power = mul_mod(&power, &root, p);
    }
    (power == f).then_some(root)
}

/// Outcome of a root search that may give up on huge coefficients.
pub(crate) enum RootSearch {
    Root(Vec<BigRational>),
    NoRoot,
    Unknown,
}

/// The monic `d`-th root of a monic rational polynomial, where `d`
/// divides the degree.
///
/// Substituting `t -> t / D` for the common denominator `D` makes `f`
/// monic with integer coefficients, and a monic root of such a polynomial
/// is integral with sup norm at most `2^(deg) · ||f||_2`. Roots are taken
/// modulo primes and lifted past twice that bound, then verified.
pub(crate) fn rational_dth_root(f: &[BigRational], d: u32) -> RootSearch {
    let n = f.len() - 1;
    let top = n / d as usize;
    let denom = f.iter().fold(BigInt::one(), |acc, c| if c.is_integer() { acc } else { acc.lcm(c.denom()) });
    let mut scale = BigInt::one();
    let mut ints = vec![BigInt::zero(); n + 1];
    for k in (0..=n).rev() {
        ints[k] = f[k].numer() * (&scale / f[k].denom());
        scale *= &denom;
    }
    let norm_sq: BigInt = ints.iter().map(|c| c * c).sum();
    let bound_bits = top as u64 + norm_sq.bits() / 2 + 3;
    let mut lifted: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    for &p in primes() {
        let fp: Vec<u64> = ints.iter().map(|c| residue(c, p)).collect();
        let Some(root) = root_mod(&fp, d, p) else {
            return RootSearch::NoRoot;
        };
        if lifted.is_empty() {
            lifted = root.iter().map(|&c| BigInt::from(c)).collect();
        } else {
            let m_inv = inv_mod(residue(&modulus, p), p);
            for (h, &r) in lifted.iter_mut().zip(&root) {
                let t = (r + p - residue(h, p)) % p * m_inv % p;
                *h += &modulus * t;
            }
        }
        modulus *= BigInt::from(p);
        if modulus.bits() <= bound_bits {
            continue;
        }
        let cand = symmetric(&lifted, &modulus);
        let as_q: Vec<BigRational> = cand.iter().cloned().map(BigRational::from_integer).collect();
        let mut power = vec![BigRational::one()];
        for _ in 0..d {
            power = rational_mul(&power, &as_q);
        }
        if power.iter().zip(&ints).any(|(a, b)| a.numer() != b) {
            return RootSearch::NoRoot;
        }
        // Undo the substitution: h_k = h~_k / D^(top - k).
        let mut out = vec![BigRational::zero(); top + 1];
        let mut unscale = BigInt::one();
        for k in (0..=top).rev() {
            out[k] = BigRational::new(cand[k].clone(), unscale.clone());
            unscale *= &denom;
        }
        return RootSearch::Root(out);
    }
    RootSearch::Unknown
}

/// The monic gcd of two nonzero polynomials given by their coefficients
/// (lowest degree first), or `None` when the prime supply runs out.
pub(crate) fn rational_gcd(a: &[BigRational], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let (fa, fb) = (primitive_integer(a), primitive_integer(b));
    if fa.len() == 1 || fb.len() == 1 {
        return Some(vec![BigRational::one()]);
    }
    let (la, lb) = (fa.last().expect("nonzero"), fb.last().expect("nonzero"));
    let gamma = la.gcd(lb);
    let original: (Vec<BigRational>, Vec<BigRational>) = (
        fa.iter().cloned().map(BigRational::from_integer).collect(),
        fb.iter().cloned().map(BigRational::from_integer).collect(),
    );
    let mut best_deg = usize::MAX;
    let mut lifted: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    for &p in primes() {
        if residue(la, p) == 0 || residue(lb, p) == 0 {
            continue;
        }
        let ap: Vec<u64> = fa.iter().map(|c| residue(c, p)).collect();
        let bp: Vec<u64> = fb.iter().map(|c| residue(c, p)).collect();
        let g = gcd_mod(ap, bp, p);
        let deg = g.len() - 1;
        if deg == 0 {
            return Some(vec![BigRational::one()]);
        }
        let scale = residue(&gamma, p);
        let g: Vec<u64> = g.iter().map(|c| c * scale % p).collect();
        if deg > best_deg {
            continue;
        }
        if deg < best_deg {
            best_deg = deg;
            lifted = g.iter().map(|&c| BigInt::from(c)).collect();
            modulus = BigInt::from(p);
            continue;
        }
        let before = symmetric(&lifted, &modulus);
        let m_inv = inv_mod(residue(&modulus, p), p);
        let pb = BigInt::from(p);
        for (h, &r) in lifted.iter_mut().zip(&g) {
            let t = (r + p - residue(h, p)) % p * m_inv % p;
            *h += &modulus * t;
        }
        modulus *= &pb;
        let after = symmetric(&lifted, &modulus);
        if before == after {
            let content = after.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
            let mut cand: Vec<BigRational> =
                after.iter().map(|c| BigRational::from_integer(c / &content)).collect();
            if cand.last().is_some_and(|c| c.is_negative()) {
                cand = cand.into_iter().map(|c| -c).collect();
            }
            if divides(&cand, &original.0) && divides(&cand, &original.1) {
                let lead = cand.last().expect("nonzero").clone();
                return Some(cand.into_iter().map(|c| c / &lead).collect());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn small_gcds() {
        // (t - 1)(t + 2) and (t - 1)(t - 3)
        let g = rational_gcd(&q(&[-2, 1, 1]), &q(&[3, -4, 1])).unwrap();
        assert_eq!(g, q(&[-1, 1]));
        let g = rational_gcd(&q(&[1, 0, 1]), &q(&[-1, 1])).unwrap();
        assert_eq!(g, q(&[1]));
        // Rational coefficients: (t/2 + 1/3) and 3t + 2.
        let a = vec![BigRational::new(1.into(), 3.into()), BigRational::new(1.into(), 2.into())];
        let g = rational_gcd(&a, &q(&[2, 3])).unwrap();
        assert_eq!(g, vec![BigRational::new(2.into(), 3.into()), BigRational::one()]);
    }

    #[test]
    fn primality() {
        let slow = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in (0..2000).chain((1 << 31) - 2000..1 << 31) {
            assert_eq!(is_prime(n), slow(n), "{n}");
        }
    }

    #[test]
    fn modular_roots() {
        // (t^2 - t/2 + 3)^3, then the same plus t
        let mut h = q(&[3, 0, 1]);
        h[1] = BigRational::new((-1).into(), 2.into());
        let mut cube = vec![BigRational::one()];
        for _ in 0..3 {
            cube = rational_mul(&cube, &h);
        }
        assert!(matches!(rational_dth_root(&cube, 3), RootSearch::Root(r) if r == h));
        cube[1] += BigRational::one();
        assert!(matches!(rational_dth_root(&cube, 3), RootSearch::NoRoot));
        assert!(matches!(rational_dth_root(&q(&[-2, 0, 1]), 2), RootSearch::NoRoot));
        // (t - 10^30)^2 needs several primes before the lift settles.
        let big = BigRational::from_integer(BigInt::from(10).pow(30));
        let sq = rational_mul(&[-big.clone(), BigRational::one()], &[-big.clone(), BigRational::one()]);
        assert!(matches!(rational_dth_root(&sq, 2), RootSearch::Root(r) if r[0] == -big));
    }

    #[test]
    fn primes_are_large_and_distinct() {
        let ps = primes();
        assert_eq!(ps[0], (1 << 31) - 1);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
    }
}
