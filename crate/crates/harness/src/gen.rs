//! Seeded random building blocks: small polynomials, S-units, places and
//! multivariate polynomials over `Q(t)`.
//!
//! Every instance owns a ChaCha stream selected by its index, so the
//! instance does not depend on how many draws other instances made or on
//! evaluation order.

use ffgcd_core::mvpoly::is_coprime;
use ffgcd_core::{BigRational, Monomial, MvPoly, Poly, RationalFunction};
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;
pub type QPoly = Poly<Q>;
pub type QRf = RationalFunction<Q>;
pub type QMv = MvPoly<Q>;

/// The generator for instance `index` of a suite run with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn nonzero_int(rng: &mut impl Rng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

/// `t - a` for a small integer `a`.
pub fn linear_place(a: i64) -> QPoly {
    QPoly::new(vec![q(-a), q(1)])
}

/// A pool of distinct monic irreducible polynomials: `count` linear ones
/// and, when `with_quadratic`, `t^2 + 1`.
pub fn place_pool(rng: &mut impl Rng, count: usize, with_quadratic: bool) -> Vec<QPoly> {
    let mut roots: Vec<i64> = (-4..=4).collect();
    roots.shuffle(rng);
    let mut pool: Vec<QPoly> = roots.into_iter().take(count).map(linear_place).collect();
    if with_quadratic {
        pool.push(QPoly::new(vec![q(1), q(0), q(1)]));
    }
    pool
}

/// `c · Π p^e` with exponents in `-max_exp..=max_exp`, not all zero when
/// `nonconstant`.
pub fn s_unit(rng: &mut impl Rng, pool: &[QPoly], max_exp: i64, nonconstant: bool) -> QRf {
    loop {
        let c = nonzero_int(rng, 3);
        let mut f = QRf::from_i64(c);
        let mut any = false;
        for p in pool {
            let e = rng.gen_range(-max_exp..=max_exp);
            if e != 0 {
                any = true;
                f = &f * &QRf::from_poly(p.clone()).powi(e);
            }
        }
        if any || !nonconstant {
            return f;
        }
    }
}

/// A random polynomial in `t` of degree at most `max_deg` with integer
/// coefficients in `-bound..=bound`, never zero.
pub fn poly_t(rng: &mut impl Rng, max_deg: usize, bound: i64) -> QPoly {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let coeffs: Vec<Q> = (0..=deg).map(|_| q(rng.gen_range(-bound..=bound))).collect();
        let p = QPoly::new(coeffs);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random nonzero element of `K` with numerator and denominator of
/// degree at most `max_deg`.
pub fn ratfunc(rng: &mut impl Rng, max_deg: usize) -> QRf {
    let num = poly_t(rng, max_deg, 4);
    let den = poly_t(rng, max_deg, 3);
    QRf::new(num, den)
}

/// A random nonconstant element of `K`.
pub fn nonconstant_ratfunc(rng: &mut impl Rng, max_deg: usize) -> QRf {
    loop {
        let f = ratfunc(rng, max_deg.max(1));
        if !f.is_constant() {
            return f;
        }
    }
}

/// How coefficients of generated multivariate polynomials are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// Small integers.
    Constant,
    /// Small integers, or with probability one half a polynomial in `t` of
    /// degree at most one.
    Linear,
    /// Arbitrary small rational functions.
    Rational,
}

fn coefficient(rng: &mut impl Rng, kind: Coefficients) -> QRf {
    match kind {
        Coefficients::Constant => QRf::from_i64(nonzero_int(rng, 4)),
        Coefficients::Linear => {
            if rng.gen_bool(0.5) {
                QRf::from_i64(nonzero_int(rng, 4))
            } else {
                let p = QPoly::new(vec![q(rng.gen_range(-3..=3)), q(nonzero_int(rng, 2))]);
                QRf::from_poly(p)
            }
        }
        Coefficients::Rational => ratfunc(rng, 1),
    }
}

/// A random polynomial of degree exactly `deg` in `n` variables, with each
/// monomial present with probability `density`.
pub fn mvpoly(rng: &mut impl Rng, n: usize, deg: u32, density: f64, kind: Coefficients) -> QMv {
    loop {
        let mut terms: Vec<(Monomial, QRf)> = Vec::new();
        for m in Monomial::up_to_degree(n, deg) {
            if rng.gen_bool(density) {
                terms.push((m, coefficient(rng, kind)));
            }
        }
        let f = QMv::from_terms(n, terms);
        if f.degree() == deg && !f.is_constant() {
            return f;
        }
    }
}

/// Like [`mvpoly`], with the leading coefficient replaced by `1` so that
/// the polynomial has a coefficient equal to one.
pub fn normalized_mvpoly(rng: &mut impl Rng, n: usize, deg: u32, density: f64, kind: Coefficients) -> QMv {
    let f = mvpoly(rng, n, deg, density, kind);
    let (lead, _) = f.leading_term().expect("nonzero");
    let lead = lead.clone();
    let mut terms: Vec<(Monomial, QRf)> =
        f.terms().filter(|(m, _)| **m != lead).map(|(m, c)| (m.clone(), c.clone())).collect();
    terms.push((lead, QRf::one()));
    QMv::from_terms(n, terms)
}

/// A coprime pair of nonconstant polynomials, resampled up to `retries`
/// times.
pub fn coprime_pair(
    rng: &mut impl Rng,
    n: usize,
    deg_f: u32,
    deg_g: u32,
    kind: Coefficients,
    normalized: bool,
    retries: usize,
) -> Option<(QMv, QMv)> {
    for _ in 0..retries {
        let draw = |rng: &mut _, deg| {
            if normalized {
                normalized_mvpoly(rng, n, deg, 0.7, kind)
            } else {
                mvpoly(rng, n, deg, 0.7, kind)
            }
        };
        let f = draw(rng, deg_f);
        let g = draw(rng, deg_g);
        if is_coprime(&f, &g) {
            return Some((f, g));
        }
    }
    None
}

/// All subsets of `0..n` other than the empty and the full one.
pub fn proper_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n) - 1).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Nonzero integer vectors of length `n` with `Σ|m_i| <= bound` whose
/// first nonzero entry is positive.
pub fn l1_vectors(n: usize, bound: u64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, n: usize, left: i64, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == n {
            if prefix.iter().any(|&x| x != 0) {
                out.push(prefix.clone());
            }
            return;
        }
        let leading = prefix.iter().all(|&x| x == 0);
        let lo = if leading { 0 } else { -left };
        for v in lo..=left {
            prefix.push(v);
            rec(prefix, n, left - v.abs(), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, bound as i64, &mut out);
    out
}

/// A random element of `Q` with small numerator and denominator.
pub fn small_rational(rng: &mut impl Rng) -> Q {
    Q::new(nonzero_int(rng, 5).into(), rng.gen_range(1..=3i64).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u32> = (0..5).map(|_| instance_rng(7, 3).gen()).collect();
        let b: Vec<u32> = (0..5).map(|_| instance_rng(7, 3).gen()).collect();
        assert_eq!(a, b);
        let x: u64 = instance_rng(7, 3).gen();
        let y: u64 = instance_rng(7, 4).gen();
        assert_ne!(x, y);
    }

    #[test]
    fn short_vectors() {
        let v = l1_vectors(2, 1);
        assert_eq!(v, vec![vec![0, 1], vec![1, 0]]);
        // Half of the nonzero points of the l1 ball of radius 2 in Z^2.
        assert_eq!(l1_vectors(2, 2).len(), 6);
        assert_eq!(proper_subsets(3).count(), 6);
    }

    #[test]
    fn generated_polynomials_have_the_requested_shape() {
        let mut rng = instance_rng(1, 0);
        for _ in 0..20 {
            let f = normalized_mvpoly(&mut rng, 2, 2, 0.6, Coefficients::Linear);
            assert_eq!(f.degree(), 2);
            assert!(f.coefficients().any(|c| c.is_one()));
        }
        let (f, g) = coprime_pair(&mut rng, 2, 1, 2, Coefficients::Constant, true, 50).unwrap();
        assert!(is_coprime(&f, &g));
        let pool = place_pool(&mut rng, 2, false);
        let u = s_unit(&mut rng, &pool, 2, true);
        assert!(!u.is_constant());
    }
}
