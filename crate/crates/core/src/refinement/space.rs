//! Spaces over `k` spanned by products of elements of `K`, and exact rank
//! tests over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

pub const DEFAULT_PRODUCT_CAP: usize = 5000;

const RANK_PRIME: u64 = 2_147_483_647;

fn integer_rows<S: Scalar>(polys: &[Poly<S>], width: usize) -> Vec<Vec<BigInt>> {
    polys
        .iter()
        .map(|p| {
            let qs: Vec<BigRational> = (0..width).map(|k| p.coeff(k).to_big_rational()).collect();
            let l = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            qs.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect()
}

fn rank_mod_p(rows: &[Vec<BigInt>], width: usize) -> usize {
    let p = BigInt::from(RANK_PRIME);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.mod_floor(&p).to_u64().expect("residue")).collect())
        .collect();
    let mut rank = 0;
    for c in 0..width {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = modpow(m[rank][c], RANK_PRIME - 2);
        for x in m[rank].iter_mut() {
            *x = *x * inv % RANK_PRIME;
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = (*x + RANK_PRIME - f * y % RANK_PRIME) % RANK_PRIME;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn modpow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % RANK_PRIME;
        }
        a = a * a % RANK_PRIME;
        e >>= 1;
    }
    r
}

/// Rank over the rationals of a family of polynomials.
///
/// A full rank modulo a large prime certifies full rank over the
/// rationals; otherwise the rank is computed exactly.
pub fn polynomial_rank<S: Scalar>(polys: &[Poly<S>]) -> usize {
    let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    if polys.len() > width {
        return exact_rank(polys, width);
    }
    let rows = integer_rows(polys, width);
    if rank_mod_p(&rows, width) == polys.len() {
        return polys.len();
    }
    exact_rank(polys, width)
}

fn exact_rank<S: Scalar>(polys: &[Poly<S>], width: usize) -> usize {
    let mut e = Echelon::<BigRational>::new(width);
    for p in polys {
        let v: Vec<BigRational> = (0..width).map(|k| p.coeff(k).to_big_rational()).collect();
        e.insert(&v);
    }
    e.rank()
}

/// Whether the given functions are linearly independent over `k`.
pub fn independent_over_k<S: Scalar>(fs: &[RationalFunction<S>]) -> bool {
    let den = fs.iter().fold(Poly::one(), |acc: Poly<S>, f| lcm(&acc, f.denom()));
    let polys: Vec<Poly<S>> = fs
        .iter()
        .map(|f| &f.numer().clone() * &den.div_exact(f.denom()).expect("lcm"))
        .collect();
    polynomial_rank(&polys) == fs.len()
}

pub(crate) fn lcm<S: Scalar>(a: &Poly<S>, b: &Poly<S>) -> Poly<S> {
    (&a.div_exact(&a.gcd(b)).expect("gcd divides") * b).monic()
}

/// One level of a [`CoefficientSpace`]: basis polynomials and their
/// reduced echelon form over the rationals.
#[derive(Clone, Debug)]
struct Level<S: Scalar> {
    basis: Vec<Poly<S>>,
    echelon: Echelon<BigRational>,
}

impl<S: Scalar> Level<S> {
    fn span(polys: impl IntoIterator<Item = Poly<S>>, width: usize) -> Self {
        let mut echelon = Echelon::<BigRational>::new(width);
        let mut basis = Vec::new();
        for p in polys {
            if echelon.insert(&rational_coords(&p, width)) {
                basis.push(p);
            }
        }
        Level { basis, echelon }
    }

    fn contains(&self, p: &Poly<S>) -> bool {
        let width = self.echelon.width();
        p.coeffs().len() <= width && self.echelon.contains(&rational_coords(p, width))
    }
}

fn rational_coords<S: Scalar>(p: &Poly<S>, width: usize) -> Vec<BigRational> {
    (0..width).map(|k| p.coeff(k).to_big_rational()).collect()
}

/// `V(r)`: the `k`-span of all products of `r` elements of a finite subset
/// of `K`, for `r = 0, 1, ...` up to the level built so far.
///
/// Level `r` is stored as polynomials `P` standing for `P / den^r`, where
/// `den` clears every generator. Since products are multilinear, each level
/// is the span of the previous level times a basis of `V(1)`.
#[derive(Clone, Debug)]
pub struct CoefficientSpace<S: Scalar> {
    generators: Vec<Poly<S>>,
    den: Poly<S>,
    levels: Vec<Level<S>>,
    product_cap: usize,
}

impl<S: Scalar> CoefficientSpace<S> {
    pub fn new(elements: &[RationalFunction<S>], product_cap: usize) -> Result<Self> {
        if elements.iter().any(Zero::is_zero) {
            return Err(Error::ZeroInput("coefficient_space"));
        }
        let den = elements.iter().fold(Poly::one(), |acc: Poly<S>, f| lcm(&acc, f.denom()));
        let cleared: Vec<Poly<S>> = elements
            .iter()
            .map(|f| f.numer() * &den.div_exact(f.denom()).expect("lcm"))
            .collect();
        let width = cleared.iter().map(|p| p.coeffs().len()).max().unwrap_or(1);
        let generators = Level::span(cleared, width).basis;
        let levels = vec![Level::span([Poly::one()], 1)];
        Ok(CoefficientSpace { generators, den, levels, product_cap })
    }

    /// Builds levels up to `r`.
    pub fn extend_to(&mut self, r: usize) -> Result<()> {
        while self.levels.len() <= r {
            let prev = self.levels.last().expect("level 0 exists");
            let needed = prev.basis.len() * self.generators.len();
            if needed > self.product_cap {
                return Err(Error::CapExceeded {
                    what: "coefficient space products",
                    needed,
                    cap: self.product_cap,
                });
            }
            let width = prev.echelon.width()
                + self.generators.iter().map(|g| g.deg()).max().unwrap_or(0);
            let products = prev
                .basis
                .iter()
                .flat_map(|b| self.generators.iter().map(move |g| b * g))
                .collect::<Vec<_>>();
            let next = Level::span(products, width);
            self.levels.push(next);
        }
        Ok(())
    }

    /// Highest level built so far.
    pub fn built(&self) -> usize {
        self.levels.len() - 1
    }

    fn level(&self, r: usize) -> Result<&Level<S>> {
        self.levels.get(r).ok_or_else(|| {
            Error::Precondition(format!("coefficient space level {r} not built"))
        })
    }

    /// `d_r`, for a level already built.
    pub fn dim(&self, r: usize) -> Result<usize> {
        Ok(self.level(r)?.basis.len())
    }

    /// `d_0, ..., d_r`.
    pub fn dims(&self, r: usize) -> Result<Vec<usize>> {
        (0..=r).map(|k| self.dim(k)).collect()
    }

    /// A basis of `V(r)` as elements of `K`.
    pub fn basis(&self, r: usize) -> Result<Vec<RationalFunction<S>>> {
        let den_r = self.den.pow(r as u32);
        Ok(self
            .level(r)?
            .basis
            .iter()
            .map(|p| RationalFunction::new(p.clone(), den_r.clone()))
            .collect())
    }

    pub fn contains(&self, x: &RationalFunction<S>, r: usize) -> Result<bool> {
        let level = self.level(r)?;
        if x.is_zero() {
            return Ok(true);
        }
        let scaled = x * &RationalFunction::from_poly(self.den.pow(r as u32));
        Ok(scaled.is_polynomial() && level.contains(scaled.numer()))
    }

    /// Whether `ys` are linearly nondegenerate over `V(r)`: no nontrivial
    /// relation `Σ a_i y_i = 0` with `a_i ∈ V(r)`. Equivalently the
    /// products of a basis of `V(r)` with the `y_i` are independent
    /// over `k`.
    pub fn nondegenerate(&self, ys: &[RationalFunction<S>], r: usize) -> Result<bool> {
        let level = self.level(r)?;
        if ys.iter().any(Zero::is_zero) {
            return Ok(false);
        }
        let yden = ys.iter().fold(Poly::one(), |acc: Poly<S>, f| lcm(&acc, f.denom()));
        let ynums: Vec<Poly<S>> = ys
            .iter()
            .map(|f| f.numer() * &yden.div_exact(f.denom()).expect("lcm"))
            .collect();
        let count = level.basis.len() * ynums.len();
        let max_deg = level.basis.iter().map(|p| p.deg()).max().unwrap_or(0)
            + ynums.iter().map(|p| p.deg()).max().unwrap_or(0);
        if count > max_deg + 1 {
            return Ok(false);
        }
        let products: Vec<Poly<S>> =
            level.basis.iter().flat_map(|a| ynums.iter().map(move |y| a * y)).collect();
        Ok(polynomial_rank(&products) == count)
    }
}

/// `d_r = dim V(r)` for the `k`-span of `elements`.
pub fn coefficient_space<S: Scalar>(
    elements: &[RationalFunction<S>],
    r: usize,
) -> Result<CoefficientSpace<S>> {
    let mut space = CoefficientSpace::new(elements, DEFAULT_PRODUCT_CAP)?;
    space.extend_to(r)?;
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::parse_rational_function;
    use crate::QRatFunc;

    fn rf(s: &str) -> QRatFunc {
        parse_rational_function(s).unwrap()
    }

    #[test]
    fn dimension_examples() {
        let s = coefficient_space(&[rf("2"), rf("-7/3")], 3).unwrap();
        assert_eq!(s.dims(3).unwrap(), vec![1, 1, 1, 1]);
        let s = coefficient_space(&[rf("1"), rf("t")], 2).unwrap();
        assert_eq!(s.dim(2).unwrap(), 3);
        let s = coefficient_space(&[rf("t"), rf("t+1")], 2).unwrap();
        assert_eq!(s.dim(2).unwrap(), 3);
        let s = coefficient_space(&[rf("1/t"), rf("1")], 2).unwrap();
        assert_eq!(s.dims(2).unwrap(), vec![1, 2, 3]);
        assert!(s.contains(&rf("1/t^2 + 5"), 2).unwrap());
        assert!(!s.contains(&rf("t"), 2).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let gens: Vec<QRatFunc> = (1..=10).map(|k| rf(&format!("t^{k}+{k}"))).collect();
        let mut s = CoefficientSpace::new(&gens, 50).unwrap();
        assert!(matches!(s.extend_to(3), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rank_and_nondegeneracy() {
        assert!(independent_over_k(&[rf("1"), rf("t"), rf("1/(t+1)")]));
        assert!(!independent_over_k(&[rf("1"), rf("t"), rf("t+1")]));
        let k = coefficient_space(&[rf("1")], 1).unwrap();
        assert!(!k.nondegenerate(&[rf("1"), rf("t"), rf("t+1")], 1).unwrap());
        let v = coefficient_space(&[rf("1"), rf("t")], 1).unwrap();
        assert!(k.nondegenerate(&[rf("1"), rf("t^2")], 1).unwrap());
        assert!(!v.nondegenerate(&[rf("1"), rf("t")], 1).unwrap());
    }
}
