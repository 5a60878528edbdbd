//! Valuations, heights, S-sets and counting functions on `k(t)`.
//!
//! Sums over places never factor anything. The inputs are split into a
//! coprime family of squarefree blocks such that every place inside one
//! block has the same valuation for every input; a sum over places then
//! becomes a sum over blocks weighted by block degree.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::parse::{parse_expr, Algebra};
use crate::place::{poly_order, ClosedPoint, PlaceSet};
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

/// Global data of the function field: the genus and the separating
/// element. Here the curve is the projective line and `t` its coordinate,
/// so `t` has a single simple pole at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldContext {
    pub genus: u64,
}

impl FieldContext {
    pub const RATIONAL: FieldContext = FieldContext { genus: 0 };

    /// `max{0, 2g - 2 + |S|}`, the quantity in most S-unit bounds.
    pub fn euler_term(&self, s_size: u64) -> u64 {
        (2 * self.genus + s_size).saturating_sub(2)
    }
}

impl Default for FieldContext {
    fn default() -> Self {
        Self::RATIONAL
    }
}

/// Order of a function at a place; zero has infinite order everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `max(v, 0)`, the zero order.
    pub fn zero_part(self) -> Option<i64> {
        self.finite().map(|v| v.max(0))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// Evaluation of parsed expressions in `k(t)`.
pub struct FunctionField<S: Scalar>(std::marker::PhantomData<S>);

impl<S: Scalar> Default for FunctionField<S> {
    fn default() -> Self {
        FunctionField(std::marker::PhantomData)
    }
}

pub(crate) fn scalar_from_bigint<S: Scalar>(n: &BigInt) -> Result<S> {
    S::from_big_rational(&BigRational::from_integer(n.clone()))
        .ok_or_else(|| Error::Parse { pos: 0, msg: format!("literal {n} out of range") })
}

impl<S: Scalar> Algebra for FunctionField<S> {
    type Elem = RationalFunction<S>;

    fn int(&self, n: &BigInt) -> Result<Self::Elem> {
        Ok(RationalFunction::constant(scalar_from_bigint(n)?))
    }
    fn var(&self, name: &str) -> Result<Self::Elem> {
        match name {
            "t" => Ok(RationalFunction::t()),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown variable {other}") }),
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
        if b.is_zero() {
            return Err(Error::Parse { pos: 0, msg: "division by zero".into() });
        }
        Ok(&a / &b)
    }
    fn pow(&self, a: Self::Elem, e: i64) -> Result<Self::Elem> {
        if e < 0 && a.is_zero() {
            return Err(Error::Parse { pos: 0, msg: "negative power of zero".into() });
        }
        Ok(a.powi(e))
    }
    fn neg(&self, a: Self::Elem) -> Self::Elem {
        -a
    }
}

/// Parses an element of `k(t)`, e.g. `(t^2+1)/(t-2)`.
pub fn parse_rational_function<S: Scalar>(src: &str) -> Result<RationalFunction<S>> {
    parse_expr(src)?.eval(&FunctionField::<S>::default())
}

pub fn valuation<S: Scalar>(f: &RationalFunction<S>, p: &ClosedPoint<S>) -> Valuation {
    if f.is_zero() {
        return Valuation::Infinite;
    }
    match p {
        ClosedPoint::Infinity => {
            Valuation::Finite(f.valuation_at_infinity().expect("nonzero function"))
        }
        ClosedPoint::Finite(m) => {
            let zeros = f.numer().split_power(m).0 as i64;
            let poles = f.denom().split_power(m).0 as i64;
            Valuation::Finite(zeros - poles)
        }
    }
}

/// Splits squarefree inputs into pairwise coprime monic squarefree blocks
/// such that each input is a product of blocks. Sorted deterministically.
pub fn coprime_blocks<S: Scalar>(inputs: impl IntoIterator<Item = Poly<S>>) -> Vec<Poly<S>> {
    coprime_blocks_with_sources(inputs).into_iter().map(|(b, _)| b).collect()
}

/// Like [`coprime_blocks`], pairing each block with the (sorted) positions
/// of the inputs it divides.
pub fn coprime_blocks_with_sources<S: Scalar>(
    inputs: impl IntoIterator<Item = Poly<S>>,
) -> Vec<(Poly<S>, Vec<usize>)> {
    let mut blocks: Vec<(Poly<S>, Vec<usize>)> = Vec::new();
    for (i, f) in inputs.into_iter().enumerate() {
        let mut f = f.squarefree_part();
        if f.is_constant() {
            continue;
        }
        let mut next = Vec::with_capacity(blocks.len() + 2);
        for (b, sources) in blocks {
            if f.is_constant() {
                next.push((b, sources));
                continue;
            }
            let g = f.gcd(&b);
            if g.is_one() {
                next.push((b, sources));
                continue;
            }
            let rest = b.div_exact(&g).expect("gcd divides");
            f = f.div_exact(&g).expect("gcd divides");
            let mut shared = sources.clone();
            shared.push(i);
            if !rest.is_constant() {
                next.push((rest, sources));
            }
            next.push((g, shared));
        }
        if !f.is_constant() {
            next.push((f.monic(), vec![i]));
        }
        blocks = next;
    }
    blocks.sort_by(|a, b| poly_order(&a.0, &b.0));
    blocks
}

/// Yun components of a polynomial as `(multiplicity, component)`.
fn components<S: Scalar>(p: &Poly<S>) -> impl Iterator<Item = (i64, Poly<S>)> {
    p.squarefree_decomposition()
        .into_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_one())
        .map(|(k, s)| (k as i64 + 1, s))
}

/// One coprime block with the common valuation of each input at its places.
#[derive(Clone, Debug)]
pub struct BlockRow<S: Scalar> {
    pub poly: Poly<S>,
    pub degree: u64,
    pub vals: Vec<Valuation>,
    pub in_s: bool,
}

/// Valuations of several functions at every place where any of them is
/// not a unit, grouped into blocks. Places outside all blocks have
/// valuation zero for every input.
#[derive(Clone, Debug)]
pub struct LocalTable<S: Scalar> {
    pub blocks: Vec<BlockRow<S>>,
    pub infinity: Vec<Valuation>,
    pub infinity_in_s: bool,
}

impl<S: Scalar> LocalTable<S> {
    pub fn new(fs: &[RationalFunction<S>], s: &PlaceSet<S>) -> Self {
        let comps: Vec<Vec<(i64, Poly<S>)>> = fs
            .iter()
            .map(|f| {
                if f.is_zero() {
                    return Vec::new();
                }
                components(f.numer())
                    .chain(components(f.denom()).map(|(k, c)| (-k, c)))
                    .collect()
            })
            .collect();
        let component_count: usize = comps.iter().map(Vec::len).sum();
        let inputs = comps
            .iter()
            .flat_map(|cs| cs.iter().map(|(_, c)| c.clone()))
            .chain(s.blocks().iter().cloned());
        // Input position of each component, grouped by function.
        let mut offsets = Vec::with_capacity(comps.len());
        let mut next = 0;
        for cs in &comps {
            offsets.push(next);
            next += cs.len();
        }
        let blocks = coprime_blocks_with_sources(inputs)
            .into_iter()
            .map(|(b, sources)| {
                let vals = fs
                    .iter()
                    .zip(&comps)
                    .zip(&offsets)
                    .map(|((f, cs), &start)| {
                        if f.is_zero() {
                            return Valuation::Infinite;
                        }
                        let v = (0..cs.len())
                            .find(|k| sources.binary_search(&(start + k)).is_ok())
                            .map_or(0, |k| cs[k].0);
                        Valuation::Finite(v)
                    })
                    .collect();
                let in_s = sources.last().is_some_and(|&i| i >= component_count);
                BlockRow { degree: b.deg() as u64, poly: b, vals, in_s }
            })
            .collect();
        let infinity = fs.iter().map(|f| valuation(f, &ClosedPoint::Infinity)).collect();
        LocalTable { blocks, infinity, infinity_in_s: s.contains_infinity() }
    }

    /// Iterates `(degree weight, valuations, in S)` over blocks and the
    /// place at infinity.
    pub fn rows(&self) -> impl Iterator<Item = (u64, &[Valuation], bool)> {
        self.blocks
            .iter()
            .map(|b| (b.degree, b.vals.as_slice(), b.in_s))
            .chain(std::iter::once((1, self.infinity.as_slice(), self.infinity_in_s)))
    }
}

fn nonzero<S: Scalar>(f: &RationalFunction<S>, what: &'static str) -> Result<()> {
    if f.is_zero() {
        Err(Error::ZeroInput(what))
    } else {
        Ok(())
    }
}

/// `Σ_p deg(p)·v_p(f)`, which vanishes for every nonzero `f`.
pub fn divisor_degree<S: Scalar>(f: &RationalFunction<S>) -> Result<i64> {
    nonzero(f, "divisor_degree")?;
    let table = LocalTable::new(std::slice::from_ref(f), &PlaceSet::empty());
    Ok(table
        .rows()
        .map(|(w, v, _)| w as i64 * v[0].finite().expect("nonzero"))
        .sum())
}

/// Number of poles with multiplicity. Computed from valuations and checked
/// against `max(deg num, deg den)`.
pub fn height<S: Scalar>(f: &RationalFunction<S>) -> Result<u64> {
    nonzero(f, "height")?;
    let table = LocalTable::new(std::slice::from_ref(f), &PlaceSet::empty());
    let h: u64 = table
        .rows()
        .map(|(w, v, _)| w * (-v[0].finite().expect("nonzero")).max(0) as u64)
        .sum();
    let direct = f.degree_height();
    if h != direct {
        return Err(Error::Invariant(format!(
            "height of {f}: valuations give {h}, degrees give {direct}"
        )));
    }
    Ok(h)
}

/// `Σ_p -min_i v_p(f_i)` over the nonzero entries.
pub fn projective_height<S: Scalar>(fs: &[RationalFunction<S>]) -> Result<u64> {
    if fs.iter().all(Zero::is_zero) {
        return Err(Error::ZeroInput("projective_height"));
    }
    let table = LocalTable::new(fs, &PlaceSet::empty());
    let total: i64 = table
        .rows()
        .map(|(w, vals, _)| {
            let m = vals.iter().filter_map(|v| v.finite()).min().expect("some nonzero entry");
            -(w as i64) * m
        })
        .sum();
    Ok(u64::try_from(total).expect("projective height is nonnegative"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Zeros counted with multiplicity.
    Full,
    /// Each geometric zero counted once.
    Truncated,
}

/// Zeros of `f` outside `S`.
pub fn counting<S: Scalar>(f: &RationalFunction<S>, s: &PlaceSet<S>, mode: CountMode) -> Result<u64> {
    nonzero(f, "counting")?;
    let table = LocalTable::new(std::slice::from_ref(f), s);
    Ok(table
        .rows()
        .filter(|(_, _, in_s)| !in_s)
        .map(|(w, v, _)| {
            let z = v[0].zero_part().expect("nonzero") as u64;
            w * match mode {
                CountMode::Full => z,
                CountMode::Truncated => z.min(1),
            }
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcdMode {
    /// Common zeros at places outside `S`.
    OutsideS,
    /// Common zeros everywhere.
    Everywhere,
}

/// `Σ min{v_p^0(f), v_p^0(g)}` over the places selected by `mode`.
pub fn gcd_counting<S: Scalar>(
    f: &RationalFunction<S>,
    g: &RationalFunction<S>,
    s: &PlaceSet<S>,
    mode: GcdMode,
) -> Result<u64> {
    nonzero(f, "gcd_counting")?;
    nonzero(g, "gcd_counting")?;
    let table = LocalTable::new(&[f.clone(), g.clone()], s);
    Ok(table
        .rows()
        .filter(|(_, _, in_s)| mode == GcdMode::Everywhere || !in_s)
        .map(|(w, v, _)| {
            let a = v[0].zero_part().expect("nonzero");
            let b = v[1].zero_part().expect("nonzero");
            w * a.min(b) as u64
        })
        .sum())
}

/// Valuation zero at every place outside `S`.
pub fn is_s_unit<S: Scalar>(f: &RationalFunction<S>, s: &PlaceSet<S>) -> bool {
    if f.is_zero() {
        return false;
    }
    let support = s.finite_support();
    let finite_ok = f.numer().squarefree_part().divides(&support)
        && f.denom().squarefree_part().divides(&support);
    finite_ok && (s.contains_infinity() || f.valuation_at_infinity() == Some(0))
}

/// Valuation nonnegative at every place outside `S`.
pub fn is_s_integer<S: Scalar>(f: &RationalFunction<S>, s: &PlaceSet<S>) -> bool {
    if f.is_zero() {
        return true;
    }
    let finite_ok = f.denom().squarefree_part().divides(&s.finite_support());
    finite_ok && (s.contains_infinity() || f.valuation_at_infinity().expect("nonzero") >= 0)
}

/// Whether `f` is a `d`-th power over the algebraic closure of the
/// constants, i.e. whether `d` divides every valuation of `f`. Constants
/// are always powers. Zero is a `d`-th power.
pub fn is_dth_power<S: Scalar>(f: &RationalFunction<S>, d: u32) -> bool {
    assert!(d >= 1, "is_dth_power needs d >= 1");
    if f.is_zero() || d == 1 {
        return true;
    }
    f.numer().dth_root(d).is_some() && f.denom().dth_root(d).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QRatFunc;

    fn rf(s: &str) -> QRatFunc {
        parse_rational_function(s).unwrap()
    }

    fn places(s: &str) -> PlaceSet<BigRational> {
        PlaceSet::parse(s).unwrap()
    }

    fn pt(s: &str) -> ClosedPoint<BigRational> {
        if s == "inf" {
            ClosedPoint::Infinity
        } else {
            ClosedPoint::finite(rf(s).numer().clone()).unwrap()
        }
    }

    #[test]
    fn valuation_examples() {
        let f = rf("t^2/(t+1)");
        assert_eq!(valuation(&f, &pt("t")), Valuation::Finite(2));
        assert_eq!(valuation(&f, &pt("inf")), Valuation::Finite(-1));
        assert_eq!(valuation(&rf("1"), &pt("t^2+1")), Valuation::Finite(0));
        assert_eq!(valuation(&rf("0"), &pt("t")), Valuation::Infinite);
    }

    #[test]
    fn height_examples() {
        assert_eq!(height(&rf("(t^3+1)/(t-2)")).unwrap(), 3);
        assert_eq!(height(&rf("7/3")).unwrap(), 0);
        assert_eq!(height(&rf("(t^2+1)/(t^2+2)")).unwrap(), 2);
        assert!(matches!(height(&rf("0")), Err(Error::ZeroInput(_))));
    }

    #[test]
    fn projective_height_examples() {
        assert_eq!(projective_height(&[rf("1"), rf("t")]).unwrap(), 1);
        assert_eq!(projective_height(&[rf("t"), rf("t")]).unwrap(), 0);
        assert_eq!(projective_height(&[rf("t^2"), rf("1/(t+1)")]).unwrap(), 3);
        assert!(projective_height(&[rf("0"), rf("0")]).is_err());
    }

    #[test]
    fn counting_examples() {
        let f = rf("t^3*(t-1)");
        assert_eq!(counting(&f, &places("inf"), CountMode::Full).unwrap(), 4);
        assert_eq!(counting(&f, &places("inf"), CountMode::Truncated).unwrap(), 2);
        assert_eq!(counting(&rf("t^3"), &places("t, inf"), CountMode::Full).unwrap(), 0);
        let g = rf("(t^2+1)^2");
        assert_eq!(counting(&g, &places(""), CountMode::Full).unwrap(), 4);
        assert_eq!(counting(&g, &places(""), CountMode::Truncated).unwrap(), 2);
    }

    #[test]
    fn gcd_counting_examples() {
        let s = places("inf");
        assert_eq!(gcd_counting(&rf("t^2*(t-1)"), &rf("t^3"), &s, GcdMode::OutsideS).unwrap(), 2);
        assert_eq!(gcd_counting(&rf("t^2+1"), &rf("t-3"), &s, GcdMode::OutsideS).unwrap(), 0);
        let h = gcd_counting(&rf("t^2/(t+1)"), &rf("t^3*(t+1)"), &places(""), GcdMode::Everywhere);
        assert_eq!(h.unwrap(), 2);
    }

    #[test]
    fn s_unit_examples() {
        assert!(is_s_unit(&rf("t/(t+1)"), &places("t, t+1, inf")));
        assert!(!is_s_unit(&rf("t-2"), &places("t, inf")));
        assert!(is_s_unit(&rf("5"), &places("")));
        assert!(is_s_integer(&rf("t^2+3"), &places("inf")));
        assert!(!is_s_integer(&rf("1/t"), &places("inf")));
    }

    #[test]
    fn dth_power_examples() {
        assert!(is_dth_power(&rf("t^2/(t+1)^2"), 2));
        assert!(!is_dth_power(&rf("t^2*(t+1)"), 2));
        assert!(is_dth_power(&rf("7*t^4"), 2));
        assert!(is_dth_power(&rf("(t-1)^3/(t^2+3)^6"), 3));
        assert!(!is_dth_power(&rf("(t-1)^3/(t^2+3)^6"), 2));
        assert!(!is_dth_power(&rf("t^2/(t+1)"), 2));
    }

    #[test]
    fn blocks_are_coprime_and_cover_inputs() {
        let p = |s: &str| rf(s).numer().clone();
        let blocks = coprime_blocks([p("t^2-1"), p("t-1")]);
        assert_eq!(blocks, vec![p("t-1"), p("t+1")]);
        let blocks = coprime_blocks([p("t^2*(t+1)"), p("t*(t+1)^2"), p("t^3+t")]);
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                assert!(a.gcd(b).is_one());
            }
        }
        assert_eq!(blocks.len(), 3);
    }

    #[test]
    fn block_sources_are_exactly_the_divisible_inputs() {
        let p = |s: &str| rf(s).numer().clone();
        let inputs = [p("t*(t+1)"), p("t^2+1"), p("(t+1)*(t-3)"), p("t"), p("7")];
        for (b, sources) in coprime_blocks_with_sources(inputs.clone()) {
            let expected: Vec<usize> = (0..inputs.len()).filter(|&i| b.divides(&inputs[i])).collect();
            assert_eq!(sources, expected, "block {b}");
        }
    }

    #[test]
    fn euler_term() {
        assert_eq!(FieldContext::RATIONAL.euler_term(3), 1);
        assert_eq!(FieldContext::RATIONAL.euler_term(1), 0);
    }
}
