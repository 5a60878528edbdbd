//! Greatest common divisors, squarefree and power-free structure, and the
//! factor-level constructions over `K[x1..xn]`.

use num_traits::{One, Zero};

use super::{Monomial, MvPoly};
use crate::derivation::d_u;
use crate::divlattice::UnitTuple;
use crate::error::{Error, Result};
use crate::ffcore::is_dth_power;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

fn lowest_var<S: Scalar>(f: &MvPoly<S>, g: &MvPoly<S>) -> Option<usize> {
    (0..f.nvars()).find(|&j| f.involves(j) || g.involves(j))
}

/// Monic gcd over `K`; `mv_gcd(0, 0) = 0` and constants give 1.
///
/// Works recursively: content and primitive part in the lowest-index
/// variable present, then a primitive pseudo-remainder sequence in that
/// variable.
pub fn mv_gcd<S: Scalar>(f: &MvPoly<S>, g: &MvPoly<S>) -> MvPoly<S> {
    gcd_rec(f, g).monic()
}

pub fn is_coprime<S: Scalar>(f: &MvPoly<S>, g: &MvPoly<S>) -> bool {
    if f.is_zero() || g.is_zero() {
        let h = mv_gcd(f, g);
        return !h.is_zero() && h.is_constant();
    }
    if coprime_after_specializing(f, g) {
        return true;
    }
    mv_gcd(f, g).is_constant()
}

/// `f` times the lcm of its coefficient denominators, as polynomials in `t`.
fn polynomial_coefficients<S: Scalar>(f: &MvPoly<S>) -> Vec<(Monomial, Poly<S>)> {
    let lcm = f.coefficients().fold(Poly::one(), |acc: Poly<S>, c| {
        let g = acc.gcd(c.denom());
        &acc * &c.denom().div_exact(&g).expect("gcd divides")
    });
    f.terms()
        .map(|(m, c)| (m.clone(), c.numer() * &lcm.div_exact(c.denom()).expect("lcm is a multiple")))
        .collect()
}

/// Sufficient test for coprimality over `K`.
///
/// Scaled into `Q[t][x]`, any common factor of `f` and `g` can be taken
/// primitive over `Q[t]`, and its leading coefficient divides that of `f`.
/// At a point `t0` where the latter does not vanish the factor survives as
/// a nonconstant common factor of the specializations, so coprime
/// specializations prove coprimality.
fn coprime_after_specializing<S: Scalar>(f: &MvPoly<S>, g: &MvPoly<S>) -> bool {
    let (pf, pg) = (polynomial_coefficients(f), polynomial_coefficients(g));
    let lead = &pf.last().expect("nonzero").1;
    let n = f.nvars();
    let at = |terms: &[(Monomial, Poly<S>)], t0: &S| {
        MvPoly::from_terms(n, terms.iter().map(|(m, c)| (m.clone(), RationalFunction::constant(c.eval(t0)))))
    };
    [2, -3, 5, 7, -11]
        .into_iter()
        .map(S::from_i64)
        .filter(|t0| !lead.eval(t0).is_zero())
        .take(3)
        .any(|t0| mv_gcd(&at(&pf, &t0), &at(&pg, &t0)).is_constant())
}

fn gcd_rec<S: Scalar>(f: &MvPoly<S>, g: &MvPoly<S>) -> MvPoly<S> {
    let n = f.nvars();
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let Some(v) = lowest_var(f, g) else { return MvPoly::one(n) };
    if f.is_constant() || g.is_constant() {
        return MvPoly::one(n);
    }
    if !f.involves(v) {
        return gcd_rec(f, &content_in(g, v));
    }
    if !g.involves(v) {
        return gcd_rec(&content_in(f, v), g);
    }
    let cf = content_in(f, v);
    let cg = content_in(g, v);
    let pf = f.div_exact(&cf).expect("content divides");
    let pg = g.div_exact(&cg).expect("content divides");
    let c = gcd_rec(&cf, &cg);
    let h = primitive_prs(pf, pg, v);
    (&c * &h).monic()
}

/// Gcd of the coefficients of `f` with respect to `x_v`, made monic.
pub fn content_in<S: Scalar>(f: &MvPoly<S>, v: usize) -> MvPoly<S> {
    let mut acc = MvPoly::zero(f.nvars());
    for c in f.coeffs_in(v).into_iter().filter(|c| !c.is_zero()) {
        acc = gcd_rec(&acc, &c);
        if acc.is_constant() {
            return MvPoly::one(f.nvars());
        }
    }
    acc.monic()
}

fn primitive_part_in<S: Scalar>(f: &MvPoly<S>, v: usize) -> MvPoly<S> {
    f.div_exact(&content_in(f, v)).expect("content divides").monic()
}

fn pseudo_remainder<S: Scalar>(a: &MvPoly<S>, b: &MvPoly<S>, v: usize) -> MvPoly<S> {
    let db = b.degree_in(v);
    let lcb = b.coeffs_in(v).pop().expect("nonzero divisor");
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.coeffs_in(v).pop().expect("nonzero");
        let mut shift = Monomial::one(a.nvars());
        shift.0[v] = dr - db;
        r = &(&lcb * &r) - &(&lcr * &b.mul_monomial(&shift));
    }
    r
}

fn primitive_prs<S: Scalar>(a: MvPoly<S>, b: MvPoly<S>, v: usize) -> MvPoly<S> {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_remainder(&a, &b, v);
        if r.is_zero() {
            return primitive_part_in(&b, v);
        }
        if !r.involves(v) {
            return MvPoly::one(a.nvars());
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

/// Squarefree decomposition: monic, pairwise coprime, squarefree
/// `s_1, s_2, ...` with `f = lc(f) * Π s_k^k`. Trailing ones are dropped.
pub fn squarefree_decomposition<S: Scalar>(f: &MvPoly<S>) -> Vec<MvPoly<S>> {
    let n = f.nvars();
    if f.is_constant() {
        return Vec::new();
    }
    let v = (0..n).find(|&j| f.involves(j)).expect("nonconstant");
    let c = content_in(f, v);
    let p = f.div_exact(&c).expect("content divides").monic();
    let from_content = squarefree_decomposition(&c);
    let from_primitive = yun_in(&p, v);
    let len = from_content.len().max(from_primitive.len());
    let one = MvPoly::one(n);
    let mut out: Vec<MvPoly<S>> = (0..len)
        .map(|k| {
            let a = from_content.get(k).unwrap_or(&one);
            let b = from_primitive.get(k).unwrap_or(&one);
            (a * b).monic()
        })
        .collect();
    while out.last().is_some_and(|s| s.is_constant()) {
        out.pop();
    }
    out
}

fn yun_in<S: Scalar>(p: &MvPoly<S>, v: usize) -> Vec<MvPoly<S>> {
    let dp = p.partial(v);
    let a0 = mv_gcd(p, &dp);
    let mut b = p.div_exact(&a0).expect("gcd divides");
    let c = dp.div_exact(&a0).expect("gcd divides");
    let mut d = &c - &b.partial(v);
    let mut out = Vec::new();
    while !b.is_constant() {
        let a = mv_gcd(&b, &d);
        b = b.div_exact(&a).expect("gcd divides");
        let c = d.div_exact(&a).expect("gcd divides");
        d = &c - &b.partial(v);
        out.push(a);
    }
    out
}

/// `F = a * x^i * G^d * P` with `P` monic, `d`-th power free and free of
/// monomial factors, `G` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DthPowerFree<S: Scalar> {
    pub constant: RationalFunction<S>,
    pub monomial: Monomial,
    pub root: MvPoly<S>,
    pub remainder: MvPoly<S>,
}

impl<S: Scalar> DthPowerFree<S> {
    /// Whether `F` cannot be written as `a x^i G^d`, i.e. `P ∉ K`.
    pub fn has_non_power_part(&self) -> bool {
        !self.remainder.is_constant()
    }

    pub fn reassemble(&self, d: u32) -> MvPoly<S> {
        (&self.root.pow(d) * &self.remainder)
            .mul_monomial(&self.monomial)
            .scale(&self.constant)
    }
}

pub fn dth_power_free_decompose<S: Scalar>(f: &MvPoly<S>, d: u32) -> Result<DthPowerFree<S>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("dth_power_free_decompose"));
    }
    if d < 2 {
        return Err(Error::Precondition(format!("d = {d} must be at least 2")));
    }
    let n = f.nvars();
    let monomial = f.monomial_content();
    let shifted = MvPoly::from_terms(n, f.terms().map(|(m, c)| (monomial.quotient(m), c.clone())));
    let constant = shifted.leading_coeff();
    let mut root = MvPoly::one(n);
    let mut remainder = MvPoly::one(n);
    for (k, s) in squarefree_decomposition(&shifted).iter().enumerate() {
        let k = k as u32 + 1;
        root = &root * &s.pow(k / d);
        remainder = &remainder * &s.pow(k % d);
    }
    let out = DthPowerFree { constant, monomial, root, remainder };
    if &out.reassemble(d) != f {
        return Err(Error::Invariant(format!("power-free decomposition of {f} does not reassemble")));
    }
    Ok(out)
}

/// `a * x^i * Π P_j^{e_j}` with declared irreducible, pairwise coprime
/// factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredForm<S: Scalar> {
    pub constant: RationalFunction<S>,
    pub monomial: Monomial,
    pub factors: Vec<(MvPoly<S>, u32)>,
}

impl<S: Scalar> FactoredForm<S> {
    pub fn new(
        constant: RationalFunction<S>,
        monomial: Monomial,
        factors: Vec<(MvPoly<S>, u32)>,
    ) -> Result<Self> {
        if constant.is_zero() {
            return Err(Error::ZeroInput("FactoredForm"));
        }
        for (i, (p, e)) in factors.iter().enumerate() {
            if *e == 0 {
                return Err(Error::Precondition("factor multiplicities must be positive".into()));
            }
            if p.is_constant() {
                return Err(Error::Precondition(format!("factor {p} is constant")));
            }
            for (q, _) in &factors[i + 1..] {
                if !is_coprime(p, q) {
                    return Err(Error::Precondition(format!("factors {p} and {q} are not coprime")));
                }
            }
        }
        Ok(FactoredForm { constant, monomial, factors })
    }

    /// A polynomial that is a product of the given factors only.
    pub fn from_factors(factors: Vec<(MvPoly<S>, u32)>) -> Result<Self> {
        let n = factors.first().map_or(0, |(p, _)| p.nvars());
        Self::new(RationalFunction::one(), Monomial::one(n), factors)
    }

    pub fn nvars(&self) -> usize {
        self.monomial.0.len()
    }

    pub fn product(&self) -> MvPoly<S> {
        self.factors
            .iter()
            .fold(MvPoly::constant(self.nvars(), self.constant.clone()), |acc, (p, e)| &acc * &p.pow(*e))
            .mul_monomial(&self.monomial)
    }

    /// `Π P_j` without multiplicities.
    pub fn radical(&self) -> MvPoly<S> {
        self.factors.iter().fold(MvPoly::one(self.nvars()), |acc, (p, _)| &acc * p)
    }
}

/// `F_{e,u} = Σ_i e_i D_u(P_i) Π_{j≠i} P_j`.
pub fn f_e_u<S: Scalar>(factors: &FactoredForm<S>, u: &UnitTuple<S>) -> Result<MvPoly<S>> {
    if factors.factors.is_empty() {
        return Err(Error::Precondition("F_e_u needs at least one factor".into()));
    }
    let n = factors.nvars();
    let mut sum = MvPoly::zero(n);
    for (i, (p, e)) in factors.factors.iter().enumerate() {
        let others = factors
            .factors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(MvPoly::one(n), |acc, (_, (q, _))| &acc * q);
        let term = &d_u(p, u)? * &others;
        sum = &sum + &term.scale(&RationalFunction::from_i64(i64::from(*e)));
    }
    Ok(sum)
}

/// Outcome of the coprimality criterion for an irreducible `P` and
/// `D_u(P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeCriterion<S: Scalar> {
    pub coprime: bool,
    /// `a_lead u^lead / a_i u^i` for every monomial `x^i` of `P`.
    pub ratios: Vec<(Monomial, RationalFunction<S>)>,
}

/// `P` and `D_u(P)` fail to be coprime exactly when all the ratios
/// `a_i u^i / a_j u^j` are constants. The answer is cross-checked against
/// the gcd; a disagreement means `P` was not irreducible.
pub fn coprime_criterion_irreducible<S: Scalar>(
    p: &MvPoly<S>,
    u: &UnitTuple<S>,
) -> Result<CoprimeCriterion<S>> {
    if p.num_terms() < 2 {
        return Err(Error::Precondition(format!("{p} is a monomial")));
    }
    if u.len() != p.nvars() {
        return Err(Error::ArityMismatch { expected: p.nvars(), got: u.len() });
    }
    let (lead_m, lead_c) = p.leading_term().expect("nonzero");
    let lead = lead_c * &lead_m.eval(u.entries());
    let ratios: Vec<_> = p
        .terms()
        .map(|(m, c)| (m.clone(), &lead / &(c * &m.eval(u.entries()))))
        .collect();
    let coprime = !ratios.iter().all(|(_, r)| r.is_constant());
    let by_gcd = is_coprime(p, &d_u(p, u)?);
    if by_gcd != coprime {
        return Err(Error::Hypothesis(format!(
            "{p}: ratio test says coprime={coprime}, gcd says {by_gcd}; P is not irreducible"
        )));
    }
    Ok(CoprimeCriterion { coprime, ratios })
}

/// How irreducibility over `k̄(t)` was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrreducibilityCertificate {
    /// Total degree one.
    Linear,
    /// `A x_j + B` with `A`, `B` free of `x_j` and coprime.
    LinearIn(usize),
    /// Quadratic in `x_j` with a discriminant that is not a square.
    NonSquareDiscriminant(usize),
    /// Accepted as given.
    Declared,
}

/// Certifies irreducibility where a cheap exact test exists and rejects
/// polynomials found to be reducible.
pub fn certify_irreducible_mv<S: Scalar>(p: &MvPoly<S>) -> Result<IrreducibilityCertificate> {
    let reducible = |why: String| Err(Error::Precondition(format!("{p} is reducible: {why}")));
    if p.is_constant() {
        return reducible("constant".into());
    }
    if p.degree() == 1 {
        return Ok(IrreducibilityCertificate::Linear);
    }
    if !p.monomial_content().is_one() {
        return reducible("monomial factor".into());
    }
    let n = p.nvars();
    for j in 0..n {
        if p.degree_in(j) == 1 {
            let cs = p.coeffs_in(j);
            let g = mv_gcd(&cs[0], &cs[1]);
            if !g.is_constant() {
                return reducible(format!("common factor {g}"));
            }
            return Ok(IrreducibilityCertificate::LinearIn(j));
        }
    }
    if p.degree() == 2 {
        if let Some(j) = (0..n).find(|&j| p.degree_in(j) == 2) {
            let cs = p.coeffs_in(j);
            let four = RationalFunction::from_i64(4);
            let disc = &(&cs[1] * &cs[1]) - &(&cs[2] * &cs[0]).scale(&four);
            if disc.is_zero() {
                return reducible("zero discriminant".into());
            }
            let dec = dth_power_free_decompose(&disc, 2)?;
            let square = !dec.has_non_power_part()
                && dec.monomial.0.iter().all(|e| e % 2 == 0)
                && is_dth_power(&dec.constant, 2);
            if square {
                return reducible("square discriminant".into());
            }
            return Ok(IrreducibilityCertificate::NonSquareDiscriminant(j));
        }
    }
    Ok(IrreducibilityCertificate::Declared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::parse_rational_function;
    use num_rational::BigRational;

    type M = MvPoly<BigRational>;

    fn mv(s: &str) -> M {
        M::parse(s, 2).unwrap()
    }

    fn units(xs: &[&str]) -> UnitTuple<BigRational> {
        UnitTuple::new(xs.iter().map(|s| parse_rational_function(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert!(is_coprime(&mv("x1-1"), &mv("x2-1")));
        assert_eq!(mv_gcd(&mv("(x1+x2)^2"), &mv("(x1+x2)*x1")), mv("x1+x2"));
        assert_eq!(mv_gcd(&mv("x1^2-t^2"), &mv("x1-t")), mv("x1-t"));
        let g = mv_gcd(&mv("t*(x1*x2+1)*(x1-x2)"), &mv("(x1*x2+1)*(x1+t*x2)^2/t"));
        assert_eq!(g, mv("x1*x2+1"));
        assert!(mv_gcd(&mv("t"), &mv("x1")).is_one_poly());
    }

    #[test]
    fn coprimality_survives_bad_specializations() {
        // Common factors whose coefficients vanish or blow up at the
        // sample points.
        let shared = mv("(t-2)*x1+(t+3)*x2+1/(t-5)");
        let f = &shared * &mv("x1-t");
        let g = &shared * &mv("x2^2+t*x1");
        assert!(!is_coprime(&f, &g));
        assert!(!is_coprime(&mv("(t-2)*x1^2"), &mv("x1*x2")));
        assert!(!is_coprime(&mv("(t-2)*x1+1"), &mv("x1+1/(t-2)")));
        assert!(is_coprime(&mv("(t-2)*x1+1"), &mv("x1-1/(t-2)")));
        assert!(is_coprime(&mv("x1^2+t*x2"), &mv("x1^2+(t+1)*x2-1")));
        assert!(!is_coprime(&mv("x1"), &MvPoly::zero(2)));
        assert!(is_coprime(&mv("3"), &MvPoly::zero(2)));
    }

    #[test]
    fn power_free_examples() {
        let f = mv("t*x1^3*x2*(x1+x2)^2");
        let dec = dth_power_free_decompose(&f, 2).unwrap();
        assert_eq!(dec.constant, parse_rational_function("t").unwrap());
        assert_eq!(dec.monomial, Monomial(vec![3, 1]));
        assert_eq!(dec.root, mv("x1+x2"));
        assert!(dec.remainder.is_one_poly());

        let f = mv("3*x1^2+x2+t");
        let dec = dth_power_free_decompose(&f, 2).unwrap();
        assert_eq!(dec.constant, parse_rational_function("3").unwrap());
        assert!(dec.root.is_one_poly());
        assert_eq!(dec.remainder, f.monic());

        let dec = dth_power_free_decompose(&mv("x1"), 2).unwrap();
        assert_eq!(dec.monomial, Monomial(vec![1, 0]));
        assert!(dec.root.is_one_poly() && dec.remainder.is_one_poly());
    }

    #[test]
    fn squarefree_with_content() {
        let f = mv("(x2+t)^2*(x1*x2-1)^3*(x1+1)");
        let dec = squarefree_decomposition(&f);
        assert_eq!(dec, vec![mv("x1+1"), mv("x2+t"), mv("x1*x2-1")]);
    }

    #[test]
    fn criterion_examples() {
        let p = mv("x1+x2");
        let r = coprime_criterion_irreducible(&p, &units(&["t", "3*t"])).unwrap();
        assert!(!r.coprime);
        assert!(r.ratios.iter().any(|(_, q)| *q == parse_rational_function("1/3").unwrap()));
        let r = coprime_criterion_irreducible(&p, &units(&["t", "t+1"])).unwrap();
        assert!(r.coprime);
        let r = coprime_criterion_irreducible(&mv("x1+t*x2"), &units(&["t^2", "t"])).unwrap();
        assert!(!r.coprime);
        assert!(coprime_criterion_irreducible(&mv("x1"), &units(&["t", "t"])).is_err());
    }

    #[test]
    fn f_e_u_examples() {
        let u = units(&["t", "t+1"]);
        let p = mv("x1+x2");
        let ff = FactoredForm::from_factors(vec![(p.clone(), 2)]).unwrap();
        let feu = f_e_u(&ff, &u).unwrap();
        assert_eq!(feu, d_u(&p, &u).unwrap().scale(&RationalFunction::from_i64(2)));
        assert_eq!(d_u(&ff.product(), &u).unwrap(), &p * &feu);
    }

    #[test]
    fn certificates() {
        use IrreducibilityCertificate::*;
        assert_eq!(certify_irreducible_mv(&mv("x1+t*x2-3")).unwrap(), Linear);
        assert_eq!(certify_irreducible_mv(&mv("x1*x2+1")).unwrap(), LinearIn(0));
        assert_eq!(certify_irreducible_mv(&mv("x1^2+x2^2+1")).unwrap(), NonSquareDiscriminant(0));
        assert!(certify_irreducible_mv(&mv("x1^2-t^2*x2^2")).is_err());
        assert!(certify_irreducible_mv(&mv("x1^2-t")).is_ok());
        assert!(certify_irreducible_mv(&mv("x1^2+2*x1*x2+x2^2")).is_err());
        assert!(certify_irreducible_mv(&mv("x1*x2*(x1+1)")).is_err());
    }
}
