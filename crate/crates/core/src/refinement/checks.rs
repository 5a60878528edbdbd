//! Exact evaluation of the inequalities built on the constructed forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{
    binomial, build_linear_forms, build_point_basis, IdealBasis, LinearFormSystem, PointBasis,
    RefinementParams, CoefficientSpace, DEFAULT_PRODUCT_CAP,
};
use crate::divlattice::UnitTuple;
use crate::error::{Error, Result};
use crate::ffcore::{
    gcd_counting, height, is_s_unit, projective_height, valuation, FieldContext, GcdMode,
    LocalTable,
};
use crate::linalg::Echelon;
use crate::mvpoly::{Monomial, MvPoly};
use crate::place::{ClosedPoint, PlaceSet};
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

fn q(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Both sides of an inequality, with `margin >= 0` exactly when it holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMargin {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub margin: BigRational,
}

impl ExactMargin {
    pub fn at_most(lhs: BigRational, rhs: BigRational) -> Self {
        let margin = &rhs - &lhs;
        ExactMargin { lhs, rhs, margin }
    }

    pub fn at_least(lhs: BigRational, rhs: BigRational) -> Self {
        let margin = &lhs - &rhs;
        ExactMargin { lhs, rhs, margin }
    }

    pub fn holds(&self) -> bool {
        !self.margin.is_negative()
    }
}

fn min_valuation<S: Scalar>(xs: &[RationalFunction<S>], p: &ClosedPoint<S>) -> Option<i64> {
    xs.iter().filter_map(|x| valuation(x, p).finite()).min()
}

/// `λ_{L,p}(a) = v_p(L(a)) - v_p(a) - v_p(L)` for `L = Σ coeffs[j] X_j`.
pub fn weil_function<S: Scalar>(
    coeffs: &[RationalFunction<S>],
    a: &[RationalFunction<S>],
    p: &ClosedPoint<S>,
) -> Result<i64> {
    if coeffs.len() != a.len() {
        return Err(Error::ArityMismatch { expected: coeffs.len(), got: a.len() });
    }
    let va = min_valuation(a, p).ok_or(Error::ZeroInput("weil_function point"))?;
    let vl = min_valuation(coeffs, p).ok_or(Error::ZeroInput("weil_function form"))?;
    let value = coeffs
        .iter()
        .zip(a)
        .fold(RationalFunction::zero(), |acc, (c, x)| &acc + &(c * x));
    let v = valuation(&value, p)
        .finite()
        .ok_or_else(|| Error::Precondition("the form vanishes at the point".into()))?;
    Ok(v - va - vl)
}

/// Both sides of the moving-targets second main theorem for a finite
/// family of forms and a point.
#[derive(Clone, Debug)]
pub struct MsmtReport {
    /// Whether the point is nondegenerate over `V_L(r+1)`.
    pub nondegenerate: bool,
    pub w: usize,
    pub u: usize,
    pub forms_height: u64,
    pub point_height: u64,
    /// Present when every form is nonzero at the point.
    pub margin: Option<ExactMargin>,
}

/// Evaluates `Σ_{p∈S} max_J Σ_{j∈J} λ_{L_j,p}(a)` and
/// `(w/u)(n+1)(h(a) + (r+2)h(L) + ((nw+w-1)/2) max{0, 2g-2+|S|})`.
///
/// The maximum over independent subsets is found greedily, which is exact
/// because independent subsets form a matroid and every weight is
/// nonnegative.
pub fn msmt_check<S: Scalar>(
    forms: &[Vec<RationalFunction<S>>],
    a: &[RationalFunction<S>],
    s: &PlaceSet<S>,
    r: usize,
    product_cap: usize,
) -> Result<MsmtReport> {
    if r == 0 {
        return Err(Error::Precondition("need r >= 1".into()));
    }
    let width = a.len();
    let coeffs: Vec<RationalFunction<S>> =
        forms.iter().flatten().filter(|x| !x.is_zero()).cloned().collect();
    let mut space = CoefficientSpace::new(&coeffs, product_cap)?;
    space.extend_to(r + 1)?;
    let w = space.dim(r + 1)?;
    let u = space.dim(r)?;
    let nondegenerate = space.nondegenerate(a, r + 1)?;
    let forms_height = projective_height(&coeffs)?;
    let point_height = projective_height(a)?;
    let values: Vec<RationalFunction<S>> = forms
        .iter()
        .map(|l| l.iter().zip(a).fold(RationalFunction::zero(), |acc, (c, x)| &acc + &(c * x)))
        .collect();
    if values.iter().any(Zero::is_zero) {
        return Ok(MsmtReport { nondegenerate, w, u, forms_height, point_height, margin: None });
    }
    let mut lhs = 0i64;
    for p in s.points()? {
        let mut weights: Vec<(i64, usize)> = forms
            .iter()
            .enumerate()
            .map(|(j, l)| Ok((weil_function(l, a, &p)?, j)))
            .collect::<Result<_>>()?;
        weights.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        let mut echelon = Echelon::new(width);
        let mut best = 0;
        for (lambda, j) in weights {
            if echelon.rank() == width {
                break;
            }
            if echelon.insert(&forms[j]) {
                best += lambda;
            }
        }
        lhs += p.degree() as i64 * best;
    }
    let euler = FieldContext::default().euler_term(s.size());
    let n = width - 1;
    let (wq, uq) = (q(w as i64), q(u as i64));
    let inner = q(point_height)
        + q((r + 2) as u64) * q(forms_height)
        + q((n * w + w) as i64 - 1) / q(2) * q(euler);
    let rhs = &wq / &uq * q(width as i64) * inner;
    Ok(MsmtReport {
        nondegenerate,
        w,
        u,
        forms_height,
        point_height,
        margin: Some(ExactMargin::at_most(q(lhs), rhs)),
    })
}

/// One instance of `v_p(L(Φ(g))) - v_p(L) >= v_p(g^{i_p(i)}) + v_p(F1) + v_p(F2)`.
#[derive(Clone, Debug)]
pub struct KeyMargin {
    pub point: String,
    pub monomial: Monomial,
    /// `None` when `L(Φ(g)) = 0`, so the left side is infinite.
    pub lhs: Option<i64>,
    pub rhs: i64,
}

impl KeyMargin {
    pub fn margin(&self) -> Option<i64> {
        self.lhs.map(|l| l - self.rhs)
    }

    pub fn holds(&self) -> bool {
        self.lhs.is_none_or(|l| l >= self.rhs)
    }
}

/// Whether the gcd bound applies or the monomials of `g` are degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    GcdBound,
    Relation,
}

#[derive(Clone, Debug)]
pub struct KeyInequalityReport {
    pub params: RefinementParams,
    pub point_margins: Vec<KeyMargin>,
    /// Selected basis valuations are non-increasing at every place.
    pub basis_decreasing: bool,
    /// Complement monomials with valuation above the last basis monomial,
    /// summed over places.
    pub chain_exceptions: usize,
    /// Every monomial occurring in a reduction has valuation at least that
    /// of the reduced monomial.
    pub reduction_chain: bool,
    /// `Σ_{p∈S} Σ_i v_p(g^{i_p(i)}) >= -M' m n max h(g_j)`.
    pub main_term: ExactMargin,
    /// `h(Φ(g)) <= m n max h(g_j) + h(F1) + h(F2)`.
    pub phi_height: ExactMargin,
    /// `N_{S,gcd} <= -h(Φ(g)) - Σ_{p∈S} v_p(Φ(g)) + Σ_{p∉S} -(v_p(F1) + v_p(F2))`.
    pub gcd_bound: ExactMargin,
    pub gcd_count: u64,
    /// `d_{M(r-1)}, d_{Mr}` for the coefficients of `F1, F2`.
    pub dims: (usize, usize),
    pub branch: Branch,
    /// The final gcd estimate, scaled by `M`. It is a theorem only on the
    /// gcd branch.
    pub final_bound: ExactMargin,
    pub msmt: MsmtReport,
}

impl KeyInequalityReport {
    pub fn key_inequality_holds(&self) -> bool {
        self.point_margins.iter().all(KeyMargin::holds)
    }

    pub fn chain_holds(&self) -> bool {
        self.basis_decreasing && self.chain_exceptions == 0
    }

    /// Every inequality that is asserted on this instance holds.
    pub fn all_asserted_hold(&self) -> bool {
        self.key_inequality_holds()
            && self.reduction_chain
            && self.basis_decreasing
            && self.main_term.holds()
            && self.phi_height.holds()
            && self.gcd_bound.holds()
            && (self.branch == Branch::Relation || self.final_bound.holds())
            && (!self.msmt.nondegenerate || self.msmt.margin.as_ref().is_none_or(ExactMargin::holds))
    }
}

fn check_units<S: Scalar>(g: &UnitTuple<S>, s: &PlaceSet<S>) -> Result<()> {
    for x in g.entries() {
        if !is_s_unit(x, s) {
            return Err(Error::Hypothesis(format!("{x} is not an S-unit for S = {{{s}}}")));
        }
    }
    Ok(())
}

fn monomial_values<S: Scalar>(g: &UnitTuple<S>, deg: u32) -> Vec<RationalFunction<S>> {
    Monomial::up_to_degree(g.len(), deg).iter().map(|i| i.eval(g.entries())).collect()
}

/// Builds the forms at every place of `S` and evaluates the key
/// inequality together with the chain of estimates leading to the gcd
/// bound.
pub fn key_inequality_check<S: Scalar>(
    ib: &IdealBasis<S>,
    g: &UnitTuple<S>,
    s: &PlaceSet<S>,
) -> Result<KeyInequalityReport> {
    check_units(g, s)?;
    let params = ib.params;
    let RefinementParams { n, m, r, ideal_dim: big_m, quotient_dim: big_m_prime, .. } = params;
    let points = s.points()?;
    let mut systems: Vec<(PointBasis<S>, LinearFormSystem<S>)> = Vec::new();
    for p in &points {
        let pb = build_point_basis(ib, g, p)?;
        let sys = build_linear_forms(ib, &pb)?;
        systems.push((pb, sys));
    }
    let phi_g: Vec<RationalFunction<S>> = ib.phis.iter().map(|f| f.eval(g.entries())).collect();
    if phi_g.iter().all(Zero::is_zero) {
        return Err(Error::ZeroInput("Φ(g)"));
    }
    let f1g = ib.f1.eval(g.entries());
    let f2g = ib.f2.eval(g.entries());

    let mut point_margins = Vec::new();
    let mut reduction_chain = true;
    let mut main_lhs = 0i64;
    let mut s_phi = 0i64;
    let mut s_f = 0i64;
    for (pb, sys) in &systems {
        let p = &pb.point;
        let weight = p.degree() as i64;
        let vf = ib.f1.gauss_valuation(p)? + ib.f2.gauss_valuation(p)?;
        s_f += weight * vf;
        s_phi += weight * min_valuation(&phi_g, p).expect("Φ(g) is nonzero");
        for (i, mono) in pb.complement.iter().enumerate() {
            let vg = pb.valuation_of(mono);
            main_lhs += weight * vg;
            let value = sys.evaluate(i, &phi_g);
            let vl = min_valuation(&sys.forms[i], p).expect("forms are nonzero");
            point_margins.push(KeyMargin {
                point: p.to_string(),
                monomial: mono.clone(),
                lhs: valuation(&value, p).finite().map(|v| v - vl),
                rhs: vg + vf,
            });
            for (j, c) in sys.reductions[i].iter().enumerate() {
                if !c.is_zero() && pb.valuation_of(&pb.basis[j]) < vg {
                    reduction_chain = false;
                }
            }
        }
    }
    let basis_decreasing = systems.iter().all(|(pb, _)| pb.basis_decreasing());
    let chain_exceptions = systems.iter().map(|(pb, _)| pb.chain_exceptions().len()).sum();

    let max_h = g.entries().iter().map(height).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
    let h_f = ib.f1.height()? + ib.f2.height()?;
    let h_phi = projective_height(&phi_g)?;
    let mn = (m * n) as u64;
    let main_term = ExactMargin::at_least(q(main_lhs), -q(big_m_prime as u64 * mn * max_h));
    let phi_height = ExactMargin::at_most(q(h_phi), q(mn * max_h + h_f));
    let gcd_count = gcd_counting(&f1g, &f2g, s, GcdMode::OutsideS)?;
    let outside_f = h_f as i64 + s_f;
    let gcd_bound = ExactMargin::at_most(q(gcd_count), q(-(h_phi as i64) - s_phi + outside_f));

    let big_m_q = q(big_m as u64);
    let d_hi = ib.coefficients.dim(big_m * r)?;
    let d_lo = ib.coefficients.dim(big_m * (r - 1))?;
    let ratio = BigRational::new(BigInt::from(d_hi), BigInt::from(d_lo));
    let euler = FieldContext::default().euler_term(s.size());
    let c = &ratio * q((1 + big_m * (r + 1)) as u64);
    let c_prime = q((d_hi * d_hi * big_m) as u64) / q((2 * d_lo) as u64);
    let rhs = (q(big_m_prime as u64) + &ratio * &big_m_q - &big_m_q) * q(mn * max_h)
        + &c * &big_m_q * q(h_f)
        + &c_prime * &big_m_q * q(euler);
    let final_bound = ExactMargin::at_most(&big_m_q * q(gcd_count), rhs);
    let nondegenerate = ib.coefficients.nondegenerate(&monomial_values(g, m as u32), big_m * r + 1)?;
    let branch = if nondegenerate { Branch::GcdBound } else { Branch::Relation };

    let forms: Vec<Vec<RationalFunction<S>>> =
        systems.iter().flat_map(|(_, sys)| sys.forms.iter().cloned()).collect();
    let msmt = msmt_check(&forms, &phi_g, s, r, DEFAULT_PRODUCT_CAP)?;

    Ok(KeyInequalityReport {
        params,
        point_margins,
        basis_decreasing,
        chain_exceptions,
        reduction_chain,
        main_term,
        phi_height,
        gcd_bound,
        gcd_count,
        dims: (d_lo, d_hi),
        branch,
        final_bound,
        msmt,
    })
}

/// Zeros of `F(g)` inside `S` against the bound obtained from the
/// degree-`d` monomial embedding.
#[derive(Clone, Debug)]
pub struct SPartReport {
    /// `d_{r-1}, d_r` for the coefficients of `F`.
    pub dims: (usize, usize),
    /// `N = C(n+d, n) - 1`.
    pub embedding_dim: usize,
    /// Whether the monomials `g^i`, `|i| <= d`, are nondegenerate over
    /// `V_F(r)`. The bound is a theorem only when they are.
    pub nondegenerate: bool,
    pub bound: ExactMargin,
}

pub fn s_part_check<S: Scalar>(
    f: &MvPoly<S>,
    g: &UnitTuple<S>,
    s: &PlaceSet<S>,
    r: usize,
) -> Result<SPartReport> {
    let n = f.nvars();
    if g.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: g.len() });
    }
    if r == 0 {
        return Err(Error::Precondition("need r >= 1".into()));
    }
    if f.coeff(&Monomial::one(n)).is_zero() {
        return Err(Error::Precondition(format!("{f} vanishes at the origin")));
    }
    if !f.coefficients().any(num_traits::One::is_one) {
        return Err(Error::Precondition(format!("no coefficient of {f} equals 1")));
    }
    let d = f.degree() as usize;
    if d == 0 {
        return Err(Error::ConstantInput("s_part_check"));
    }
    check_units(g, s)?;
    let fg = f.eval(g.entries());
    if fg.is_zero() {
        return Err(Error::ZeroInput("F(g)"));
    }
    let table = LocalTable::new(std::slice::from_ref(&fg), s);
    let lhs: u64 = table
        .rows()
        .filter(|(_, _, in_s)| *in_s)
        .map(|(w, v, _)| w * v[0].zero_part().expect("nonzero") as u64)
        .sum();

    let coeffs: Vec<RationalFunction<S>> = f.coefficients().cloned().collect();
    let mut space = CoefficientSpace::new(&coeffs, DEFAULT_PRODUCT_CAP)?;
    space.extend_to(r)?;
    let d_hi = space.dim(r)?;
    let d_lo = space.dim(r - 1)?;
    let nondegenerate = space.nondegenerate(&monomial_values(g, d as u32), r)?;

    let big_n = binomial(n + d, n) - 1;
    let max_h = g.entries().iter().map(height).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
    let h_f = f.height()?;
    let euler = FieldContext::default().euler_term(s.size());
    let ratio = BigRational::new(BigInt::from(d_hi), BigInt::from(d_lo));
    let np1 = q((big_n + 1) as u64);
    let rhs = (&ratio - q(1)) * &np1 * q((d * n) as u64 * max_h)
        + &ratio * &np1 * q((r + 1) as u64) * q(h_f)
        + &ratio * &np1 * q((big_n * d_hi + d_hi) as i64 - 1) / q(2) * q(euler);
    Ok(SPartReport {
        dims: (d_lo, d_hi),
        embedding_dim: big_n,
        nondegenerate,
        bound: ExactMargin::at_most(q(lhs), rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::parse_rational_function;
    use crate::refinement::build_ideal_basis;
    use crate::QRatFunc;
    use num_rational::BigRational as Q;

    fn rf(s: &str) -> QRatFunc {
        parse_rational_function(s).unwrap()
    }

    fn units(s: &[&str]) -> UnitTuple<Q> {
        UnitTuple::new(s.iter().map(|x| rf(x)).collect()).unwrap()
    }

    fn pt(s: &str) -> ClosedPoint<Q> {
        ClosedPoint::finite(rf(s).numer().clone()).unwrap()
    }

    #[test]
    fn weil_examples() {
        let l = [rf("1"), rf("-1")];
        assert_eq!(weil_function(&l, &[rf("t"), rf("1")], &pt("t-1")).unwrap(), 1);
        assert_eq!(weil_function(&[rf("1"), rf("0")], &[rf("1"), rf("t")], &pt("t")).unwrap(), 0);
        assert_eq!(
            weil_function(&[rf("1"), rf("0")], &[rf("1"), rf("t")], &ClosedPoint::Infinity).unwrap(),
            1
        );
        assert!(weil_function(&l, &[rf("t"), rf("t")], &pt("t")).is_err());
        let scaled = [rf("t^2"), rf("-t^2")];
        let a = [rf("t/(t+3)"), rf("1/(t+3)")];
        assert_eq!(weil_function(&scaled, &a, &pt("t-1")).unwrap(), 1);
    }

    #[test]
    fn worked_instance_margins() {
        let ib = build_ideal_basis(&MvPoly::parse("x1-1", 2).unwrap(), &MvPoly::parse("x2-1", 2).unwrap(), 2, 1)
            .unwrap();
        let g = units(&["t", "t+1"]);
        let s = PlaceSet::parse("t, t+1, t-1, t+2, inf").unwrap();
        let rep = key_inequality_check(&ib, &g, &s).unwrap();
        assert_eq!(rep.point_margins.len(), 5 * 5);
        assert!(rep.key_inequality_holds());
        assert!(rep.chain_holds());
        assert!(rep.all_asserted_hold(), "{rep:?}");
        // F1(g) = t - 1 and F2(g) = t share no zero outside S
        assert_eq!(rep.gcd_count, 0);
    }

    #[test]
    fn relation_branch() {
        let ib = build_ideal_basis(&MvPoly::parse("x1-1", 2).unwrap(), &MvPoly::parse("x2-1", 2).unwrap(), 2, 1)
            .unwrap();
        let g = units(&["t", "t^2"]);
        let s = PlaceSet::parse("t, inf").unwrap();
        let rep = key_inequality_check(&ib, &g, &s).unwrap();
        assert_eq!(rep.branch, Branch::Relation);
        assert!(rep.key_inequality_holds());
    }

    #[test]
    fn s_part_examples() {
        let f = MvPoly::parse("x1+x2+1", 2).unwrap();
        let s = PlaceSet::parse("t, t+1, inf").unwrap();
        let rep = s_part_check(&f, &units(&["t", "t+1"]), &s, 1).unwrap();
        assert!(!rep.nondegenerate);
        assert_eq!(rep.bound.lhs, q(1));
        assert!(rep.bound.holds());
        assert_eq!(rep.dims, (1, 1));
        let rep = s_part_check(&f, &units(&["t", "t^3"]), &PlaceSet::parse("t, inf").unwrap(), 2).unwrap();
        assert!(rep.nondegenerate);
        assert!(rep.bound.holds());
        let degenerate = s_part_check(&f, &units(&["t", "t"]), &PlaceSet::parse("t, inf").unwrap(), 1).unwrap();
        assert!(!degenerate.nondegenerate);
        assert!(s_part_check(&MvPoly::parse("x1+x2", 2).unwrap(), &units(&["t", "t"]), &s, 1).is_err());
    }
}
