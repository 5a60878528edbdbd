//! The derivation `d/dt`, local orders of derivatives, and the twisted
//! operator `D_u` on polynomials over `k(t)`.

use num_traits::{One, Zero};

use crate::divlattice::UnitTuple;
use crate::error::{Error, Result};
use crate::ffcore::{
    counting, gcd_counting, is_s_unit, projective_height, valuation, CountMode, FieldContext,
    GcdMode, Valuation,
};
use crate::mvpoly::MvPoly;
use crate::place::{ClosedPoint, PlaceSet};
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

/// Local data of the separating element `t`.
///
/// A finite place is cut out by its minimal polynomial `π`, which is a
/// uniformizer there, and `dπ/dt` does not vanish at the place because `π`
/// is separable; so `d_p t` is a unit. At infinity the uniformizer is
/// `1/t` and `dt/d(1/t) = -t^2` has order `-2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DerivationContext {
    pub field: FieldContext,
}

impl DerivationContext {
    /// `v_p(d_p t)`.
    pub fn order_of_dt<S: Scalar>(&self, p: &ClosedPoint<S>) -> i64 {
        match p {
            ClosedPoint::Finite(_) => 0,
            ClosedPoint::Infinity => -2,
        }
    }

    /// `Σ_p v_p^0(d_p t)`, which is at most `3g`.
    pub fn total_zero_order_of_dt(&self) -> u64 {
        0
    }
}

/// Derivative with respect to `t`.
pub fn derive<S: Scalar>(f: &RationalFunction<S>) -> RationalFunction<S> {
    f.derivative()
}

/// `v_p(f')` computed directly, with the two-case relation between
/// `v_p(f)` and `v_p(f')` asserted along the way.
pub fn local_valuation_of_derivative<S: Scalar>(
    f: &RationalFunction<S>,
    p: &ClosedPoint<S>,
) -> Result<Valuation> {
    if f.is_constant() {
        return Err(Error::ConstantInput("local_valuation_of_derivative"));
    }
    let ctx = DerivationContext::default();
    let v = valuation(f, p).finite().expect("nonconstant is nonzero");
    let dv = valuation(&derive(f), p);
    let dt = ctx.order_of_dt(p);
    let consistent = match (v, dv) {
        (0, Valuation::Infinite) => true,
        (0, Valuation::Finite(w)) => w >= -dt,
        (_, Valuation::Finite(w)) => w == v - 1 - dt,
        (_, Valuation::Infinite) => false,
    };
    if !consistent {
        return Err(Error::Invariant(format!(
            "order of the derivative of {f} at {p} is {dv}, but v = {v} and v(d_p t) = {dt}"
        )));
    }
    Ok(dv)
}

/// The twisted derivative `D_u(F) = Σ (a_i u^i)'/u^i x^i`.
///
/// The coefficient is evaluated as `a_i' + a_i Σ_j i_j u_j'/u_j`, which is
/// the same quantity without forming `u^i`.
pub fn d_u<S: Scalar>(f: &MvPoly<S>, u: &UnitTuple<S>) -> Result<MvPoly<S>> {
    if u.len() != f.nvars() {
        return Err(Error::ArityMismatch { expected: f.nvars(), got: u.len() });
    }
    let log_derivs: Vec<RationalFunction<S>> =
        u.entries().iter().map(|g| &derive(g) / g).collect();
    Ok(f.map_coeffs(|m, a| {
        let twist = m
            .0
            .iter()
            .zip(&log_derivs)
            .filter(|(&e, _)| e > 0)
            .fold(RationalFunction::zero(), |acc, (&e, l)| &acc + &l.scale(&S::from_i64(i64::from(e))));
        &derive(a) + &(a * &twist)
    }))
}

/// Both sides of an inequality `lhs <= rhs` or `lhs >= rhs`, evaluated
/// exactly, with `margin` oriented so that the inequality holds iff
/// `margin >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Margin {
    pub lhs: i64,
    pub rhs: i64,
    pub margin: i64,
}

impl Margin {
    pub fn at_most(lhs: i64, rhs: i64) -> Self {
        Margin { lhs, rhs, margin: rhs - lhs }
    }

    pub fn at_least(lhs: i64, rhs: i64) -> Self {
        Margin { lhs, rhs, margin: lhs - rhs }
    }

    pub fn holds(&self) -> bool {
        self.margin >= 0
    }
}

/// `N_{S,gcd}(η, η') >= N_S(η) - N̄_S(η) - 3g`.
pub fn lemma31_check<S: Scalar>(eta: &RationalFunction<S>, s: &PlaceSet<S>) -> Result<Margin> {
    if eta.is_constant() {
        return Err(Error::ConstantInput("lemma31_check"));
    }
    let genus = FieldContext::default().genus as i64;
    let lhs = gcd_counting(eta, &derive(eta), s, GcdMode::OutsideS)? as i64;
    let full = counting(eta, s, CountMode::Full)? as i64;
    let truncated = counting(eta, s, CountMode::Truncated)? as i64;
    Ok(Margin::at_least(lhs, full - truncated - 3 * genus))
}

/// `h(1, η_1'/η_1, ..., η_ℓ'/η_ℓ) <= |S| + 3g` for S-units `η_i`.
pub fn lemma31_units_check<S: Scalar>(etas: &[RationalFunction<S>], s: &PlaceSet<S>) -> Result<Margin> {
    if let Some(bad) = etas.iter().find(|e| !is_s_unit(e, s)) {
        return Err(Error::Hypothesis(format!("{bad} is not an S-unit for S = {{{s}}}")));
    }
    let genus = FieldContext::default().genus as i64;
    let mut coords = vec![RationalFunction::one()];
    coords.extend(etas.iter().map(|e| &derive(e) / e));
    let lhs = projective_height(&coords)? as i64;
    Ok(Margin::at_most(lhs, s.size() as i64 + 3 * genus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::parse_rational_function;
    use crate::{QMvPoly, QRatFunc};
    use num_rational::BigRational;

    fn rf(s: &str) -> QRatFunc {
        parse_rational_function(s).unwrap()
    }

    #[test]
    fn derive_examples() {
        assert_eq!(derive(&rf("t^3")), rf("3*t^2"));
        assert_eq!(derive(&rf("1/(t+1)")), rf("-1/(t+1)^2"));
        assert!(derive(&rf("17/5")).is_zero());
    }

    #[test]
    fn local_order_examples() {
        let t0 = ClosedPoint::rational(BigRational::zero());
        assert_eq!(local_valuation_of_derivative(&rf("t^3"), &t0).unwrap(), Valuation::Finite(2));
        assert_eq!(
            local_valuation_of_derivative(&rf("t^3"), &ClosedPoint::Infinity).unwrap(),
            Valuation::Finite(-2)
        );
        assert_eq!(local_valuation_of_derivative(&rf("t+1"), &t0).unwrap(), Valuation::Finite(0));
        assert!(local_valuation_of_derivative(&rf("4"), &t0).is_err());
        let quad = ClosedPoint::finite(rf("t^2+1").numer().clone()).unwrap();
        assert_eq!(
            local_valuation_of_derivative(&rf("(t^2+1)^3/t"), &quad).unwrap(),
            Valuation::Finite(2)
        );
    }

    #[test]
    fn d_u_examples() {
        let u = UnitTuple::new(vec![rf("t"), rf("t+1")]).unwrap();
        let f = QMvPoly::parse("x1^2+x2^2", 2).unwrap();
        let expected = QMvPoly::parse("(2/t)*x1^2+(2/(t+1))*x2^2", 2).unwrap();
        assert_eq!(d_u(&f, &u).unwrap(), expected);
        assert!(d_u(&QMvPoly::parse("5", 2).unwrap(), &u).unwrap().is_zero());
        let u1 = UnitTuple::new(vec![rf("t")]).unwrap();
        let x1 = QMvPoly::parse("x1", 1).unwrap();
        let du = d_u(&x1, &u1).unwrap();
        assert_eq!(du, QMvPoly::parse("(1/t)*x1", 1).unwrap());
        assert_eq!(du.eval(u1.entries()), derive(&x1.eval(u1.entries())));
        assert!(matches!(d_u(&f, &u1), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn lemma31_examples() {
        let m = lemma31_check(&rf("t^3"), &PlaceSet::empty()).unwrap();
        assert_eq!((m.lhs, m.rhs, m.margin), (2, 2, 0));
        let m = lemma31_check(&rf("t*(t-1)"), &PlaceSet::infinity_only()).unwrap();
        assert_eq!((m.lhs, m.rhs), (0, 0));
        let s = PlaceSet::parse("t, t+1, inf").unwrap();
        let m = lemma31_units_check(&[rf("t"), rf("t+1")], &s).unwrap();
        assert_eq!((m.lhs, m.rhs), (2, 3));
        assert!(lemma31_units_check(&[rf("t-5")], &s).is_err());
    }
}
