//! Exponential polynomials `n ↦ Σ B_i(n) β_i^n` over `K` and the
//! recovery of `b = R · a^d` when `b(n)` is a `d`-th power often enough.
//!
//! Roots of elements of `K` are never computed. A factorization records
//! `γ1^d = β` and `γ2^d = u^i` as formal radicals, and every identity is
//! checked after raising to the `d`-th power, inside `K`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::divlattice::{hermite_form, is_multiplicatively_independent_mod_k, UnitTuple};
use crate::error::{Error, Result};
use crate::ffcore::{is_dth_power, parse_rational_function};
use crate::linalg::inverse;
use crate::mvpoly::{dth_power_free_decompose, is_coprime, mv_gcd, Monomial, MvPoly};
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

pub const DEFAULT_WITNESS_CAP: u64 = 200;
pub const DEFAULT_CHECK_RANGE: i64 = 10;

/// `Σ B_i(T) β_i^T` with distinct nonzero `β_i` and nonzero `B_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpPoly<S: Scalar> {
    terms: Vec<(MvPoly<S>, RationalFunction<S>)>,
}

impl<S: Scalar> ExpPoly<S> {
    /// Merges terms with equal bases and drops zero coefficients.
    pub fn new(terms: Vec<(MvPoly<S>, RationalFunction<S>)>) -> Result<Self> {
        let mut merged: Vec<(MvPoly<S>, RationalFunction<S>)> = Vec::new();
        for (b, beta) in terms {
            if b.nvars() != 1 {
                return Err(Error::ArityMismatch { expected: 1, got: b.nvars() });
            }
            if beta.is_zero() {
                return Err(Error::ZeroInput("exponential base"));
            }
            match merged.iter_mut().find(|(_, x)| *x == beta) {
                Some((acc, _)) => *acc = &*acc + &b,
                None => merged.push((b, beta)),
            }
        }
        merged.retain(|(b, _)| !b.is_zero());
        Ok(ExpPoly { terms: merged })
    }

    /// Parses `(B_1 ; beta_1) + (B_2 ; beta_2) ...`, where `B_i` is a
    /// polynomial in `T` and `beta_i` an element of `K`. Pairs may be
    /// separated by `+`, `,` or whitespace.
    pub fn parse(src: &str) -> Result<Self> {
        let names = vec!["T".to_string()];
        let mut terms = Vec::new();
        let bytes = src.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let c = bytes[pos] as char;
            if c.is_whitespace() || c == '+' || c == ',' {
                pos += 1;
                continue;
            }
            if c != '(' {
                return Err(Error::Parse { pos, msg: format!("expected '(' but found '{c}'") });
            }
            let start = pos + 1;
            let mut depth = 1;
            let mut semi = None;
            pos += 1;
            while pos < bytes.len() && depth > 0 {
                match bytes[pos] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    b';' if depth == 1 => semi = Some(pos),
                    _ => {}
                }
                pos += 1;
            }
            if depth > 0 {
                return Err(Error::Parse { pos: start - 1, msg: "unclosed '('".into() });
            }
            let Some(semi) = semi else {
                return Err(Error::Parse { pos: start, msg: "expected ';' inside a term".into() });
            };
            let shift = |e: Error, base: usize| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + base, msg },
                other => other,
            };
            let b = MvPoly::parse_with(&src[start..semi], &names).map_err(|e| shift(e, start))?;
            let beta = parse_rational_function(&src[semi + 1..pos - 1]).map_err(|e| shift(e, semi + 1))?;
            terms.push((b, beta));
        }
        Self::new(terms)
    }

    /// Builds `m ↦ f(m, u_1^m, ..., u_n^m)` from a polynomial in
    /// `x0, x1, ..., xn`.
    pub fn from_model(f: &MvPoly<S>, units: &[RationalFunction<S>]) -> Result<Self> {
        if f.nvars() != units.len() + 1 {
            return Err(Error::ArityMismatch { expected: units.len() + 1, got: f.nvars() });
        }
        let mut grouped: BTreeMap<Vec<u32>, MvPoly<S>> = BTreeMap::new();
        for (m, c) in f.terms() {
            let entry = grouped.entry(m.0[1..].to_vec()).or_insert_with(|| MvPoly::zero(1));
            *entry = &*entry + &MvPoly::term(Monomial(vec![m.0[0]]), c.clone());
        }
        let terms = grouped
            .into_iter()
            .map(|(e, b)| {
                let beta = Monomial(e).eval(units);
                (b, beta)
            })
            .collect();
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(MvPoly<S>, RationalFunction<S>)] {
        &self.terms
    }

    pub fn bases(&self) -> Vec<RationalFunction<S>> {
        self.terms.iter().map(|(_, b)| b.clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, n: u64) -> RationalFunction<S> {
        let x = [RationalFunction::from_i64(n as i64)];
        self.terms.iter().fold(RationalFunction::zero(), |acc, (b, beta)| {
            &acc + &(&b.eval(&x) * &beta.powi(n as i64))
        })
    }

    /// `c · b` for a constant `c`.
    pub fn scale(&self, c: &RationalFunction<S>) -> Result<Self> {
        Self::new(self.terms.iter().map(|(b, beta)| (b.scale(c), beta.clone())).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.terms.iter().chain(&other.terms).cloned().collect())
    }
}

impl<S: Scalar> fmt::Display for ExpPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("(0 ; 1)");
        }
        let names = vec!["T".to_string()];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, beta)| format!("({} ; {})", b.display_with(&names), beta))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A basis `u` of the group generated by the bases `β_i`, with
/// `β_i = u^{expressions[i]}`.
#[derive(Clone, Debug)]
pub struct GammaBasis<S: Scalar> {
    pub units: Vec<RationalFunction<S>>,
    pub expressions: Vec<Vec<i64>>,
}

/// Computes a basis of `Γ = <β_1, ..., β_l>` from a Hermite form of the
/// exponent matrix. Fails when `Γ` contains a constant other than 1.
pub fn gamma_basis<S: Scalar>(b: &ExpPoly<S>) -> Result<GammaBasis<S>> {
    let betas = b.bases();
    if betas.is_empty() {
        return Ok(GammaBasis { units: Vec::new(), expressions: Vec::new() });
    }
    let tuple = UnitTuple::new(betas.clone())?;
    let (_, u, rank) = hermite_form(&tuple.exponent_matrix());
    for row in &u[rank..] {
        let c = tuple.power_product(row);
        if !c.is_one() {
            return Err(Error::Hypothesis(format!(
                "Γ meets the constants nontrivially: the product with exponents {row:?} is {c}"
            )));
        }
    }
    let units: Vec<RationalFunction<S>> = u[..rank].iter().map(|row| tuple.power_product(row)).collect();
    let uq: Vec<Vec<BigRational>> = u
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let v = inverse(&uq).ok_or(Error::Singular("unimodular transform"))?;
    let expressions: Vec<Vec<i64>> = v
        .iter()
        .map(|row| {
            row[..rank]
                .iter()
                .map(|x| x.to_integer().to_i64().expect("small exponent"))
                .collect()
        })
        .collect();
    for (beta, e) in betas.iter().zip(&expressions) {
        if &power_product(&units, e) != beta {
            return Err(Error::Invariant(format!("basis expression of {beta} does not reproduce it")));
        }
    }
    if !units.is_empty() && !is_multiplicatively_independent_mod_k(&UnitTuple::new(units.clone())?) {
        return Err(Error::Invariant("Γ basis is not independent modulo constants".into()));
    }
    Ok(GammaBasis { units, expressions })
}

fn power_product<S: Scalar>(units: &[RationalFunction<S>], e: &[i64]) -> RationalFunction<S> {
    units
        .iter()
        .zip(e)
        .fold(RationalFunction::one(), |acc, (u, &k)| &acc * &u.powi(k))
}

/// `b(m) = f(m, u_1^m, ..., u_n^m) · (u_1 ⋯ u_n)^{-h d m}` with `f` a
/// polynomial in `x0, x1, ..., xn`.
#[derive(Clone, Debug)]
pub struct LaurentModel<S: Scalar> {
    pub basis: GammaBasis<S>,
    pub d: u32,
    pub twist: u32,
    pub f: MvPoly<S>,
}

impl<S: Scalar> LaurentModel<S> {
    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    /// Evaluates the model at `m`, undoing the twist.
    pub fn reconstruct(&self, m: u64) -> RationalFunction<S> {
        let mut point = vec![RationalFunction::from_i64(m as i64)];
        point.extend(self.basis.units.iter().map(|u| u.powi(m as i64)));
        let shift = -(i64::from(self.twist) * i64::from(self.d) * m as i64);
        let all = self.basis.units.iter().fold(RationalFunction::one(), |acc, u| &acc * u);
        &self.f.eval(&point) * &all.powi(shift)
    }
}

pub fn laurent_model<S: Scalar>(b: &ExpPoly<S>, d: u32) -> Result<LaurentModel<S>> {
    if d == 0 {
        return Err(Error::Precondition("d must be positive".into()));
    }
    let basis = gamma_basis(b)?;
    let n = basis.units.len();
    let lowest = basis.expressions.iter().flatten().copied().min().unwrap_or(0).min(0);
    let twist = num_integer::Integer::div_ceil(&(-lowest), &i64::from(d)) as u32;
    let lift = i64::from(twist * d);
    let mut f = MvPoly::zero(n + 1);
    for ((coef, _), e) in b.terms().iter().zip(&basis.expressions) {
        let mut exps: Vec<u32> = Vec::with_capacity(n);
        for &k in e {
            exps.push((k + lift) as u32);
        }
        for (m, c) in coef.terms() {
            let mut full = vec![m.0[0]];
            full.extend(&exps);
            f = &f + &MvPoly::term(Monomial(full), c.clone());
        }
    }
    let model = LaurentModel { basis, d, twist, f };
    for m in 0..=DEFAULT_CHECK_RANGE as u64 {
        if model.reconstruct(m) != b.eval(m) {
            return Err(Error::Invariant(format!("model does not reproduce b({m})")));
        }
    }
    Ok(model)
}

/// The `m` in `range` with `b(m)` a `d`-th power. Zero counts as a power.
pub fn dth_power_density<S: Scalar>(
    b: &ExpPoly<S>,
    d: u32,
    range: std::ops::RangeInclusive<u64>,
) -> Result<Vec<u64>> {
    if d < 2 {
        return Err(Error::Precondition(format!("d = {d} must be at least 2")));
    }
    Ok(range.filter(|&m| is_dth_power(&b.eval(m), d)).collect())
}

/// Witness count the constancy criterion needs to exceed at genus zero,
/// for a polynomial of degree `n >= 2`: `4n·max{g-1, 0} + 11n - 3`.
pub fn buchi_threshold(n: usize, genus: u64) -> u64 {
    let n = n.max(2) as u64;
    4 * n * genus.saturating_sub(1) + 11 * n - 3
}

/// `b(m) = R(m) · a(m)^d` with
/// `a(m) = γ1 γ2^m Q1(m) G(m, u_1^m, ..., u_n^m)`, `γ1^d = β` and
/// `γ2^d = u^radical_exponent`.
#[derive(Clone, Debug)]
pub struct PisotFactorization<S: Scalar> {
    pub d: u32,
    pub model: LaurentModel<S>,
    /// `R` over the constants, monic.
    pub r: Poly<S>,
    /// Monic, in `x0` only.
    pub q1: MvPoly<S>,
    /// In `x0, x1, ..., xn`.
    pub g: MvPoly<S>,
    /// `γ1^d`.
    pub beta: RationalFunction<S>,
    /// Monomial `x^i` split off `f`.
    pub monomial: Vec<u32>,
    /// `γ2^d = u^{i - h d (1, ..., 1)}`.
    pub radical_exponent: Vec<i64>,
    pub witnesses: usize,
    pub threshold: u64,
}

impl<S: Scalar> PisotFactorization<S> {
    /// `a(m)^d`, an element of `K`.
    pub fn a_power(&self, m: u64) -> RationalFunction<S> {
        let x0 = RationalFunction::from_i64(m as i64);
        let mut point = vec![x0.clone()];
        point.extend(self.model.basis.units.iter().map(|u| u.powi(m as i64)));
        let gamma2 = power_product(&self.model.basis.units, &self.radical_exponent).powi(m as i64);
        let base = &self.q1.eval(&point) * &self.g.eval(&point);
        &(&self.beta * &gamma2) * &base.powi(i64::from(self.d))
    }

    pub fn r_at(&self, m: u64) -> RationalFunction<S> {
        RationalFunction::constant(self.r.eval(&S::from_i64(m as i64)))
    }
}

fn x0_part<S: Scalar>(f: &MvPoly<S>) -> Poly<S> {
    let coeffs: Vec<S> = (0..=f.degree())
        .map(|k| {
            let mut m = vec![0; f.nvars()];
            m[0] = k;
            let c = f.coeff(&Monomial(m));
            c.as_constant().unwrap_or_else(S::zero)
        })
        .collect();
    Poly::new(coeffs)
}

/// The gcd over `K[x0]` of the coefficients of `f` as a polynomial in
/// `x1, ..., xn`, made monic.
fn content_in_x<S: Scalar>(f: &MvPoly<S>) -> MvPoly<S> {
    let n = f.nvars();
    let mut groups: BTreeMap<Vec<u32>, MvPoly<S>> = BTreeMap::new();
    for (m, c) in f.terms() {
        let mut only_x0 = vec![0; n];
        only_x0[0] = m.0[0];
        let entry = groups.entry(m.0[1..].to_vec()).or_insert_with(|| MvPoly::zero(n));
        *entry = &*entry + &MvPoly::term(Monomial(only_x0), c.clone());
    }
    groups
        .values()
        .fold(MvPoly::zero(n), |acc, c| if acc.is_zero() { c.monic() } else { mv_gcd(&acc, c) })
}

/// Recovers `R` and `a` with `b = R · a^d`.
pub fn pisot_factor<S: Scalar>(b: &ExpPoly<S>, d: u32) -> Result<PisotFactorization<S>> {
    pisot_factor_with(b, d, DEFAULT_WITNESS_CAP)
}

pub fn pisot_factor_with<S: Scalar>(b: &ExpPoly<S>, d: u32, witness_cap: u64) -> Result<PisotFactorization<S>> {
    if d < 2 {
        return Err(Error::Precondition(format!("d = {d} must be at least 2")));
    }
    if b.is_zero() {
        return Err(Error::ZeroInput("pisot_factor"));
    }
    let model = laurent_model(b, d)?;
    let f = &model.f;
    let n = model.basis.units.len();

    let content = content_in_x(f);
    let primitive = f.div_exact(&content).expect("content divides");
    let split = dth_power_free_decompose(&primitive, d)?;
    if split.has_non_power_part() {
        return Err(Error::Hypothesis(format!(
            "hypothesis pattern violated: non-d-th-power factor survives: {}",
            split.remainder
        )));
    }
    let beta = split.constant.clone();
    let monomial = split.monomial.0[1..].to_vec();

    // Q = β Q0 Q1^d with Q0 d-th power free, both monic in x0.
    let (mut q0, mut q1) = (MvPoly::one(n + 1), MvPoly::one(n + 1));
    if !content.is_constant() {
        let qs = dth_power_free_decompose(&content, d)?;
        let e = qs.monomial.0[0];
        q0 = (&qs.remainder * &MvPoly::var(n + 1, 0).pow(e % d)).monic();
        q1 = (&qs.root * &MvPoly::var(n + 1, 0).pow(e / d)).monic();
    }

    let witnesses = dth_power_density(b, d, 0..=witness_cap)?.len();
    let threshold = buchi_threshold(q0.degree() as usize, 0);
    if (witnesses as u64) <= threshold {
        return Err(Error::Hypothesis(format!(
            "insufficient d-th-power witnesses: {witnesses} in 0..={witness_cap}, need more than {threshold}"
        )));
    }
    if q0.coefficients().any(|c| !c.is_constant()) {
        return Err(Error::Hypothesis(format!(
            "R = {q0} has non-constant coefficients although {witnesses} witnesses exceed {threshold}"
        )));
    }
    let lift = i64::from(model.twist * d);
    let radical_exponent = monomial.iter().map(|&e| i64::from(e) - lift).collect();
    let out = PisotFactorization {
        d,
        r: x0_part(&q0),
        q1,
        g: split.root.clone(),
        beta,
        monomial,
        radical_exponent,
        witnesses,
        threshold,
        model,
    };
    for m in 0..=DEFAULT_CHECK_RANGE as u64 {
        let expected = &out.r_at(m) * &out.a_power(m);
        if expected != b.eval(m) {
            return Err(Error::Invariant(format!("factorization does not reproduce b({m})")));
        }
    }
    Ok(out)
}

/// The sampled `m` at which `P1(m, •)` and `P2(m, •)` share a factor.
pub fn coprime_specialization_guard<S: Scalar>(
    p1: &MvPoly<S>,
    p2: &MvPoly<S>,
    samples: &[i64],
) -> Result<Vec<i64>> {
    if p1.nvars() != p2.nvars() {
        return Err(Error::ArityMismatch { expected: p1.nvars(), got: p2.nvars() });
    }
    if !is_coprime(p1, p2) {
        return Err(Error::Precondition(format!("{p1} and {p2} are not coprime")));
    }
    Ok(samples
        .iter()
        .copied()
        .filter(|&m| {
            let x0 = RationalFunction::from_i64(m);
            !is_coprime(&p1.substitute(0, &x0), &p2.substitute(0, &x0))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QExpPoly, QMvPoly, QRatFunc};

    fn rf(s: &str) -> QRatFunc {
        parse_rational_function(s).unwrap()
    }

    fn exp(s: &str) -> QExpPoly {
        ExpPoly::parse(s).unwrap()
    }

    #[test]
    fn evaluation() {
        let b = exp("(T+t ; t^2)");
        assert_eq!(b.eval(3), rf("(3+t)*t^6"));
        assert!(exp("(0 ; t) + (T-T ; t+1)").is_zero());
        let c = exp("(T ; t) (1 ; 2)");
        let sum = b.add(&c).unwrap();
        for m in 0..5 {
            assert_eq!(sum.eval(m), &b.eval(m) + &c.eval(m));
        }
        assert_eq!(exp(&b.to_string()), b);
        assert!(ExpPoly::<BigRational>::parse("(T ; t").is_err());
        assert!(ExpPoly::<BigRational>::parse("(T , t)").is_err());
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_basis(&exp("(1 ; t^2) + (T ; t^3)")).unwrap();
        assert_eq!(g.units, vec![rf("t")]);
        assert_eq!(g.expressions, vec![vec![2], vec![3]]);
        let g = gamma_basis(&exp("(1 ; t) + (1 ; t+1)")).unwrap();
        assert_eq!(g.units.len(), 2);
        assert!(matches!(gamma_basis(&exp("(1 ; t) + (1 ; 2*t)")), Err(Error::Hypothesis(_))));
        assert!(matches!(gamma_basis(&exp("(1 ; -1)")), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn laurent_examples() {
        // Γ = <t^2>, so the basis element is t^2 itself
        let m = laurent_model(&exp("(T+t ; t^2)"), 2).unwrap();
        assert_eq!(m.basis.units, vec![rf("t^2")]);
        assert_eq!(m.twist, 0);
        assert_eq!(m.f, QMvPoly::parse("(x1+t)*x2", 2).unwrap());
        let m = laurent_model(&exp("(T+t ; t^2) + (1 ; t^3)"), 2).unwrap();
        assert_eq!(m.f, QMvPoly::parse("(x1+t)*x2^2 + x2^3", 2).unwrap());
        let m = laurent_model(&exp("(1 ; 1/t)"), 3).unwrap();
        assert_eq!(m.twist, 1);
        assert_eq!(m.f, QMvPoly::parse("x2^2", 2).unwrap());
        let m = laurent_model(&exp("(5 ; 1)"), 2).unwrap();
        assert_eq!(m.f, QMvPoly::parse("5", 1).unwrap());
    }

    #[test]
    fn density_examples() {
        let square = exp("(T^2+2*t*T+t^2 ; t^2)");
        assert_eq!(dth_power_density(&square, 2, 0..=20).unwrap().len(), 21);
        assert_eq!(dth_power_density(&exp("(1 ; t)"), 2, 0..=10).unwrap(), vec![0, 2, 4, 6, 8, 10]);
        assert_eq!(dth_power_density(&exp("(T ; t^2)"), 2, 0..=10).unwrap().len(), 11);
    }

    #[test]
    fn factor_examples() {
        let p = pisot_factor(&exp("(T^2+2*t*T+t^2 ; t^2)"), 2).unwrap();
        assert!(p.r.is_one());
        assert_eq!(p.q1, QMvPoly::parse("x1+t", 2).unwrap());
        assert!(p.g.is_one_poly());
        assert_eq!(p.model.basis.units, vec![rf("t^2")]);
        assert_eq!(p.radical_exponent, vec![1]);

        let p = pisot_factor(&exp("(T ; t^2)"), 2).unwrap();
        assert_eq!(p.r, Poly::from_i64s(&[0, 1]));
        assert_eq!(p.radical_exponent, vec![1]);

        let p = pisot_factor(&exp("(1 ; t)"), 2).unwrap();
        assert!(p.r.is_one());
        assert_eq!(p.radical_exponent, vec![1]);
        assert_eq!(p.witnesses, 101);
    }

    #[test]
    fn factor_failures() {
        assert!(matches!(pisot_factor(&exp("(T+t ; 1)"), 2), Err(Error::Hypothesis(_))));
        assert!(matches!(pisot_factor(&exp("(1 ; t) + (1 ; 1)"), 2), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn threshold_values() {
        assert_eq!(buchi_threshold(2, 0), 19);
        assert_eq!(buchi_threshold(1, 0), 19);
        assert_eq!(buchi_threshold(3, 0), 30);
    }

    #[test]
    fn specialization_guard() {
        let p1 = QMvPoly::parse("x2-x1", 2).unwrap();
        let samples: Vec<i64> = (0..20).collect();
        assert!(coprime_specialization_guard(&p1, &QMvPoly::parse("x2-t", 2).unwrap(), &samples)
            .unwrap()
            .is_empty());
        assert_eq!(
            coprime_specialization_guard(&p1, &QMvPoly::parse("x2-5", 2).unwrap(), &samples).unwrap(),
            vec![5]
        );
        assert!(coprime_specialization_guard(&p1, &p1, &samples).is_err());
    }
}
