//! Linear forms adapted to a pair of polynomials at each place.
//!
//! For coprime `F1, F2` of degree `d` and a truncation degree `m`, the
//! shifts `x^i F_j` span a subspace of the polynomials of degree at most
//! `m`. At every place a monomial basis of the quotient is chosen greedily
//! by valuation, and the remaining monomials are reduced modulo the shifts
//! through explicit linear forms whose coefficients are minors of a matrix
//! built from the coefficients of `F1` and `F2`.

mod checks;
mod space;

pub use checks::*;
pub use space::*;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ffcore::valuation;
use crate::divlattice::UnitTuple;
use crate::linalg::{Echelon, Matrix};
use crate::mvpoly::{is_coprime, Monomial, MvPoly};
use crate::place::ClosedPoint;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Size limits guarding the growth of the constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefinementCaps {
    pub max_m: usize,
    pub max_n: usize,
    pub max_r: usize,
    pub product_cap: usize,
}

impl Default for RefinementCaps {
    fn default() -> Self {
        RefinementCaps { max_m: 8, max_n: 3, max_r: 3, product_cap: DEFAULT_PRODUCT_CAP }
    }
}

/// Degrees and dimensions of one construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefinementParams {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub r: usize,
    /// Dimension of the span of the shifts.
    pub ideal_dim: usize,
    /// Dimension of the quotient.
    pub quotient_dim: usize,
}

impl RefinementParams {
    pub fn new(n: usize, d: usize, m: usize, r: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::Precondition("need n >= 1 and d >= 1".into()));
        }
        if m < 2 * d {
            return Err(Error::Precondition(format!("truncation degree {m} is below 2d = {}", 2 * d)));
        }
        if r == 0 {
            return Err(Error::Precondition("need r >= 1".into()));
        }
        let ideal_dim = 2 * binomial(m + n - d, n) - binomial(m + n - 2 * d, n);
        let quotient_dim = binomial(m + n, n) - ideal_dim;
        Ok(RefinementParams { n, d, m, r, ideal_dim, quotient_dim })
    }
}

fn homogeneous_top<S: Scalar>(f: &MvPoly<S>) -> MvPoly<S> {
    let d = f.degree();
    MvPoly::from_terms(
        f.nvars(),
        f.terms().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// The shifts `x^i F_j` kept as a basis of their span, together with the
/// coordinates used for all later linear algebra.
#[derive(Clone, Debug)]
pub struct IdealBasis<S: Scalar> {
    pub f1: MvPoly<S>,
    pub f2: MvPoly<S>,
    pub params: RefinementParams,
    /// `(i, j)` for each kept shift `x^i F_j`, `j ∈ {1, 2}`.
    pub shifts: Vec<(Monomial, u8)>,
    pub phis: Vec<MvPoly<S>>,
    /// Monomials of degree at most `m`, increasing.
    pub monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    span: Echelon<RationalFunction<S>>,
    /// Whether the top-degree forms of `F1` and `F2` are coprime. When
    /// they are, the shifts span every element of the ideal of degree at
    /// most `m`.
    pub leading_forms_coprime: bool,
    /// `V_{F1,F2}(r)` built up to level `M r + 1`.
    pub coefficients: CoefficientSpace<S>,
}

impl<S: Scalar> IdealBasis<S> {
    pub fn coordinates(&self, f: &MvPoly<S>) -> Vec<RationalFunction<S>> {
        let mut v = vec![RationalFunction::zero(); self.monomials.len()];
        for (m, c) in f.terms() {
            v[self.index[m]] = c.clone();
        }
        v
    }

    pub fn in_span(&self, f: &MvPoly<S>) -> bool {
        f.degree() as usize <= self.params.m && self.span.contains(&self.coordinates(f))
    }

    /// Dimension of `(span of x^i F_j with |i| <= m - d + extra)` cut down
    /// to degree at most `m`. It is a lower bound for the dimension of the
    /// truncated ideal and equals the shift-span dimension when no element
    /// of the ideal drops degree.
    pub fn truncated_ideal_dimension(&self, extra: usize) -> usize {
        let RefinementParams { n, d, m, .. } = self.params;
        let top = m + extra;
        let mut cols = Monomial::up_to_degree(n, top as u32);
        cols.reverse();
        let high = cols.iter().filter(|c| c.degree() as usize > m).count();
        let index: BTreeMap<&Monomial, usize> = cols.iter().enumerate().map(|(k, c)| (c, k)).collect();
        let mut echelon = Echelon::new(cols.len());
        for i in Monomial::up_to_degree(n, (top - d) as u32) {
            for f in [&self.f1, &self.f2] {
                let shifted = f.mul_monomial(&i);
                let mut v = vec![RationalFunction::zero(); cols.len()];
                for (mono, c) in shifted.terms() {
                    v[index[mono]] = c.clone();
                }
                echelon.insert(&v);
            }
        }
        echelon.pivots().filter(|&p| p >= high).count()
    }
}

/// Builds a basis of the span of the shifts, keeping the first independent
/// ones in graded order of `(i, j)`, and checks that its dimension matches
/// the closed formula.
pub fn build_ideal_basis<S: Scalar>(
    f1: &MvPoly<S>,
    f2: &MvPoly<S>,
    m: usize,
    r: usize,
) -> Result<IdealBasis<S>> {
    build_ideal_basis_with(f1, f2, m, r, RefinementCaps::default())
}

pub fn build_ideal_basis_with<S: Scalar>(
    f1: &MvPoly<S>,
    f2: &MvPoly<S>,
    m: usize,
    r: usize,
    caps: RefinementCaps,
) -> Result<IdealBasis<S>> {
    if f1.nvars() != f2.nvars() {
        return Err(Error::ArityMismatch { expected: f1.nvars(), got: f2.nvars() });
    }
    let n = f1.nvars();
    if f1.degree() != f2.degree() {
        return Err(Error::Precondition(format!(
            "degrees differ: {} and {}",
            f1.degree(),
            f2.degree()
        )));
    }
    let d = f1.degree() as usize;
    if m > caps.max_m || n > caps.max_n || r > caps.max_r {
        return Err(Error::CapExceeded {
            what: "refinement size (m, n, r)",
            needed: m.max(n).max(r),
            cap: caps.max_m.min(caps.max_n).min(caps.max_r),
        });
    }
    let params = RefinementParams::new(n, d, m, r)?;
    for f in [f1, f2] {
        if !f.coefficients().any(One::is_one) {
            return Err(Error::Precondition(format!("no coefficient of {f} equals 1")));
        }
    }
    if !is_coprime(f1, f2) {
        return Err(Error::Precondition("F1 and F2 are not coprime".into()));
    }
    let monomials = Monomial::up_to_degree(n, m as u32);
    let index: BTreeMap<Monomial, usize> =
        monomials.iter().cloned().enumerate().map(|(k, c)| (c, k)).collect();
    let coeffs: Vec<RationalFunction<S>> =
        f1.coefficients().chain(f2.coefficients()).cloned().collect();
    let mut coefficients = CoefficientSpace::new(&coeffs, caps.product_cap)?;
    coefficients.extend_to((params.ideal_dim * r + 1).max(params.ideal_dim))?;
    let mut basis = IdealBasis {
        f1: f1.clone(),
        f2: f2.clone(),
        params,
        shifts: Vec::new(),
        phis: Vec::new(),
        monomials,
        index,
        span: Echelon::new(binomial(m + n, n)),
        leading_forms_coprime: is_coprime(&homogeneous_top(f1), &homogeneous_top(f2)),
        coefficients,
    };
    for i in Monomial::up_to_degree(n, (m - d) as u32) {
        for (j, f) in [(1u8, f1), (2u8, f2)] {
            let phi = f.mul_monomial(&i);
            let v = basis.coordinates(&phi);
            if basis.span.insert(&v) {
                basis.shifts.push((i.clone(), j));
                basis.phis.push(phi);
            }
        }
    }
    if basis.phis.len() != params.ideal_dim {
        return Err(Error::DimensionMismatch {
            formula: params.ideal_dim,
            computed: basis.phis.len(),
        });
    }
    Ok(basis)
}

/// Monomial basis of the quotient at one place, chosen greedily by
/// decreasing valuation of `g^i` with graded-lex-least tie-breaking.
#[derive(Clone, Debug)]
pub struct PointBasis<S: Scalar> {
    pub point: ClosedPoint<S>,
    /// Basis monomials in selection order.
    pub basis: Vec<Monomial>,
    /// The remaining monomials, increasing.
    pub complement: Vec<Monomial>,
    pub valuations: BTreeMap<Monomial, i64>,
}

impl<S: Scalar> PointBasis<S> {
    pub fn valuation_of(&self, i: &Monomial) -> i64 {
        self.valuations[i]
    }

    /// Whether the basis valuations are non-increasing in selection order.
    pub fn basis_decreasing(&self) -> bool {
        self.basis
            .windows(2)
            .all(|w| self.valuations[&w[0]] >= self.valuations[&w[1]])
    }

    /// Complement monomials whose valuation exceeds that of the last basis
    /// monomial. Such monomials were passed over because they already
    /// reduce to earlier choices, so the chain across the whole complement
    /// can fail even though the construction is sound.
    pub fn chain_exceptions(&self) -> Vec<Monomial> {
        let Some(last) = self.basis.last() else { return Vec::new() };
        let floor = self.valuations[last];
        self.complement.iter().filter(|i| self.valuations[*i] > floor).cloned().collect()
    }

    pub fn chain_holds(&self) -> bool {
        self.basis_decreasing() && self.chain_exceptions().is_empty()
    }
}

pub fn build_point_basis<S: Scalar>(
    ib: &IdealBasis<S>,
    g: &UnitTuple<S>,
    p: &ClosedPoint<S>,
) -> Result<PointBasis<S>> {
    let n = ib.params.n;
    if g.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: g.len() });
    }
    let gv: Vec<i64> = g
        .entries()
        .iter()
        .map(|x| valuation(x, p).finite().ok_or(Error::ZeroInput("build_point_basis")))
        .collect::<Result<_>>()?;
    let valuations: BTreeMap<Monomial, i64> = ib
        .monomials
        .iter()
        .map(|i| (i.clone(), i.0.iter().zip(&gv).map(|(&e, v)| i64::from(e) * v).sum()))
        .collect();
    let mut order: Vec<&Monomial> = ib.monomials.iter().collect();
    order.sort_by(|a, b| valuations[*b].cmp(&valuations[*a]).then_with(|| a.cmp(b)));
    let mut echelon = ib.span.clone();
    let mut basis = Vec::new();
    for i in order {
        if basis.len() == ib.params.quotient_dim {
            break;
        }
        let mut unit = vec![RationalFunction::zero(); ib.monomials.len()];
        unit[ib.index[i]] = RationalFunction::one();
        if echelon.insert(&unit) {
            basis.push(i.clone());
        }
    }
    if echelon.rank() != ib.monomials.len() {
        return Err(Error::Invariant(format!(
            "quotient basis at {p} has {} elements, expected {}",
            basis.len(),
            ib.params.quotient_dim
        )));
    }
    let complement = ib.monomials.iter().filter(|i| !basis.contains(i)).cloned().collect();
    Ok(PointBasis { point: p.clone(), basis, complement, valuations })
}

/// The forms `L_{p,i} = Σ_ℓ b[i][ℓ] y_ℓ` at one place.
#[derive(Clone, Debug)]
pub struct LinearFormSystem<S: Scalar> {
    pub point: ClosedPoint<S>,
    /// `alpha[ℓ][s]`: coefficient of the `s`-th complement monomial in `φ_ℓ`.
    pub alpha: Matrix<RationalFunction<S>>,
    /// `alpha_basis[ℓ][j]`: coefficient of the `j`-th basis monomial in `φ_ℓ`.
    pub alpha_basis: Matrix<RationalFunction<S>>,
    /// `det(alpha)`.
    pub normalizer: RationalFunction<S>,
    /// The adjugate of `alpha`; row `i` holds the coefficients of `L_{p,i}`.
    pub forms: Matrix<RationalFunction<S>>,
    /// `reductions[i][j] = c_{p,i,j}`.
    pub reductions: Matrix<RationalFunction<S>>,
}

impl<S: Scalar> LinearFormSystem<S> {
    pub fn evaluate(&self, i: usize, y: &[RationalFunction<S>]) -> RationalFunction<S> {
        self.forms[i]
            .iter()
            .zip(y)
            .fold(RationalFunction::zero(), |acc, (b, v)| &acc + &(b * v))
    }
}

/// Determinant and adjugate by fraction-free Gauss-Jordan elimination.
fn det_adjugate<S: Scalar>(a: &Matrix<Poly<S>>) -> Option<(Poly<S>, Matrix<Poly<S>>)> {
    let n = a.len();
    let mut w: Matrix<Poly<S>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }));
            r
        })
        .collect();
    let mut prev = Poly::one();
    let mut negate = false;
    for k in 0..n {
        let piv = (k..n).find(|&i| !w[i][k].is_zero())?;
        if piv != k {
            w.swap(piv, k);
            negate = !negate;
        }
        let pivot_row = w[k].clone();
        for (i, row) in w.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let lead = row[k].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                let num = &(&pivot_row[k] * x) - &(&lead * y);
                *x = num.div_exact(&prev).expect("fraction-free elimination divides exactly");
            }
        }
        prev = pivot_row[k].clone();
    }
    let det = if negate { -&prev } else { prev };
    let adj = w
        .into_iter()
        .map(|row| row[n..].iter().map(|x| if negate { -x } else { x.clone() }).collect())
        .collect();
    Some((det, adj))
}

pub fn build_linear_forms<S: Scalar>(
    ib: &IdealBasis<S>,
    pb: &PointBasis<S>,
) -> Result<LinearFormSystem<S>> {
    let big_m = ib.params.ideal_dim;
    let coords: Vec<Vec<RationalFunction<S>>> = ib.phis.iter().map(|f| ib.coordinates(f)).collect();
    let pick = |cols: &[Monomial]| -> Matrix<RationalFunction<S>> {
        coords
            .iter()
            .map(|row| cols.iter().map(|c| row[ib.index[c]].clone()).collect())
            .collect()
    };
    let alpha = pick(&pb.complement);
    let alpha_basis = pick(&pb.basis);

    // Clear denominators row by row; with alpha' = diag(D) alpha the
    // adjugate of alpha is adj(alpha') diag(D) / prod(D).
    let row_dens: Vec<Poly<S>> = alpha
        .iter()
        .map(|row| row.iter().fold(Poly::one(), |acc, x| lcm(&acc, x.denom())))
        .collect();
    let cleared: Matrix<Poly<S>> = alpha
        .iter()
        .zip(&row_dens)
        .map(|(row, dl)| {
            row.iter()
                .map(|x| x.numer() * &dl.div_exact(x.denom()).expect("lcm"))
                .collect()
        })
        .collect();
    let (det, adj) = det_adjugate(&cleared).ok_or(Error::Singular("alpha matrix"))?;
    if det.is_zero() {
        return Err(Error::Singular("alpha matrix"));
    }
    let prod_den = RationalFunction::from_poly(row_dens.iter().fold(Poly::one(), |a, b| &a * b));
    let normalizer = &RationalFunction::from_poly(det) / &prod_den;
    let forms: Matrix<RationalFunction<S>> = adj
        .iter()
        .map(|row| {
            row.iter()
                .zip(&row_dens)
                .map(|(x, dl)| &RationalFunction::from_poly(x * dl) / &prod_den)
                .collect()
        })
        .collect();

    for (i, form) in forms.iter().enumerate() {
        for s in 0..big_m {
            let sum = form
                .iter()
                .zip(&alpha)
                .fold(RationalFunction::zero(), |acc, (b, row)| &acc + &(b * &row[s]));
            let expected = if i == s { normalizer.clone() } else { RationalFunction::zero() };
            if sum != expected {
                return Err(Error::Invariant(format!(
                    "forms times alpha differ from the normalizer at ({i}, {s})"
                )));
            }
        }
    }
    let reductions: Matrix<RationalFunction<S>> = forms
        .iter()
        .map(|form| {
            (0..pb.basis.len())
                .map(|j| {
                    let sum = form
                        .iter()
                        .zip(&alpha_basis)
                        .fold(RationalFunction::zero(), |acc, (b, row)| &acc + &(b * &row[j]));
                    &sum / &normalizer
                })
                .collect()
        })
        .collect();

    let n = ib.params.n;
    for (i, form) in forms.iter().enumerate() {
        let lhs = form
            .iter()
            .zip(&ib.phis)
            .fold(MvPoly::zero(n), |acc, (b, phi)| &acc + &phi.scale(b));
        let mut target = MvPoly::term(pb.complement[i].clone(), RationalFunction::one());
        for (j, c) in reductions[i].iter().enumerate() {
            target = &target + &MvPoly::term(pb.basis[j].clone(), c.clone());
        }
        if !ib.in_span(&target) {
            return Err(Error::Invariant(format!(
                "reduction of {} is not in the ideal span",
                pb.complement[i]
                    .display_with(&crate::mvpoly::default_names(n))
            )));
        }
        if lhs != target.scale(&normalizer) {
            return Err(Error::Invariant(format!("identity for form {i} at {} fails", pb.point)));
        }
        let level = big_m - 1;
        for b in form {
            if !ib.coefficients.contains(b, level)? {
                return Err(Error::Invariant(format!(
                    "form coefficient {b} is not in V_(F1,F2)({level})"
                )));
            }
        }
    }
    Ok(LinearFormSystem { point: pb.point.clone(), alpha, alpha_basis, normalizer, forms, reductions })
}
