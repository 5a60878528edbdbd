//! Divisor exponent vectors and multiplicative dependence modulo constants.
//!
//! A finite family of functions is described by its exponents on a
//! coprime basis of squarefree blocks (plus the order at infinity). A
//! power product of the family is constant exactly when its exponent
//! vector vanishes, so relations are integer left-kernel vectors of the
//! exponent matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ffcore::coprime_blocks;
use crate::linalg::inverse;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;

/// Pairwise coprime monic squarefree polynomials such that every source
/// function is a constant times a power product of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeBasis<S: Scalar> {
    pub elements: Vec<Poly<S>>,
}

/// Refines the numerators and denominators of `fs` into a coprime basis.
///
/// Each input polynomial enters through its squarefree (Yun) components,
/// so all places inside one basis element share their multiplicity in
/// every input.
pub fn refine_coprime_basis<S: Scalar>(fs: &[RationalFunction<S>]) -> Result<CoprimeBasis<S>> {
    if fs.iter().any(Zero::is_zero) {
        return Err(Error::ZeroInput("refine_coprime_basis"));
    }
    let parts = fs.iter().flat_map(|f| {
        f.numer()
            .squarefree_decomposition()
            .into_iter()
            .chain(f.denom().squarefree_decomposition())
    });
    Ok(CoprimeBasis { elements: coprime_blocks(parts) })
}

impl<S: Scalar> CoprimeBasis<S> {
    /// Refines this basis further with more functions.
    pub fn extend(&self, fs: &[RationalFunction<S>]) -> Result<Self> {
        let mut all: Vec<RationalFunction<S>> =
            self.elements.iter().cloned().map(RationalFunction::from_poly).collect();
        all.extend_from_slice(fs);
        refine_coprime_basis(&all)
    }
}

/// `f = constant * Π basis_j^finite_j`, with the order at infinity kept as
/// an extra column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentVector<S: Scalar> {
    pub finite: Vec<i64>,
    pub infinity: i64,
    pub constant: S,
}

impl<S: Scalar> ExponentVector<S> {
    /// The finite exponents followed by the infinity column.
    pub fn full(&self) -> Vec<i64> {
        let mut v = self.finite.clone();
        v.push(self.infinity);
        v
    }
}

pub fn exponent_vector<S: Scalar>(
    f: &RationalFunction<S>,
    basis: &CoprimeBasis<S>,
) -> Result<ExponentVector<S>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("exponent_vector"));
    }
    let mut num = f.numer().clone();
    let mut den = f.denom().clone();
    let mut finite = Vec::with_capacity(basis.elements.len());
    for b in &basis.elements {
        let (up, rest_num) = num.split_power(b);
        let (down, rest_den) = den.split_power(b);
        num = rest_num;
        den = rest_den;
        finite.push(up as i64 - down as i64);
    }
    if !num.is_constant() || !den.is_constant() {
        let residual = RationalFunction::new(num, den.monic());
        return Err(Error::Unsupported { residual: residual.to_string() });
    }
    let constant = num.coeff(0) / den.coeff(0);
    let infinity = f.valuation_at_infinity().expect("nonzero");
    Ok(ExponentVector { finite, infinity, constant })
}

/// A tuple of nonzero functions with their exponent matrix over a shared
/// coprime basis.
#[derive(Clone, Debug)]
pub struct UnitTuple<S: Scalar> {
    entries: Vec<RationalFunction<S>>,
    basis: CoprimeBasis<S>,
    rows: Vec<ExponentVector<S>>,
}

impl<S: Scalar> UnitTuple<S> {
    pub fn new(entries: Vec<RationalFunction<S>>) -> Result<Self> {
        let basis = refine_coprime_basis(&entries)?;
        let rows = entries
            .iter()
            .map(|f| exponent_vector(f, &basis))
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitTuple { entries, basis, rows })
    }

    pub fn entries(&self) -> &[RationalFunction<S>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn basis(&self) -> &CoprimeBasis<S> {
        &self.basis
    }

    pub fn exponent_rows(&self) -> &[ExponentVector<S>] {
        &self.rows
    }

    /// Rows are entries, columns are basis elements followed by infinity.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.rows.iter().map(ExponentVector::full).collect()
    }

    /// `Π entries_i^{m_i}`.
    pub fn power_product(&self, m: &[i64]) -> RationalFunction<S> {
        self.entries
            .iter()
            .zip(m)
            .filter(|(_, &e)| e != 0)
            .fold(RationalFunction::one(), |acc, (g, &e)| &acc * &g.powi(e))
    }

    /// Entrywise `ℓ`-th powers.
    pub fn powers(&self, l: i64) -> Result<Self> {
        Self::new(self.entries.iter().map(|g| g.powi(l)).collect())
    }
}

/// A nontrivial power product of a tuple that is a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeRelation<S: Scalar> {
    pub exponents: Vec<i64>,
    pub l1_norm: u64,
    pub witness: S,
}

type IntMatrix = Vec<Vec<BigInt>>;

fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row) {
        *x -= q * s;
    }
}

/// Reduced row Hermite form by unimodular row operations.
///
/// Returns `(H, U, rank)` with `U * A = H`, the first `rank` rows of `H`
/// nonzero in echelon form with positive pivots and reduced entries above
/// each pivot, and the remaining rows zero. The rows of `U` past `rank`
/// are therefore a basis of the integer left kernel of `A`.
pub fn hermite_form(a: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, usize) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: IntMatrix = to_big(a)
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.extend((0..rows).map(|j| BigInt::from(i64::from(i == j))));
            r
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        loop {
            let best = (pivot_row..rows)
                .filter(|&i| !aug[i][c].is_zero())
                .min_by_key(|&i| aug[i][c].abs());
            let Some(best) = best else { break };
            aug.swap(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..rows {
                if aug[i][c].is_zero() {
                    continue;
                }
                let q = aug[i][c].div_floor(&aug[pivot_row][c]);
                row_axpy(&mut aug, i, pivot_row, &q);
                if !aug[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if aug[pivot_row][c].is_zero() {
            continue;
        }
        if aug[pivot_row][c].is_negative() {
            for x in aug[pivot_row].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..pivot_row {
            let q = aug[i][c].div_floor(&aug[pivot_row][c]);
            if !q.is_zero() {
                row_axpy(&mut aug, i, pivot_row, &q);
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    let small = |x: &BigInt| x.to_i64().expect("exponent fits in i64");
    let h = aug.iter().map(|r| r[..cols].iter().map(small).collect()).collect();
    let u = aug.iter().map(|r| r[cols..].iter().map(small).collect()).collect();
    (h, u, pivots.len())
}

/// Basis of the integer vectors `m` with `m * A = 0`.
pub fn integer_left_kernel(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (_, u, rank) = hermite_form(a);
    let kernel: Vec<Vec<i64>> = u[rank..].to_vec();
    if kernel.is_empty() {
        return kernel;
    }
    // Hermite-reduce the kernel basis itself so its vectors stay small.
    let (h, _, r) = hermite_form(&kernel);
    h[..r].to_vec()
}

pub fn is_multiplicatively_independent_mod_k<S: Scalar>(g: &UnitTuple<S>) -> bool {
    integer_left_kernel(&g.exponent_matrix()).is_empty()
}

fn l1(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).sum()
}

/// Canonical sign: first nonzero entry positive.
fn normalize_sign(v: &mut [i64]) {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Upper bounds on the coefficients `c` of lattice vectors `v = c * K`
/// with `|v|_1 <= bound`, read off the inverse of a nonsingular square
/// submatrix of the kernel basis `K`.
fn coefficient_box(kernel: &[Vec<i64>], bound: u64) -> Vec<i64> {
    let r = kernel.len();
    let n = kernel[0].len();
    let mut cols = Vec::new();
    let mut echelon = crate::linalg::Echelon::<BigRational>::new(r);
    for j in 0..n {
        let col: Vec<BigRational> = kernel.iter().map(|row| BigRational::from_i64(row[j])).collect();
        if echelon.insert(&col) {
            cols.push(j);
        }
        if cols.len() == r {
            break;
        }
    }
    let sub: Vec<Vec<BigRational>> = cols
        .iter()
        .map(|&j| kernel.iter().map(|row| BigRational::from_i64(row[j])).collect())
        .collect();
    // c * K restricted to `cols` is v_J = c * B with B[i][s] = K[i][cols[s]];
    // `sub` is B transposed, so c = v_J * B^{-1} uses inv(sub) transposed.
    let inv = inverse(&sub).expect("kernel basis has full rank");
    (0..r)
        .map(|i| {
            let worst = (0..r).map(|s| inv[i][s].abs()).max().expect("nonempty");
            (worst * BigRational::from_integer(BigInt::from(bound)))
                .floor()
                .to_integer()
                .to_i64()
                .unwrap_or(i64::MAX)
        })
        .collect()
}

fn for_each_in_box(bounds: &[i64], mut visit: impl FnMut(&[i64])) {
    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        visit(&c);
        let mut k = 0;
        loop {
            if k == c.len() {
                return;
            }
            if c[k] < bounds[k] {
                c[k] += 1;
                break;
            }
            c[k] = -bounds[k];
            k += 1;
        }
    }
}

/// Smallest relation `Π g_i^{m_i} ∈ k*` with `Σ|m_i| <= l1_bound`.
///
/// Candidates are integer combinations of a kernel basis of the exponent
/// matrix inside a box that provably contains every short kernel vector.
/// Among the shortest, the lexicographically least with a positive leading
/// entry is returned. The witness constant is recomputed from the entries.
pub fn find_relation<S: Scalar>(
    g: &UnitTuple<S>,
    l1_bound: u64,
) -> Result<Option<MultiplicativeRelation<S>>> {
    let kernel = integer_left_kernel(&g.exponent_matrix());
    if kernel.is_empty() || l1_bound == 0 {
        return Ok(None);
    }
    let bounds = coefficient_box(&kernel, l1_bound);
    let box_size: f64 = bounds.iter().map(|&b| (2 * b + 1) as f64).product();
    if box_size > 5.0e7 {
        return Err(Error::CapExceeded {
            what: "relation search box",
            needed: box_size as usize,
            cap: 50_000_000,
        });
    }
    let n = g.len();
    let mut best: Option<Vec<i64>> = None;
    for_each_in_box(&bounds, |c| {
        let mut v = vec![0i64; n];
        for (ci, row) in c.iter().zip(&kernel) {
            if *ci != 0 {
                for (x, k) in v.iter_mut().zip(row) {
                    *x += ci * k;
                }
            }
        }
        let norm = l1(&v);
        if norm == 0 || norm > l1_bound {
            return;
        }
        normalize_sign(&mut v);
        let better = match &best {
            None => true,
            Some(b) => (norm, &v) < (l1(b), b),
        };
        if better {
            best = Some(v);
        }
    });
    let Some(exponents) = best else { return Ok(None) };
    let product = g.power_product(&exponents);
    let witness = product.as_constant().ok_or_else(|| {
        Error::Invariant(format!("kernel vector {exponents:?} gives nonconstant {product}"))
    })?;
    Ok(Some(MultiplicativeRelation { l1_norm: l1(&exponents), exponents, witness }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::parse_rational_function;
    use crate::QRatFunc;

    fn rf(s: &str) -> QRatFunc {
        parse_rational_function(s).unwrap()
    }

    fn tuple(xs: &[&str]) -> UnitTuple<BigRational> {
        UnitTuple::new(xs.iter().map(|s| rf(s)).collect()).unwrap()
    }

    #[test]
    fn refine_examples() {
        let b = refine_coprime_basis(&[rf("t"), rf("t+1")]).unwrap();
        assert_eq!(b.elements.len(), 2);
        let b = refine_coprime_basis(&[rf("t^2*(t+1)"), rf("t*(t+1)^2")]).unwrap();
        assert_eq!(b.elements, vec![rf("t").numer().clone(), rf("t+1").numer().clone()]);
        let b = refine_coprime_basis(&[rf("t^2-1"), rf("t-1")]).unwrap();
        assert_eq!(b.elements, vec![rf("t-1").numer().clone(), rf("t+1").numer().clone()]);
        let again = b.extend(&[]).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn exponent_vector_examples() {
        let basis = refine_coprime_basis(&[rf("t"), rf("t+1")]).unwrap();
        let v = exponent_vector(&rf("3*t^2/(t+1)"), &basis).unwrap();
        assert_eq!(v.finite, vec![2, -1]);
        assert_eq!(v.infinity, -1);
        assert_eq!(v.constant, BigRational::from_i64(3));
        let v = exponent_vector(&rf("1"), &basis).unwrap();
        assert_eq!(v.finite, vec![0, 0]);
        assert_eq!(v.constant, BigRational::from_i64(1));
        match exponent_vector(&rf("t-2"), &basis) {
            Err(Error::Unsupported { residual }) => assert_eq!(residual, "t-2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn relation_examples() {
        let r = find_relation(&tuple(&["t", "2*t"]), 2).unwrap().unwrap();
        assert_eq!(r.exponents, vec![1, -1]);
        assert_eq!(r.witness, BigRational::from_ratio(1, 2));
        let r = find_relation(&tuple(&["t^2/(t+1)", "(t+1)^3/t^6"]), 4).unwrap().unwrap();
        assert_eq!(r.exponents, vec![3, 1]);
        assert_eq!(r.witness, BigRational::from_i64(1));
        assert_eq!(find_relation(&tuple(&["t", "t+1"]), 100).unwrap(), None);
        assert_eq!(find_relation(&tuple(&["t^2/(t+1)", "(t+1)^3/t^6"]), 3).unwrap(), None);
    }

    #[test]
    fn independence_examples() {
        assert!(is_multiplicatively_independent_mod_k(&tuple(&["t", "t+1"])));
        assert!(!is_multiplicatively_independent_mod_k(&tuple(&["t", "t^2"])));
        assert!(!is_multiplicatively_independent_mod_k(&tuple(&["t/(t+1)", "(t+1)/t"])));
    }

    #[test]
    fn hermite_form_is_unimodular_transform() {
        let a = vec![vec![2, -1, 0], vec![-6, 3, 0], vec![4, 1, -3]];
        let (h, u, rank) = hermite_form(&a);
        assert_eq!(rank, 2);
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| u[i][k] * a[k][j]).sum();
                assert_eq!(s, h[i][j]);
            }
        }
        assert!(h[2].iter().all(|&x| x == 0));
    }
}
