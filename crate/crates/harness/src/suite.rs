//! Serializable instances, the per-suite generators and the runner.

use ffgcd_core::ffcore::parse_rational_function;
use ffgcd_core::mvpoly::{certify_irreducible_mv, dth_power_free_decompose, FactoredForm};
use ffgcd_core::pisot::ExpPoly;
use ffgcd_core::refinement::RefinementCaps;
use ffgcd_core::{Error as CoreError, PlaceSet};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HResult, HarnessError};
use crate::gen::{
    coprime_pair, instance_rng, linear_place, mvpoly, nonconstant_ratfunc, nonzero_int,
    place_pool, poly_t, q, ratfunc, s_unit, small_rational, Coefficients, QMv, QPoly, QRf, Q,
};
use crate::report::Report;
use crate::spec::{parse_exact, InstanceSpec};
use crate::verdict::{Summary, Verdict};
use crate::verify::{self, GcdOptions, Lemma36Options, PisotModel};

/// Names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "gauss",
    "du",
    "divisor",
    "brownawell",
    "green",
    "lemma31",
    "prop33",
    "lemma36",
    "thm14",
    "thm15",
    "thm16",
    "thm17",
    "ailon-rudnick",
    "refinement",
    "dthpower",
    "relation",
    "pisot",
];

/// Generator resampling limit for degenerate draws.
const RETRIES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GcdTheorem {
    Thm15,
    Thm16,
    Thm17,
}

/// A generated instance. All inputs are stored in the text exchange
/// format, so every verdict can be recomputed from its serialized instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Gauss {
        nvars: usize,
        f: String,
        g: String,
    },
    Du {
        f: String,
        g: String,
        units: Vec<String>,
    },
    Divisor {
        f: String,
    },
    UnitEquation {
        terms: Vec<String>,
        places: String,
    },
    Green {
        a: Vec<String>,
        f: Vec<String>,
        ell: u64,
    },
    Lemma31 {
        eta: String,
        places: String,
    },
    Prop33 {
        f: String,
        units: Vec<String>,
        places: String,
    },
    Lemma36 {
        factors: Vec<(String, u32)>,
        units: Vec<String>,
        places: String,
        d: u32,
        eps: String,
    },
    Thm14 {
        f: String,
        units: Vec<String>,
        d: u32,
        ell: u64,
    },
    Gcd {
        theorem: GcdTheorem,
        f: String,
        g: String,
        units: Vec<String>,
        places: String,
        ell: Option<u64>,
        eps: String,
        m: Option<usize>,
        r: usize,
        min_height: u64,
        min_ell: u64,
        product_cap: usize,
    },
    Refinement {
        f1: String,
        f2: String,
        units: Vec<String>,
        places: String,
        m: usize,
        r: usize,
    },
    DthPower {
        constant: String,
        factors: Vec<(String, i64)>,
        d: u32,
    },
    Relation {
        entries: Vec<String>,
        bound: u64,
    },
    Pisot {
        b: String,
        d: u32,
        witness_cap: u64,
        /// The constructed `R` and `A` with the units `A` is evaluated at.
        r: Option<String>,
        a: Option<String>,
        units: Vec<String>,
    },
}

fn rf(s: &str) -> HResult<QRf> {
    Ok(parse_rational_function(s)?)
}

fn rfs(xs: &[String]) -> HResult<Vec<QRf>> {
    xs.iter().map(|x| rf(x)).collect()
}

fn mv(s: &str, nvars: usize) -> HResult<QMv> {
    Ok(QMv::parse(s, nvars)?)
}

fn units_of(xs: &[String]) -> HResult<ffgcd_core::QUnitTuple> {
    Ok(ffgcd_core::QUnitTuple::new(rfs(xs)?)?)
}

fn places(s: &str) -> HResult<PlaceSet<Q>> {
    Ok(PlaceSet::parse(s)?)
}

fn poly(s: &str) -> HResult<QPoly> {
    let f = rf(s)?;
    if !f.is_polynomial() {
        return Err(HarnessError::Invalid(format!("{s} is not a polynomial")));
    }
    Ok(f.numer().clone())
}

fn strings(fs: &[QRf]) -> Vec<String> {
    fs.iter().map(ToString::to_string).collect()
}

impl Instance {
    pub fn evaluate(&self) -> HResult<Verdict> {
        match self {
            Instance::Gauss { nvars, f, g } => verify::verify_gauss(&mv(f, *nvars)?, &mv(g, *nvars)?),
            Instance::Du { f, g, units } => {
                let n = units.len();
                verify::verify_du(&mv(f, n)?, &mv(g, n)?, &units_of(units)?)
            }
            Instance::Divisor { f } => verify::verify_divisor_degree(&rf(f)?),
            Instance::UnitEquation { terms, places: s } => verify::verify_brownawell_masser(&rfs(terms)?, &places(s)?),
            Instance::Green { a, f, ell } => verify::verify_green(&rfs(a)?, &rfs(f)?, *ell),
            Instance::Lemma31 { eta, places: s } => verify::verify_lemma31(&rf(eta)?, &places(s)?),
            Instance::Prop33 { f, units, places: s } => {
                verify::verify_prop33(&mv(f, units.len())?, &units_of(units)?, &places(s)?)
            }
            Instance::Lemma36 { factors, units, places: s, d, eps } => {
                let n = units.len();
                let factors = factors.iter().map(|(p, e)| Ok((mv(p, n)?, *e))).collect::<HResult<Vec<_>>>()?;
                let opts = Lemma36Options { eps: parse_exact(eps)?, ..Lemma36Options::default() };
                verify::verify_lemma36(&FactoredForm::from_factors(factors)?, &units_of(units)?, &places(s)?, *d, &opts)
            }
            Instance::Thm14 { f, units, d, ell } => verify::verify_thm14(&mv(f, units.len())?, &units_of(units)?, *d, *ell),
            Instance::Gcd { theorem, f, g, units, places: s, ell, eps, m, r, min_height, min_ell, product_cap } => {
                let n = units.len();
                let (f, g, u, s) = (mv(f, n)?, mv(g, n)?, units_of(units)?, places(s)?);
                let opts = GcdOptions {
                    eps: parse_exact(eps)?,
                    m: *m,
                    r: *r,
                    min_height: *min_height,
                    min_ell: *min_ell,
                    product_cap: *product_cap,
                    refine: false,
                };
                match theorem {
                    GcdTheorem::Thm15 => verify::verify_thm15(&f, &g, &u, &s, &opts),
                    GcdTheorem::Thm16 => verify::verify_thm16(&f, &g, &u, &s, &opts),
                    GcdTheorem::Thm17 => {
                        let ell = ell.ok_or_else(|| HarnessError::Invalid("thm17 needs ℓ".into()))?;
                        verify::verify_thm17(&f, &g, &u, &s, ell, &opts)
                    }
                }
            }
            Instance::Refinement { f1, f2, units, places: s, m, r } => {
                let n = units.len();
                verify::verify_refinement(
                    &mv(f1, n)?,
                    &mv(f2, n)?,
                    &units_of(units)?,
                    &places(s)?,
                    *m,
                    *r,
                    RefinementCaps::default(),
                )
            }
            Instance::DthPower { constant, factors, d } => {
                let c = parse_exact(constant)?;
                let factors = factors.iter().map(|(p, e)| Ok((poly(p)?, *e))).collect::<HResult<Vec<_>>>()?;
                verify::verify_dth_power(&c, &factors, *d)
            }
            Instance::Relation { entries, bound } => verify::verify_relation(&rfs(entries)?, *bound),
            Instance::Pisot { b, d, witness_cap, r, a, units } => {
                let b = ExpPoly::parse(b)?;
                let us = rfs(units)?;
                match (r, a) {
                    (Some(r), Some(a)) => {
                        let (r, a) = (poly(r)?, mv(a, us.len() + 1)?);
                        let model = PisotModel { r: &r, a: &a, units: &us };
                        verify::verify_pisot(&b, *d, *witness_cap, Some(model))
                    }
                    _ => verify::verify_pisot(&b, *d, *witness_cap, None),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// Generators

/// A few linear places, the units supported on them and `S` = those
/// places plus infinity.
fn unit_setup(rng: &mut impl Rng, n: usize, height_cap: i64) -> (Vec<QRf>, PlaceSet<Q>) {
    let (count, quadratic) = (rng.gen_range(1..=3), rng.gen_bool(0.2));
    let pool = place_pool(rng, count, quadratic);
    let units = (0..n).map(|_| s_unit(rng, &pool, height_cap, true)).collect();
    (units, pool_places(&pool))
}

fn pool_places(pool: &[QPoly]) -> PlaceSet<Q> {
    let mut s = PlaceSet::infinity_only();
    for p in pool {
        s.add_block(p);
    }
    s
}

fn degree(rng: &mut impl Rng, spec: &InstanceSpec) -> u32 {
    rng.gen_range(1..=spec.degree_cap)
}

fn retry<T>(mut attempt: impl FnMut() -> Option<T>) -> HResult<T> {
    (0..RETRIES)
        .find_map(|_| attempt())
        .ok_or_else(|| HarnessError::Invalid(format!("generator retry cap of {RETRIES} reached")))
}

fn gen_unit_equation(rng: &mut impl Rng, spec: &InstanceSpec) -> HResult<Instance> {
    let n = rng.gen_range(2..=spec.n.clamp(2, 5));
    retry(|| {
        let count = rng.gen_range(1..=3);
        let pool = place_pool(rng, count, false);
        let mut terms: Vec<QRf> = (0..n - 1)
            .map(|_| if rng.gen_bool(0.6) { s_unit(rng, &pool, spec.height_cap, false) } else { ratfunc(rng, 2) })
            .collect();
        if n >= 3 && rng.gen_bool(0.15) {
            terms[1] = -terms[0].clone();
        }
        let last = terms.iter().fold(QRf::one(), |acc, f| &acc - f);
        if last.is_zero() || terms.iter().any(QRf::is_zero) {
            return None;
        }
        terms.push(last);
        let s = PlaceSet::support_of(&terms, true);
        Some(Instance::UnitEquation { terms: strings(&terms), places: s.to_string() })
    })
}

fn gen_green(rng: &mut impl Rng, spec: &InstanceSpec) -> HResult<Instance> {
    let n = rng.gen_range(2..=spec.n.clamp(2, 4));
    let ell = rng.gen_range(spec.ell_min..=spec.ell_max);
    retry(|| {
        let (a_head, f): (Vec<QRf>, Vec<QRf>) = if rng.gen_bool(0.5) {
            let base = nonconstant_ratfunc(rng, 2);
            let f = (0..n).map(|_| base.scale(&q(nonzero_int(rng, 3)))).collect();
            ((0..n - 1).map(|_| QRf::from_i64(nonzero_int(rng, 4))).collect(), f)
        } else {
            let f = (0..n).map(|_| ratfunc(rng, 2)).collect();
            ((0..n - 1).map(|_| QRf::constant(small_rational(rng))).collect(), f)
        };
        let pow = |x: &QRf| x.powi(ell as i64);
        let head: QRf = a_head.iter().zip(&f).fold(QRf::zero(), |acc, (a, x)| &acc + &(a * &pow(x)));
        let last = -(&head / &pow(&f[n - 1]));
        if last.is_zero() {
            return None;
        }
        let mut a = a_head;
        a.push(last);
        Some(Instance::Green { a: strings(&a), f: strings(&f), ell })
    })
}

fn gen_lemma31(rng: &mut impl Rng) -> Instance {
    let (count, quadratic) = (rng.gen_range(1..=4), rng.gen_bool(0.3));
    let pool = place_pool(rng, count, quadratic);
    let eta = loop {
        let eta = &s_unit(rng, &pool, 4, false) * &ratfunc(rng, 2);
        if !eta.is_constant() {
            break eta;
        }
    };
    let mut s = if rng.gen_bool(0.5) { PlaceSet::infinity_only() } else { PlaceSet::empty() };
    for p in pool.iter().filter(|_| rng.gen_bool(0.5)) {
        s.add_block(p);
    }
    Instance::Lemma31 { eta: eta.to_string(), places: s.to_string() }
}

fn gen_lemma36(rng: &mut impl Rng, spec: &InstanceSpec) -> HResult<Instance> {
    let n = spec.n;
    let d = spec.d.max(2);
    let (units, s) = unit_setup(rng, n, spec.height_cap);
    let count = rng.gen_range(1..=2);
    retry(|| {
        let mut factors: Vec<(QMv, u32)> = Vec::new();
        for _ in 0..count {
            let deg = rng.gen_range(1..=spec.degree_cap.min(2));
            let body = mvpoly(rng, n, deg, 0.6, Coefficients::Linear);
            let body = QMv::from_terms(n, body.terms().filter(|(m, _)| !m.is_one()).map(|(m, c)| (m.clone(), c.clone())));
            let root = QRf::from_poly(poly_t(rng, 1, 3));
            let c0 = &root.powi(i64::from(d)) - &body.eval(&units);
            let factor = &body + &QMv::constant(n, c0);
            if factor.is_monomial() || certify_irreducible_mv(&factor).is_err() {
                return None;
            }
            factors.push((factor, rng.gen_range(1..d)));
        }
        FactoredForm::from_factors(factors.clone()).ok()?;
        Some(Instance::Lemma36 {
            factors: factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
            units: strings(&units),
            places: s.to_string(),
            d,
            eps: spec.eps.clone(),
        })
    })
}

fn gen_thm14(rng: &mut impl Rng, spec: &InstanceSpec) -> HResult<Instance> {
    let d = spec.d.max(2);
    let pool = place_pool(rng, 2, false);
    let u1 = s_unit(rng, &pool, spec.height_cap, true);
    if rng.gen_bool(0.5) {
        // F(u^ℓ) is a constant times u1^ℓ, a d-th power when d divides ℓ.
        let c = q(nonzero_int(rng, 3));
        let a = nonzero_int(rng, 3);
        let u2 = u1.scale(&c);
        let steps = (spec.ell_max / u64::from(d)).max(1);
        let ell = u64::from(d) * rng.gen_range(1..=steps);
        let f = QMv::parse(&format!("x1 + {a}*x2"), 2).expect("valid literal");
        Ok(Instance::Thm14 { f: f.to_string(), units: strings(&[u1, u2]), d, ell })
    } else {
        let u2 = s_unit(rng, &pool, spec.height_cap, true);
        let f = retry(|| {
            let deg = degree(rng, spec);
            let f = &mvpoly(rng, 2, deg, 0.7, Coefficients::Constant) + &QMv::one(2);
            let split = dth_power_free_decompose(&f, d).ok()?;
            (!f.is_monomial() && split.has_non_power_part()).then_some(f)
        })?;
        let ell = rng.gen_range(spec.ell_min..=spec.ell_max);
        Ok(Instance::Thm14 { f: f.to_string(), units: strings(&[u1, u2]), d, ell })
    }
}

fn gen_gcd(rng: &mut impl Rng, spec: &InstanceSpec, theorem: GcdTheorem) -> HResult<Instance> {
    let (n, kind) = match theorem {
        GcdTheorem::Thm16 => (2, Coefficients::Constant),
        _ => (spec.n, Coefficients::Linear),
    };
    let (df, dg) = (degree(rng, spec), degree(rng, spec));
    let (f, g) = coprime_pair(rng, n, df, dg, kind, false, RETRIES)
        .ok_or_else(|| HarnessError::Invalid("no coprime pair within the retry cap".into()))?;
    let (units, s) = unit_setup(rng, n, spec.height_cap);
    let ell = (theorem == GcdTheorem::Thm17).then(|| rng.gen_range(spec.ell_min..=spec.ell_max));
    Ok(gcd_instance(theorem, &f, &g, &units, &s, ell, spec))
}

fn gcd_instance(
    theorem: GcdTheorem,
    f: &QMv,
    g: &QMv,
    units: &[QRf],
    s: &PlaceSet<Q>,
    ell: Option<u64>,
    spec: &InstanceSpec,
) -> Instance {
    Instance::Gcd {
        theorem,
        f: f.to_string(),
        g: g.to_string(),
        units: strings(units),
        places: s.to_string(),
        ell,
        eps: spec.eps.clone(),
        m: spec.m,
        r: spec.r,
        min_height: spec.min_height,
        min_ell: spec.min_ell,
        product_cap: spec.product_cap,
    }
}

fn gen_ailon_rudnick(index: u64, spec: &InstanceSpec) -> HResult<Instance> {
    let f = mv("x1-1", 2)?;
    let g = mv("x2-1", 2)?;
    let units = [rf("t")?, rf("t+1")?];
    let s = places("t, t+1, inf")?;
    Ok(gcd_instance(GcdTheorem::Thm17, &f, &g, &units, &s, Some(spec.ell_min + index), spec))
}

fn gen_refinement(rng: &mut impl Rng, spec: &InstanceSpec) -> HResult<Instance> {
    let d = rng.gen_range(1..=spec.degree_cap.min(2));
    let m = spec.m.unwrap_or_else(|| rng.gen_range(2 * d as usize..=(2 * d as usize + 2).min(6)));
    let r = rng.gen_range(1..=spec.r.min(2));
    let (f1, f2) = coprime_pair(rng, 2, d, d, Coefficients::Linear, true, RETRIES)
        .ok_or_else(|| HarnessError::Invalid("no coprime pair within the retry cap".into()))?;
    let count = rng.gen_range(1..=2);
    let pool = place_pool(rng, count, false);
    let units: Vec<QRf> = (0..2).map(|_| s_unit(rng, &pool, spec.height_cap.min(2), true)).collect();
    Ok(Instance::Refinement {
        f1: f1.to_string(),
        f2: f2.to_string(),
        units: strings(&units),
        places: pool_places(&pool).to_string(),
        m,
        r,
    })
}

/// Monic irreducible polynomials of degree at most four over the
/// rationals, of known shape.
fn irreducible(rng: &mut impl Rng) -> QPoly {
    let primes = [2i64, 3, 5, 7];
    let p = *primes.choose(rng).expect("nonempty");
    let b = rng.gen_range(-3..=3);
    let t = QPoly::var();
    let shift = |f: QPoly| -> QPoly {
        // f(t - b)
        let lin = &t - &QPoly::constant(q(b));
        f.coeffs().iter().rev().fold(QPoly::zero(), |acc, c| &(&acc * &lin) + &QPoly::constant(c.clone()))
    };
    match rng.gen_range(0..5) {
        0 => linear_place(b),
        // t^2 + p has no real root.
        1 => shift(QPoly::new(vec![q(p), q(0), q(1)])),
        // (t - b)^2 - p with p prime.
        2 => shift(QPoly::new(vec![q(-p), q(0), q(1)])),
        // Eisenstein at p.
        3 => shift(QPoly::new(vec![q(-p), q(0), q(0), q(1)])),
        _ => shift(QPoly::new(vec![q(-p), q(0), q(0), q(0), q(1)])),
    }
}

fn gen_dth_power(rng: &mut impl Rng) -> Instance {
    let d = rng.gen_range(2..=4u32);
    let count = rng.gen_range(1..=3);
    let mut factors: Vec<(QPoly, i64)> = Vec::new();
    while factors.len() < count {
        let p = irreducible(rng);
        if factors.iter().any(|(x, _)| *x == p) {
            continue;
        }
        let e = if rng.gen_bool(0.5) {
            i64::from(d) * nonzero_int(rng, 2)
        } else {
            nonzero_int(rng, 6)
        };
        factors.push((p, e));
    }
    Instance::DthPower {
        constant: small_rational(rng).to_string(),
        factors: factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
        d,
    }
}

fn gen_relation(rng: &mut impl Rng) -> Instance {
    let size = rng.gen_range(2..=3);
    let count = rng.gen_range(1..=3);
    let pool = place_pool(rng, count, false);
    let mut entries: Vec<QRf> = (0..size).map(|_| s_unit(rng, &pool, 3, false)).collect();
    if rng.gen_bool(0.4) {
        // Force a short relation through the last entry.
        let c = QRf::from_i64(nonzero_int(rng, 3));
        let last = entries[..size - 1]
            .iter()
            .fold(c, |acc, g| &acc * &g.powi(rng.gen_range(-2..=2)));
        entries[size - 1] = last;
    }
    Instance::Relation { entries: strings(&entries), bound: 6 }
}

fn gen_pisot(rng: &mut impl Rng, spec: &InstanceSpec) -> HResult<Instance> {
    let d = rng.gen_range(2..=3u32);
    let n = rng.gen_range(1..=2usize);
    let mut roots: Vec<i64> = (-3..=3).collect();
    roots.shuffle(rng);
    let units: Vec<QRf> = roots[..n].iter().map(|&a| QRf::from_poly(linear_place(a))).collect();
    let x0 = QMv::var(n + 1, 0);
    let mut r_mv = QMv::one(n + 1);
    let mut r_poly = QPoly::one();
    for &a in &roots[n..n + rng.gen_range(0..=2)] {
        let e = rng.gen_range(0..d);
        r_mv = &r_mv * &(&x0 - &QMv::constant(n + 1, QRf::from_i64(a))).pow(e);
        r_poly = &r_poly * &linear_place(a).pow(e);
    }
    let kind = if rng.gen_bool(0.5) { Coefficients::Constant } else { Coefficients::Linear };
    let deg = rng.gen_range(1..=spec.degree_cap.min(2));
    let a = mvpoly(rng, n + 1, deg, 0.6, kind);
    let model = &r_mv * &a.pow(d);
    let b = ExpPoly::from_model(&model, &units)?;
    Ok(Instance::Pisot {
        b: b.to_string(),
        d,
        witness_cap: spec.witness_cap,
        r: Some(r_poly.to_string()),
        a: Some(a.to_string()),
        units: strings(&units),
    })
}

/// The instance with the given index of the suite named in `spec`.
pub fn generate(spec: &InstanceSpec, index: u64) -> HResult<Instance> {
    let rng = &mut instance_rng(spec.seed, index);
    Ok(match spec.suite.as_str() {
        "gauss" => {
            let n = spec.n;
            let deg_f = degree(rng, spec);
            let f = mvpoly(rng, n, deg_f, 0.6, Coefficients::Rational);
            let deg_g = degree(rng, spec);
            let g = mvpoly(rng, n, deg_g, 0.6, Coefficients::Rational);
            Instance::Gauss { nvars: n, f: f.to_string(), g: g.to_string() }
        }
        "du" => {
            let (units, _) = unit_setup(rng, spec.n, spec.height_cap);
            let deg_f = degree(rng, spec);
            let f = mvpoly(rng, spec.n, deg_f, 0.6, Coefficients::Linear);
            let deg_g = degree(rng, spec);
            let g = mvpoly(rng, spec.n, deg_g, 0.6, Coefficients::Rational);
            Instance::Du { f: f.to_string(), g: g.to_string(), units: strings(&units) }
        }
        "divisor" => Instance::Divisor { f: ratfunc(rng, spec.degree_cap as usize + 2).to_string() },
        "brownawell" => gen_unit_equation(rng, spec)?,
        "green" => gen_green(rng, spec)?,
        "lemma31" => gen_lemma31(rng),
        "prop33" => {
            let (units, s) = unit_setup(rng, spec.n, spec.height_cap);
            let kind = if rng.gen_bool(0.3) { Coefficients::Constant } else { Coefficients::Linear };
            let deg_f = degree(rng, spec);
            let f = mvpoly(rng, spec.n, deg_f, 0.6, kind);
            Instance::Prop33 { f: f.to_string(), units: strings(&units), places: s.to_string() }
        }
        "lemma36" => gen_lemma36(rng, spec)?,
        "thm14" => gen_thm14(rng, spec)?,
        "thm15" => gen_gcd(rng, spec, GcdTheorem::Thm15)?,
        "thm16" => gen_gcd(rng, spec, GcdTheorem::Thm16)?,
        "thm17" => gen_gcd(rng, spec, GcdTheorem::Thm17)?,
        "ailon-rudnick" => gen_ailon_rudnick(index, spec)?,
        "refinement" => gen_refinement(rng, spec)?,
        "dthpower" => gen_dth_power(rng),
        "relation" => gen_relation(rng),
        "pisot" => gen_pisot(rng, spec)?,
        other => return Err(HarnessError::UnknownSuite(other.to_string())),
    })
}

/// Verdict for an instance whose evaluation raised an error. Resource caps
/// and unsupported inputs leave the instance unasserted; anything else is
/// reported as a finding so that it cannot go unnoticed.
fn error_verdict(suite: &str, err: &HarnessError) -> Verdict {
    match err {
        HarnessError::Core(CoreError::CapExceeded { .. } | CoreError::Unsupported { .. }) => {
            Verdict::unmet(suite, format!("cap exceeded or unsupported: {err}"))
        }
        _ => Verdict::identity(suite, "evaluation", "completed", "-", false)
            .note(format!("evaluation error: {err}")),
    }
}

/// Generates and checks one instance.
pub fn run_instance(spec: &InstanceSpec, index: u64) -> Verdict {
    let id = format!("{}-{index:05}", spec.suite);
    let verdict = match generate(spec, index) {
        Ok(instance) => {
            let value = serde_json::to_value(&instance).expect("instances serialize");
            instance.evaluate().unwrap_or_else(|e| error_verdict(&spec.suite, &e)).with_instance(value)
        }
        Err(e) => error_verdict(&spec.suite, &e),
    };
    verdict.with_id(id)
}

/// Runs a whole suite. Instances are evaluated in parallel; the report
/// lists them in index order.
pub fn run_suite(spec: &InstanceSpec) -> HResult<Report> {
    spec.validate()?;
    if !SUITES.contains(&spec.suite.as_str()) {
        return Err(HarnessError::UnknownSuite(spec.suite.clone()));
    }
    let verdicts: Vec<Verdict> = (0..spec.count as u64).into_par_iter().map(|i| run_instance(spec, i)).collect();
    Ok(Report { spec: spec.clone(), summary: Summary::of(&verdicts), verdicts })
}

/// Recomputes a verdict from the instance stored in it.
pub fn recompute(verdict: &Verdict) -> HResult<Verdict> {
    let instance: Instance = serde_json::from_value(verdict.instance.clone())?;
    Ok(instance.evaluate()?.with_instance(verdict.instance.clone()).with_id(verdict.id.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Outcome;

    fn spec(suite: &str, count: usize) -> InstanceSpec {
        InstanceSpec::new(suite, 3, count)
    }

    #[test]
    fn every_suite_generates_and_round_trips() {
        for &suite in SUITES {
            let mut s = spec(suite, 2);
            if suite == "refinement" {
                s.count = 1;
            }
            let report = run_suite(&s).unwrap();
            for v in &report.verdicts {
                assert_ne!(v.outcome, Outcome::Finding, "{suite}: {:?} {:?}", v.notes, v.instance);
                let again = recompute(v).unwrap();
                assert_eq!(serde_json::to_value(&again).unwrap(), serde_json::to_value(v).unwrap(), "{suite}");
            }
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite(&spec("nope", 1)), Err(HarnessError::UnknownSuite(_))));
    }

    #[test]
    fn generated_pisot_instance_is_consistent() {
        let inst = generate(&spec("pisot", 1), 0).unwrap();
        let Instance::Pisot { b, .. } = &inst else { panic!("wrong kind") };
        assert!(ExpPoly::<Q>::parse(b).is_ok());
    }
}
