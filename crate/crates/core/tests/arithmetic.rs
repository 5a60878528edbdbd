use ffgcd_core::ffcore::{divisor_degree, height, projective_height};
use ffgcd_core::mvpoly::{is_coprime, mv_gcd};
use ffgcd_core::{BigRational, QMvPoly, QPoly, QRatFunc};
use num_traits::Zero;
use proptest::prelude::*;

fn poly(max_deg: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec(-9i64..=9, 1..=max_deg + 1).prop_map(|cs| QPoly::from_i64s(&cs))
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = QPoly> {
    poly(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc(max_deg: usize) -> impl Strategy<Value = QRatFunc> {
    (nonzero_poly(max_deg), nonzero_poly(max_deg)).prop_map(|(n, d)| QRatFunc::new(n, d))
}

fn schoolbook(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_zero() || b.is_zero() {
        return QPoly::zero();
    }
    let mut out = vec![BigRational::zero(); a.deg() + b.deg() + 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    QPoly::new(out)
}

/// Projective height of a tuple of polynomials with trivial common factor
/// is the largest degree.
fn height_by_degrees(fs: &[QRatFunc]) -> u64 {
    let den = fs.iter().fold(QPoly::one(), |acc, f| {
        let g = acc.gcd(f.denom());
        (&acc * f.denom()).div_exact(&g).unwrap()
    });
    let nums: Vec<QPoly> = fs
        .iter()
        .map(|f| (f.numer() * &den).div_exact(f.denom()).unwrap())
        .collect();
    let common = nums.iter().fold(QPoly::zero(), |acc, p| acc.gcd(p));
    nums.iter()
        .filter(|p| !p.is_zero())
        .map(|p| (p.deg() - common.deg()) as u64)
        .max()
        .unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn long_products_agree_with_schoolbook(
        a in prop::collection::vec((-50i64..50, 1i64..7), 9..30),
        b in prop::collection::vec((-50i64..50, 1i64..7), 9..30),
    ) {
        let a = QPoly::new(a.into_iter().map(|(n, d)| q(n, d)).collect());
        let b = QPoly::new(b.into_iter().map(|(n, d)| q(n, d)).collect());
        prop_assert_eq!(&a * &b, schoolbook(&a, &b));
    }

    #[test]
    fn common_factors_survive_gcd(a in nonzero_poly(4), b in nonzero_poly(4), c in nonzero_poly(3)) {
        let g = (&a * &c).gcd(&(&b * &c));
        prop_assert!(g.is_monic());
        prop_assert!(c.divides(&g));
        prop_assert!(g.divides(&(&a * &c)) && g.divides(&(&b * &c)));
        let h = a.gcd(&b);
        prop_assert_eq!(g.deg(), h.deg() + c.deg());
    }

    #[test]
    fn powers_have_roots(p in nonzero_poly(4), d in 2u32..=4, k in -20i64..=20) {
        prop_assume!(k != 0);
        let f = p.pow(d).scale(&q(k, 3));
        let root = f.dth_root(d).expect("constructed power");
        prop_assert_eq!(root.pow(d), f.monic());
    }

    #[test]
    fn roots_when_found_are_exact(p in nonzero_poly(6), d in 2u32..=3) {
        if let Some(root) = p.dth_root(d) {
            prop_assert_eq!(root.pow(d), p.monic());
        }
        let shifted = &p.pow(d) + &QPoly::var();
        prop_assume!(!shifted.is_zero() && p.deg() >= 1);
        prop_assert!(shifted.dth_root(d).is_none());
    }

    #[test]
    fn principal_divisors_have_degree_zero(f in ratfunc(5)) {
        prop_assert_eq!(divisor_degree(&f).unwrap(), 0);
        prop_assert_eq!(height(&f).unwrap(), f.degree_height());
    }

    #[test]
    fn projective_height_matches_degrees(fs in prop::collection::vec(ratfunc(3), 1..5)) {
        prop_assert_eq!(projective_height(&fs).unwrap(), height_by_degrees(&fs));
    }
}

fn mv(src: &str) -> QMvPoly {
    QMvPoly::parse(src, 2).unwrap()
}

fn mv_poly() -> impl Strategy<Value = QMvPoly> {
    let coeff = prop_oneof![
        Just("1"),
        Just("t"),
        Just("(t-1)"),
        Just("2/(t+1)"),
        Just("-3"),
        Just("(t^2+t+1)"),
    ];
    let mono = prop_oneof![Just("1"), Just("x1"), Just("x2"), Just("x1*x2"), Just("x1^2"), Just("x2^2")];
    prop::collection::vec((coeff, mono), 1..4).prop_map(|terms| {
        let src: Vec<String> = terms.iter().map(|(c, m)| format!("{c}*{m}")).collect();
        mv(&src.join("+"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coprimality_agrees_with_gcd(f in mv_poly(), g in mv_poly(), shared in mv_poly()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        prop_assert_eq!(is_coprime(&f, &g), mv_gcd(&f, &g).is_constant());
        prop_assume!(!shared.is_constant());
        prop_assert!(!is_coprime(&(&f * &shared), &(&g * &shared)));
    }
}

#[test]
fn associates_are_not_coprime() {
    let f = mv("(t-2)*x1+1");
    let g = mv("x1+1/(t-2)");
    assert!(!is_coprime(&f, &g));
    assert!(is_coprime(&f, &mv("x1*x2+t")));
}
