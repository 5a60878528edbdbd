//! Acceptance criteria, one line each.
//!
//! Runs without the libtest harness so that every criterion reports even
//! when an earlier one fails. The process exits nonzero if any criterion
//! fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ffgcd_core::ffcore::{height, parse_rational_function};
use ffgcd_core::pisot::{pisot_factor, ExpPoly};
use ffgcd_core::{PlaceSet, QExpPoly, QMvPoly, QPoly, QRatFunc};
use ffgcd_harness::verify::{ailon_rudnick_gcd_degree, verify_brownawell_masser, verify_lemma31};
use ffgcd_harness::{run_suite, Branch, InstanceSpec, Outcome, Report, Verdict};
use num_rational::BigRational;
use num_traits::Zero;

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;

fn rf(s: &str) -> QRatFunc {
    parse_rational_function(s).expect("valid rational function")
}

fn suite(name: &str, count: usize) -> Result<Report, String> {
    run_suite(&InstanceSpec::new(name, SEED, count)).map_err(|e| format!("{name}: {e}"))
}

/// Every verdict passes outright.
fn all_pass(report: &Report) -> Check {
    let s = &report.summary;
    let bad: Vec<_> = report.verdicts.iter().filter(|v| v.outcome != Outcome::Pass).take(3).collect();
    if bad.is_empty() {
        Ok(format!("{}/{} pass", s.pass, s.total))
    } else {
        Err(format!(
            "{} of {} not passing, e.g. {}",
            s.total - s.pass,
            s.total,
            bad.iter().map(|v| format!("{} {:?} {}", v.id, v.outcome, v.notes.join("; "))).collect::<Vec<_>>().join(" | ")
        ))
    }
}

/// No asserted statement fails and every asserted margin is nonnegative.
fn no_findings(report: &Report) -> Check {
    let s = &report.summary;
    let negative = report
        .verdicts
        .iter()
        .filter(|v| v.branch == Branch::GcdBound)
        .filter(|v| v.margin_value().is_some_and(|m| m < BigRational::zero()))
        .count();
    let findings: Vec<_> = report.verdicts.iter().filter(|v| v.is_finding()).take(3).map(|v| v.id.clone()).collect();
    let line = format!(
        "{} instances: {} pass, {} relation, {} precondition-unmet, {} FINDING",
        s.total, s.pass, s.relation, s.precondition_unmet, s.finding
    );
    if s.finding == 0 && negative == 0 {
        Ok(line)
    } else {
        Err(format!("{line}; first findings {findings:?}; {negative} negative margins"))
    }
}

fn within(start: Instant, budget: Duration) -> Check {
    let took = start.elapsed();
    if took <= budget {
        Ok(format!("{:.1}s of {}s", took.as_secs_f64(), budget.as_secs()))
    } else {
        Err(format!("took {:.1}s, budget {}s", took.as_secs_f64(), budget.as_secs()))
    }
}

fn combine(parts: Vec<Check>) -> Check {
    let failed = parts.iter().any(Result::is_err);
    let text = parts.into_iter().map(|p| p.unwrap_or_else(|e| format!("FAILED: {e}"))).collect::<Vec<_>>().join("; ");
    if failed {
        Err(text)
    } else {
        Ok(text)
    }
}

fn margin_is(v: &Verdict, expected: i64) -> Check {
    let want = BigRational::from_integer(expected.into());
    match v.margin_value() {
        Some(m) if m == want && v.outcome == Outcome::Pass => Ok(format!("margin {m}")),
        other => Err(format!("margin {other:?}, outcome {:?}, expected margin {want}", v.outcome)),
    }
}

fn exact_identities() -> Check {
    let start = Instant::now();
    let gauss = suite("gauss", 500).and_then(|r| all_pass(&r)).map(|s| format!("Gauss {s}"));
    let du = suite("du", 200).and_then(|r| all_pass(&r)).map(|s| format!("D_u {s}"));
    combine(vec![gauss, du, within(start, Duration::from_secs(10))])
}

fn divisor_degree() -> Check {
    suite("divisor", 1000).and_then(|r| all_pass(&r))
}

fn brownawell_masser() -> Check {
    let random = suite("brownawell", 200).and_then(|r| no_findings(&r));
    // t + (1 - t) = 1 over S = {t, t - 1, ∞}: both heights are 1, and the
    // bound is n(n-1)/2 · (2·0 - 2 + 3) = 1 for n = 2.
    let s = PlaceSet::parse("t, t-1, inf").expect("places");
    let sharp = verify_brownawell_masser(&[rf("t"), rf("1-t")], &s)
        .map_err(|e| e.to_string())
        .and_then(|v| margin_is(&v, 0));
    combine(vec![random, sharp.map(|m| format!("(t, 1-t): {m}"))])
}

fn lemma31() -> Check {
    let random = suite("lemma31", 500).and_then(|r| no_findings(&r));
    // η = t³ outside S = ∅: η' = 3t², so the common zeros count min(3, 2) = 2
    // at t, against N - N̄ = 3 - 1 = 2.
    let sharp = verify_lemma31(&rf("t^3"), &PlaceSet::empty())
        .map_err(|e| e.to_string())
        .and_then(|v| margin_is(&v, 0));
    combine(vec![random, sharp.map(|m| format!("t^3: {m}"))])
}

fn prop33() -> Check {
    suite("prop33", 100).and_then(|r| {
        let pass = all_pass(&r);
        combine(vec![no_findings(&r), pass])
    })
}

fn refinement() -> Check {
    let start = Instant::now();
    let report = suite("refinement", 50)?;
    let timing = within(start, Duration::from_secs(300));
    let tally = |name: &str| -> Check {
        let key = format!("holds:{name}");
        let checked: Vec<_> = report.verdicts.iter().filter_map(|v| v.payload.get(&key)).collect();
        let failed = checked.iter().filter(|b| b.as_bool() == Some(false)).count();
        if failed == 0 {
            Ok(format!("{name} {}/{}", checked.len(), checked.len()))
        } else {
            Err(format!("{name} fails on {failed} of {} instances", checked.len()))
        }
    };
    let unmet = report.summary.precondition_unmet;
    let parts = vec![
        if report.summary.total == 50 && unmet == 0 {
            Ok("50 coprime pairs".to_string())
        } else {
            Err(format!("{unmet} of {} instances could not be built", report.summary.total))
        },
        tally("codimension"),
        tally("chain"),
        tally("key-inequality"),
        tally("moving-targets"),
        tally("gcd-bound"),
        no_findings(&report),
        timing,
    ];
    combine(parts)
}

/// Degree of `gcd(a, b)` modulo a prime; it bounds the degree over Q from
/// above whenever the leading coefficients survive the reduction.
fn gcd_degree_mod_p(a: &[i64], b: &[i64], p: i64) -> usize {
    fn trim(v: &mut Vec<i64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }
    fn inv(a: i64, p: i64) -> i64 {
        let (mut r, mut base, mut e) = (1i64, a.rem_euclid(p), p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        r
    }
    let mut x: Vec<i64> = a.iter().map(|c| c.rem_euclid(p)).collect();
    let mut y: Vec<i64> = b.iter().map(|c| c.rem_euclid(p)).collect();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let lead = inv(*y.last().unwrap(), p);
        while x.len() >= y.len() {
            let c = x.last().unwrap() * lead % p;
            let shift = x.len() - y.len();
            for (j, &yj) in y.iter().enumerate() {
                x[shift + j] = (x[shift + j] - c * yj % p).rem_euclid(p);
            }
            trim(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len() - 1
}

/// Coefficients of `(t + 1)^ℓ - 1` and `t^ℓ - 1` modulo `p`.
fn ailon_rudnick_pair(ell: usize, p: i64) -> (Vec<i64>, Vec<i64>) {
    let mut shifted = vec![1i64];
    for _ in 0..ell {
        let mut next = vec![0i64; shifted.len() + 1];
        for (k, &c) in shifted.iter().enumerate() {
            next[k] = (next[k] + c) % p;
            next[k + 1] = (next[k + 1] + c) % p;
        }
        shifted = next;
    }
    shifted[0] -= 1;
    let mut plain = vec![0i64; ell + 1];
    plain[0] = -1;
    plain[ell] = 1;
    (shifted, plain)
}

fn ailon_rudnick() -> Check {
    const P: i64 = 1_000_000_007;
    let mut gcd_ok = Ok(());
    let mut heights_ok = Ok(());
    for ell in 1..=50usize {
        let (a, b) = ailon_rudnick_pair(ell, P);
        let oracle = gcd_degree_mod_p(&a, &b, P);
        let direct = ailon_rudnick_gcd_degree(ell as u32);
        if oracle > 2 || direct > oracle {
            gcd_ok = Err(format!("ℓ = {ell}: gcd degree {direct}, modular bound {oracle}"));
        }
        let h = [format!("t^{ell}"), format!("(t+1)^{ell}")]
            .iter()
            .map(|s| height(&rf(s)).expect("nonzero"))
            .max()
            .expect("two entries");
        if h != ell as u64 {
            heights_ok = Err(format!("ℓ = {ell}: max height {h}"));
        }
    }
    let spec = InstanceSpec { eps: "0.1".into(), ell_min: 1, ell_max: 50, ..InstanceSpec::new("ailon-rudnick", SEED, 50) };
    let statement = run_suite(&spec).map_err(|e| e.to_string()).and_then(|report| {
        let late: Vec<_> = report.verdicts.iter().filter(|v| v.payload["ell"].as_u64() >= Some(20)).collect();
        let failing: Vec<_> = late.iter().filter(|v| v.outcome != Outcome::Pass).map(|v| v.id.clone()).collect();
        if late.len() == 31 && failing.is_empty() && report.summary.finding == 0 {
            Ok(format!("statement (a) at ε = 1/10 holds for all {} ℓ in 20..=50", late.len()))
        } else {
            Err(format!("{} of {} ℓ >= 20 not passing: {failing:?}", failing.len(), late.len()))
        }
    });
    combine(vec![
        gcd_ok.map(|_| "deg gcd <= 2 for ℓ = 1..=50".to_string()),
        heights_ok.map(|_| "max h(g^ℓ) = ℓ".to_string()),
        statement,
    ])
}

fn dth_power_oracle() -> Check {
    let report = suite("dthpower", 300)?;
    let ds: BTreeSet<u64> = report.verdicts.iter().filter_map(|v| v.instance["d"].as_u64()).collect();
    let coverage = if ds == BTreeSet::from([2, 3, 4]) {
        Ok("d in {2, 3, 4}".to_string())
    } else {
        Err(format!("exponents covered: {ds:?}"))
    };
    combine(vec![all_pass(&report), coverage])
}

fn relation_oracle() -> Check {
    suite("relation", 100).and_then(|r| all_pass(&r))
}

fn exp(s: &str) -> QExpPoly {
    ExpPoly::parse(s).expect("valid exponential polynomial")
}

fn worked_examples() -> Check {
    let err = |e: ffgcd_core::Error| e.to_string();
    let mut out = Vec::new();

    let p = pisot_factor(&exp("(T^2+2*t*T+t^2 ; t^2)"), 2).map_err(err)?;
    let q1 = QMvPoly::parse("x1+t", 2).expect("literal");
    out.push(
        (p.r.is_one() && p.q1 == q1 && p.g.is_one_poly() && p.radical_exponent == [1])
            .then_some("(m+t)^2 t^(2m): R = 1, Q1 = x0 + t")
            .ok_or_else(|| format!("(m+t)^2 t^(2m): R = {}, Q1 = {}, G = {}", p.r, p.q1, p.g)),
    );

    let p = pisot_factor(&exp("(T ; t^2)"), 2).map_err(err)?;
    out.push(
        (p.r == QPoly::from_i64s(&[0, 1]))
            .then_some("m t^(2m): R = T")
            .ok_or_else(|| format!("m t^(2m): R = {}", p.r)),
    );

    let p = pisot_factor(&exp("(1 ; t)"), 2).map_err(err)?;
    out.push(
        (p.r.is_one() && p.radical_exponent == [1] && p.model.basis.units == [rf("t")])
            .then_some("t^m: R = 1, radical t")
            .ok_or_else(|| format!("t^m: R = {}, radical exponent {:?}", p.r, p.radical_exponent)),
    );
    combine(out.into_iter().map(|r| r.map(str::to_string)).collect())
}

fn pisot() -> Check {
    let start = Instant::now();
    let round_trips = suite("pisot", 20).and_then(|r| {
        let ds: BTreeSet<u64> = r.verdicts.iter().filter_map(|v| v.instance["d"].as_u64()).collect();
        let coverage =
            if ds == BTreeSet::from([2, 3]) { Ok("d in {2, 3}".to_string()) } else { Err(format!("d covered: {ds:?}")) };
        combine(vec![all_pass(&r), coverage])
    });
    combine(vec![round_trips, worked_examples(), within(start, Duration::from_secs(60))])
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("exact identities", exact_identities),
        ("divisor degree", divisor_degree),
        ("unit equations", brownawell_masser),
        ("derivative gcd lower bound", lemma31),
        ("twisted derivation height", prop33),
        ("linear-forms construction", refinement),
        ("gcd of t^l - 1 and (t+1)^l - 1", ailon_rudnick),
        ("d-th power oracle", dth_power_oracle),
        ("multiplicative relation oracle", relation_oracle),
        ("d-th root factorization", pisot),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name} ({took:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name} ({took:.1}s): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
