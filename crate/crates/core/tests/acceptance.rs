//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when a criterion fails other than the one documented refutation
//! (derangement ratio log-concavity from n = 2).

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use logmono::certify::{Certificate, Property};
use logmono::exactnum::{QuadNum, Rational};
use logmono::logcheck::{self, Direction};
use logmono::ratfun::{certify_positive, Poly, RatFun};
use logmono::reproduce::{self, ClaimResult, Status};
use logmono::sequences::{builtin, TermCache};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(what.into());
        }
    }
}

fn claim<'a>(rs: &'a [ClaimResult], id: &str) -> &'a ClaimResult {
    rs.iter().find(|c| c.id == id).unwrap_or_else(|| panic!("missing claim {id}"))
}

fn cert(r: &ClaimResult) -> Option<&Certificate> {
    r.certificates.first()
}

fn has_check(c: &Certificate, predicate: &str, start: i64, end: i64) -> bool {
    c.finite_checks.iter().any(|v| v.holds && v.predicate == predicate && v.start <= start && v.end >= end)
}

fn has_base(c: &Certificate, label: &str, index: i64) -> bool {
    c.base_cases.iter().any(|b| b.holds && b.label == label && b.index == index)
}

/// Criteria 1 to 5: a three-term sequence with its ratio and root claims.
fn three_term(name: &str, lemmas_from: i64, prefix: (i64, i64), merged: i64, root_from: i64, floor: bool) -> Outcome {
    let rs = reproduce::run(Some(name));
    let mut o = Outcome::new();
    let ratio = claim(&rs, &format!("{name}.ratio_logconcave"));
    let root = claim(&rs, &format!("{name}.root_logconcave"));
    o.require(ratio.status == Status::Certified, format!("ratio claim {}", ratio.summary));
    o.require(root.status == Status::Certified, format!("root claim {}", root.summary));
    if let Some(c) = cert(ratio) {
        o.require(c.tail && c.conclusion_from <= merged, format!("merged claim from {}", c.conclusion_from));
        o.require(c.hypotheses_from == lemmas_from, format!("bound lemmas from {}", c.hypotheses_from));
        o.require(has_check(c, "ratio-logconcave", prefix.0, prefix.1), "finite prefix check");
        let thm = c.lemmas.first();
        o.require(thm.is_some_and(|t| t.positivity.iter().any(|p| p.condition == "condition (ii)")), "quartic condition");
        if floor {
            let fl = c.find_lemma(Property::FloorBound);
            o.require(fl.is_some_and(|f| f.tail && f.conclusion_from == lemmas_from), "floor bound");
            let up = c.find_lemma(Property::UpperBound);
            o.require(up.is_some_and(|u| u.tail && u.conclusion_from == lemmas_from), "upper bound");
        } else {
            let lo = c.find_lemma(Property::LowerBound);
            o.require(lo.is_some_and(|l| l.tail && l.conclusion_from == lemmas_from), "lower bound");
        }
    }
    if let Some(c) = cert(root) {
        o.require(c.conclusion_from <= root_from, format!("root claim from {}", c.conclusion_from));
        let covered = has_check(c, "root-logconcave", root_from + 1, 60)
            || root.verdicts.iter().any(|v| v.holds && v.start <= root_from && v.end >= 60);
        o.require(covered, "exact root check to 60");
        o.require(c.base_cases.iter().any(|b| b.label == "initial condition" && b.holds), "initial condition");
    }
    o.notes.push(format!("{}; {}", ratio.summary, root.summary));
    o
}

fn derangement() -> Outcome {
    let rs = reproduce::run(Some("derangement"));
    let mut o = Outcome::new();
    let lb = claim(&rs, "derangement.lower_bound");
    o.require(lb.status == Status::FiniteVerified, "D_n > 5(n+3)");
    let lc = claim(&rs, "derangement.logconvex");
    o.require(lc.verdicts.iter().any(|v| v.holds && v.start <= 3 && v.end >= 9_999), "log-convexity");
    let mut c = TermCache::new(builtin("derangement", 1).unwrap());
    o.require(logcheck::check_initial_condition(&mut c, 3, Direction::Concave).unwrap(), "initial condition at 3");
    let root = claim(&rs, "derangement.root_logconcave");
    o.require(
        cert(root).is_some_and(|c| has_check(c, "root-logconcave", 4, 60) && has_base(c, "initial condition", 3)),
        "root log-concavity on [3, 60]",
    );
    let ratio = claim(&rs, "derangement.ratio_logconcave");
    let full = ratio.verdicts.iter().find(|v| v.start == 4);
    o.require(full.is_some_and(|v| v.holds), format!("ratio log-concavity on [2, 10^4]: {}", ratio.summary));
    o.notes.extend(ratio.details.iter().filter(|d| d.starts_with("counterexample")).cloned());
    o
}

/// True when the only derangement failure is the ratio check at middle 5.
fn derangement_is_documented(o: &Outcome) -> bool {
    let rs = reproduce::run(Some("derangement.ratio_logconcave"));
    let ratio = claim(&rs, "derangement.ratio_logconcave");
    let at5 = ratio.verdicts.iter().any(|v| v.start == 4 && v.first_failure == Some(5));
    let tail = ratio.verdicts.iter().any(|v| v.start == 6 && v.holds);
    let only = o.notes.iter().filter(|n| !n.starts_with("counterexample")).count() == 1;
    at5 && tail && only && o.notes[0].starts_with("ratio log-concavity on [2, 10^4]")
}

fn harmonic() -> Outcome {
    let mut o = Outcome::new();
    for m in 1..=4 {
        let rs = reproduce::run(Some(&format!("harmonic.m{m}")));
        let ratio = claim(&rs, &format!("harmonic.m{m}.ratio_logconvex"));
        o.require(
            ratio.verdicts.iter().any(|v| v.holds && v.start <= 3 && v.end >= 1002),
            format!("m = {m}: ratio log-convexity"),
        );
        let root = claim(&rs, &format!("harmonic.m{m}.root_logconvex"));
        o.require(
            cert(root).is_some_and(|c| has_base(c, "initial condition", 3) && has_check(c, "root-logconvex", 4, 60)),
            format!("m = {m}: root log-convexity"),
        );
    }
    o
}

fn order5() -> Outcome {
    let mut o = Outcome::new();
    for name in ["catalan", "central_binomial", "bernoulli_abs_even"] {
        let mut c = TermCache::new(builtin(name, 1).unwrap());
        let vs = logcheck::check_order_k(&mut c, 5, 1, 80, false).unwrap();
        o.require(vs.len() == 5 && vs.iter().all(|v| v.holds), format!("{name} order 5"));
    }
    o
}

fn forge() -> Outcome {
    let mut o = Outcome::new();
    for (name, x1) in [("motzkin", "-9/16"), ("delannoy", "-1/32*sqrt(2)")] {
        let rs = reproduce::run(Some(&format!("forge.{name}")));
        let r = &rs[0];
        o.require(r.status == Status::Certified, format!("{name}: {}", r.summary));
        let trace = r.forge.as_ref();
        let chosen = trace.and_then(|t| t.corrections.first()).map(|c| c.chosen.to_string());
        o.require(chosen.as_deref() == Some(x1), format!("{name}: x1 = {chosen:?}"));
        o.require(
            trace.is_some_and(|t| t.final_bound.is_some() && t.validation.as_ref().is_some_and(|v| v.recheck().is_ok())),
            format!("{name}: final bound validation"),
        );
    }
    o
}

fn positivity_oracle() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let poly = |rng: &mut ChaCha8Rng| {
        let deg = rng.gen_range(0..=4);
        Poly::new((0..=deg).map(|_| Rational::from_integer(rng.gen_range(-9i64..=9).into())).collect())
    };
    let mut disagreements = 0;
    for _ in 0..200 {
        let numer = poly(&mut rng);
        let denom = loop {
            let d = poly(&mut rng);
            if !d.is_zero() {
                break d;
            }
        };
        let f: RatFun<Rational> = RatFun::new(numer, denom).unwrap();
        let start = rng.gen_range(0..=30);
        let verdict = certify_positive(&f, start).is_ok();
        let brute = (start..=start + 500).all(|n| f.eval(n).is_ok_and(|v| v.is_positive()));
        if verdict != brute {
            disagreements += 1;
            o.notes.push(format!("{f} from {start}: certifier {verdict}, brute force {brute}"));
        }
    }
    o.require(disagreements == 0, format!("{disagreements} disagreements"));
    o
}

/// Sign of `s − y√d` by squaring, without the library's comparison.
fn sign_minus_sqrt(s: &Rational, y: &Rational, d: u64) -> i8 {
    let sig = |r: &Rational| if r.is_zero() { 0 } else if r.is_positive() { 1 } else { -1 };
    let (a, b) = (sig(s), -sig(y));
    match (a, b) {
        (0, _) => b,
        (_, 0) => a,
        _ if a == b => a,
        // opposite signs: the term of larger magnitude wins
        _ => a * sig(&(s * s - y * y * Rational::from_integer(d.into()))),
    }
}

/// Order of `r` against the quadratic number `q`.
fn cmp_rat_quad(r: &Rational, q: &QuadNum) -> i8 {
    sign_minus_sqrt(&(r - q.rat_part()), q.irr_part(), q.radicand())
}

fn key(id: &str, c: &Certificate) -> (String, String) {
    let cache = match id.split('.').collect::<Vec<_>>().as_slice() {
        ["harmonic", m, ..] => format!("harmonic {m}"),
        _ => c.claim.sequence.clone(),
    };
    let bound = c.claim.bound.as_ref().map(|b| b.to_string()).unwrap_or_default();
    (cache, format!("{:?} {} {} {bound}", c.claim.property, c.conclusion_from, c.tail))
}

fn cache_for(k: &str) -> TermCache {
    match k.strip_prefix("harmonic m") {
        Some(m) => TermCache::new(builtin("harmonic", m.parse().unwrap()).unwrap()),
        None => TermCache::new(builtin(k, 1).unwrap()),
    }
}

fn int_pow(r: &Rational, e: u32) -> (BigInt, BigInt) {
    (r.numer().pow(e), r.denom().pow(e))
}

/// Direct re-check of one certificate at one index.
fn recheck_at(c: &Certificate, a: &mut TermCache, n: i64) -> Result<bool, String> {
    let t = |a: &mut TermCache, i: i64| a.term(i).map_err(|e| e.to_string());
    match c.claim.property {
        Property::RatioLogconcave | Property::RatioLogconvex => {
            // a_n³ a_{n−2} against a_{n+1} a_{n−1}³, cleared of denominators
            let (x2, x1, x0, y) = (t(a, n - 2)?, t(a, n - 1)?, t(a, n)?, t(a, n + 1)?);
            let l = x0.numer().pow(3) * x2.numer() * y.denom() * x1.denom().pow(3);
            let r = y.numer() * x1.numer().pow(3) * x0.denom().pow(3) * x2.denom();
            Ok(match c.claim.property {
                Property::RatioLogconcave => l > r,
                _ => l < r,
            })
        }
        Property::LowerBound | Property::UpperBound | Property::FloorBound => {
            let ratio = t(a, n)? / t(a, n - 1)?;
            let b = c.claim.bound.as_ref().ok_or("bound missing")?.eval(n).map_err(|e| e.to_string())?;
            let s = cmp_rat_quad(&ratio, &b);
            Ok(match c.claim.property {
                Property::LowerBound => s > 0,
                Property::UpperBound => s < 0,
                _ => s >= 0,
            })
        }
        Property::RootLogconcave | Property::RootLogconvex => {
            // a_n^{2(n²−1)} against a_{n+1}^{n(n−1)} a_{n−1}^{n(n+1)}
            let m = n as u32;
            let (p, q) = int_pow(&t(a, n)?, 2 * (m * m - 1));
            let (p1, q1) = int_pow(&t(a, n + 1)?, m * (m - 1));
            let (p0, q0) = int_pow(&t(a, n - 1)?, m * (m + 1));
            let (l, r) = (p * q1 * q0, p1 * p0 * q);
            Ok(match c.claim.property {
                Property::RootLogconcave => l > r,
                _ => l < r,
            })
        }
    }
}

/// Indices audited for a certificate: 50 distinct draws from its window.
fn window(c: &Certificate) -> (i64, i64) {
    let f = c.conclusion_from;
    let covered = c.finite_checks.iter().map(|v| v.end).max().unwrap_or(f);
    match c.claim.property {
        Property::RootLogconcave | Property::RootLogconvex => (f + 1, reproduce::ROOT_END),
        Property::RatioLogconcave | Property::RatioLogconvex if c.tail => (f + 2, f + 502),
        Property::RatioLogconcave | Property::RatioLogconvex => (f + 2, covered),
        _ => (f, f + 500),
    }
}

fn soundness_audit(rs: &[ClaimResult]) -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = HashSet::new();
    let (mut certs, mut samples, mut violations) = (0, 0, 0);
    for r in rs {
        let mut stack: Vec<&Certificate> = r.certificates.iter().collect();
        if let Some(v) = r.forge.as_ref().and_then(|f| f.validation.as_ref()) {
            stack.push(v);
        }
        while let Some(c) = stack.pop() {
            stack.extend(c.lemmas.iter());
            let k = key(&r.id, c);
            if !seen.insert(k.clone()) {
                continue;
            }
            certs += 1;
            let mut a = cache_for(&k.0);
            let (lo, hi) = window(c);
            let len = (hi - lo + 1) as usize;
            for i in sample(&mut rng, len, len.min(50)).into_iter() {
                let n = lo + i as i64;
                samples += 1;
                match recheck_at(c, &mut a, n) {
                    Ok(true) => {}
                    Ok(false) => {
                        violations += 1;
                        o.notes.push(format!("{} {}: violated at {n}", r.id, k.1));
                    }
                    Err(e) => {
                        violations += 1;
                        o.notes.push(format!("{} {}: {e} at {n}", r.id, k.1));
                    }
                }
            }
            if len < 50 {
                o.notes.push(format!("{} {}: window [{lo}, {hi}] holds only {len} indices", r.id, k.1));
            }
        }
    }
    o.require(violations == 0, format!("{violations} violations"));
    o.notes.insert(0, format!("{certs} certificates, {samples} sampled indices"));
    o
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome, Duration, Duration)> = Vec::new();
    let mut go = |n: usize, name: &'static str, limit: u64, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let mut o = f();
        let e = t.elapsed();
        let limit = Duration::from_secs(limit);
        o.require(e < limit, format!("runtime {e:.2?} over {limit:?}"));
        results.push((n, name, o, e, limit));
    };
    go(1, "Motzkin ratio and root log-concavity", 5, &|| three_term("motzkin", 13, (6, 12), 4, 1, false));
    go(2, "Fine ratio and root log-concavity", 5, &|| three_term("fine", 7, (7, 7), 5, 2, false));
    go(3, "Delannoy over Q(sqrt 2)", 10, &|| three_term("delannoy", 2, (2, 2), 0, 1, true));
    go(4, "tree-like polyhexes", 5, &|| three_term("polyhex", 7, (2, 6), 2, 1, true));
    go(5, "Domb numbers", 30, &|| three_term("domb", 24, (2, 23), 0, 1, true));
    go(6, "derangements", 30, &derangement);
    go(7, "generalized harmonic numbers, m = 1..4", 60, &harmonic);
    go(8, "order-5 slices", 60, &order5);
    go(9, "bound construction", 10, &forge);
    go(10, "positivity certifier against brute force", 60, &positivity_oracle);
    let suite = reproduce::run(None);
    go(11, "certificate soundness audit", 600, &|| soundness_audit(&suite));

    let mut unexpected = Vec::new();
    for (n, name, o, e, _) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2}: {verdict} {name} ({e:.2?})");
        for note in &o.notes {
            println!("    {note}");
        }
        let documented = *n == 6 && derangement_is_documented(o);
        if !o.pass && !documented {
            unexpected.push(*n);
        }
        if documented {
            println!("    known refutation: {{D_n}}_{{n>=2}} is ratio log-concave only from n = 4");
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
