//! The built-in reproduction suite and its report.
//!
//! Every claim has a fixed id and a descriptive locator. Claims are grouped by
//! the sequence they share so one term cache serves each group.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::boundforge::{self, BoundKind, ForgeTrace};
use crate::certify::{self, Certificate, RatioEvidence};
use crate::exactnum::{int, QuadNum, Rational};
use crate::expr::parse_ratfun;
use crate::logcheck::{self, Direction, RangeVerdict, ScanRow, Strictness};
use crate::ratfun::RatFun;
use crate::sequences::{builtin, TermCache};

pub const MOTZKIN_G: &str = "(6*n^2+3*n-9/8)/(2*n*(n+2))";
pub const FINE_G: &str = "(4*n^2-2*n+2/3)/(n^2+n)";
pub const DELANNOY_H: &str = "((3+2*sqrt(2))*n^2-3/2*n-sqrt(2)*n-sqrt(2)/32)/n^2";
pub const POLYHEX_H: &str = "(10*n^3-5*n^2+15/8*n+6)/(2*n^2+2*n^3)";
pub const DOMB_H: &str = "(16*n^3-24*n^2+12*n-2)/n^3";
/// The reference Domb intermediate bound that accompanies the final `h`.
pub const DOMB_S_REFERENCE: &str = "(16*n^3-24*n^2+40*n-12)/n^3";

/// Last middle index of the exact root checks.
pub const ROOT_END: i64 = 60;
pub const DERANGEMENT_END: i64 = 10_000;
pub const HARMONIC_END: i64 = 1002;
pub const FORGE_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    FiniteVerified,
    Empirical,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::FiniteVerified => "finite-verified",
            Status::Empirical => "empirical",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub locator: String,
    pub status: Status,
    pub summary: String,
    /// Inequality strictness the claim needs, where it is a log-behavior claim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictness: Option<Strictness>,
    pub details: Vec<String>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<RangeVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forge: Option<ForgeTrace>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub timestamp: String,
    /// Reserved; the suite is deterministic.
    pub seed: u64,
    pub claims: Vec<ClaimResult>,
}

/// Claim ids and locators, in report order.
pub const SUITE: &[(&str, &str)] = &[
    ("motzkin.ratio_logconcave", "Motzkin numbers: ratio log-concavity theorem"),
    ("motzkin.root_logconcave", "Motzkin numbers: log-concavity of the n-th root"),
    ("fine.ratio_logconcave", "Fine numbers: ratio log-concavity theorem"),
    ("fine.root_logconcave", "Fine numbers: log-concavity of the n-th root"),
    ("delannoy.ratio_logconcave", "central Delannoy numbers: ratio log-concavity theorem"),
    ("delannoy.root_logconcave", "central Delannoy numbers: log-concavity of the n-th root"),
    ("polyhex.ratio_logconcave", "tree-like polyhexes: ratio log-concavity theorem"),
    ("polyhex.root_logconcave", "tree-like polyhexes: log-concavity of the n-th root"),
    ("domb.ratio_logconcave", "Domb numbers: ratio log-concavity (Sun's conjecture)"),
    ("domb.root_logconcave", "Domb numbers: log-concavity of the n-th root (Sun's conjecture)"),
    ("derangement.lower_bound", "derangement numbers: lower bound D_n > 5(n+3)"),
    ("derangement.logconvex", "derangement numbers: log-convexity"),
    ("derangement.ratio_logconcave", "derangement numbers: ratio log-concavity"),
    ("derangement.root_logconcave", "derangement numbers: log-concavity of the n-th root"),
    ("harmonic.m1.ratio_logconvex", "generalized harmonic numbers, m = 1: ratio log-convexity"),
    ("harmonic.m1.root_logconvex", "generalized harmonic numbers, m = 1: log-convexity of the n-th root"),
    ("harmonic.m2.ratio_logconvex", "generalized harmonic numbers, m = 2: ratio log-convexity"),
    ("harmonic.m2.root_logconvex", "generalized harmonic numbers, m = 2: log-convexity of the n-th root"),
    ("harmonic.m3.ratio_logconvex", "generalized harmonic numbers, m = 3: ratio log-convexity"),
    ("harmonic.m3.root_logconvex", "generalized harmonic numbers, m = 3: log-convexity of the n-th root"),
    ("harmonic.m4.ratio_logconvex", "generalized harmonic numbers, m = 4: ratio log-convexity"),
    ("harmonic.m4.root_logconvex", "generalized harmonic numbers, m = 4: log-convexity of the n-th root"),
    ("order5.catalan", "Catalan numbers: infinite log-monotonicity, order-5 slice"),
    ("order5.central_binomial", "central binomial coefficients: infinite log-monotonicity, order-5 slice"),
    ("order5.bernoulli_abs_even", "even Bernoulli numbers |B_2n|: infinite log-monotonicity, order-5 slice"),
    ("forge.motzkin", "bound construction: Motzkin lower bound"),
    ("forge.delannoy", "bound construction: Delannoy upper bound"),
    ("forge.fine", "bound construction: Fine lower bound"),
    ("forge.polyhex", "bound construction: tree-like polyhex upper bound"),
    ("forge.domb", "bound construction: Domb upper bound"),
    ("scan.motzkin", "almost infinite log-monotonicity conjecture: Motzkin numbers"),
    ("scan.fine", "almost infinite log-monotonicity conjecture: Fine numbers"),
    ("scan.delannoy", "almost infinite log-monotonicity conjecture: central Delannoy numbers"),
    ("scan.polyhex", "almost infinite log-monotonicity conjecture: tree-like polyhexes"),
    ("scan.domb", "almost infinite log-monotonicity conjecture: Domb numbers"),
    ("scan.bell", "almost infinite log-monotonicity conjecture: Bell numbers"),
];

/// Ids selected by `only`: an exact id, or every id under a dotted prefix.
pub fn select(only: Option<&str>) -> Vec<&'static str> {
    SUITE
        .iter()
        .map(|(id, _)| *id)
        .filter(|id| match only {
            None => true,
            Some(p) => *id == p || id.starts_with(&format!("{p}.")),
        })
        .collect()
}

fn locator(id: &str) -> &'static str {
    SUITE.iter().find(|(i, _)| *i == id).map(|(_, l)| *l).unwrap_or("")
}

fn group_of(id: &str) -> String {
    let parts: Vec<&str> = id.split('.').collect();
    match parts[0] {
        "harmonic" => parts[..2].join("."),
        "forge" | "scan" | "order5" => id.to_string(),
        _ => parts[0].to_string(),
    }
}

/// Run the selected claims; the result follows the fixed suite order.
pub fn run(only: Option<&str>) -> Vec<ClaimResult> {
    let ids = select(only);
    let mut groups: Vec<String> = ids.iter().map(|id| group_of(id)).collect();
    groups.dedup();
    let mut out: Vec<ClaimResult> = groups
        .iter()
        .flat_map(|g| run_group(g))
        .filter(|c| ids.contains(&c.id.as_str()))
        .collect();
    out.sort_by_key(|c| SUITE.iter().position(|(id, _)| *id == c.id));
    out
}

impl Report {
    pub fn new(claims: Vec<ClaimResult>, timestamp: impl Into<String>) -> Self {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: timestamp.into(),
            seed: 0,
            claims,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.claims.iter().all(|c| c.status != Status::Failed)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Reproduction report\n");
        let _ = writeln!(s, "tool version {}, generated {}\n", self.tool_version, self.timestamp);
        let _ = writeln!(s, "| claim | status | locator | summary |");
        let _ = writeln!(s, "|---|---|---|---|");
        for c in &self.claims {
            let _ = writeln!(s, "| `{}` | {} | {} | {} |", c.id, c.status.as_str(), c.locator, c.summary);
        }
        for c in &self.claims {
            let _ = writeln!(s, "\n## {} ({})\n", c.id, c.status.as_str());
            for d in &c.details {
                let _ = writeln!(s, "- {d}");
            }
            let _ = writeln!(s, "- time: {} ms", c.elapsed_ms);
        }
        s
    }
}

fn result(id: &str, start: Instant) -> ClaimResult {
    ClaimResult {
        id: id.into(),
        locator: locator(id).into(),
        status: Status::Failed,
        summary: String::new(),
        strictness: None,
        details: Vec::new(),
        elapsed_ms: 0,
        certificates: Vec::new(),
        verdicts: Vec::new(),
        forge: None,
        scan: Vec::new(),
    }
    .timed(start)
}

impl ClaimResult {
    fn timed(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }

    fn fail(mut self, summary: impl Into<String>) -> Self {
        self.status = Status::Failed;
        self.summary = summary.into();
        self
    }

    fn with_cert(mut self, c: Certificate) -> Self {
        self.status = if c.tail { Status::Certified } else { Status::FiniteVerified };
        self.strictness = Some(Strictness::Strict);
        self.details.push(format!(
            "{:?} {:?} from {}; hypotheses from {}; tail claim: {}",
            c.claim.property, c.method, c.conclusion_from, c.hypotheses_from, c.tail
        ));
        self.details.extend(c.finite_checks.iter().map(verdict_line));
        self.details.extend(c.notes.iter().cloned());
        self.certificates.push(c);
        self
    }

    fn with_verdict(mut self, v: RangeVerdict) -> Self {
        self.details.push(verdict_line(&v));
        self.verdicts.push(v);
        self
    }
}

fn verdict_line(v: &RangeVerdict) -> String {
    match v.first_failure {
        None => format!("{} holds on middle indices [{}, {}] ({:?})", v.predicate, v.start, v.end, v.strictness),
        Some(at) => format!("{} fails at middle index {at} within [{}, {}]", v.predicate, v.start, v.end),
    }
}

fn cache(name: &str) -> TermCache {
    TermCache::new(builtin(name, 1).expect("builtin sequence"))
}

fn bound(src: &str) -> RatFun<QuadNum> {
    parse_ratfun(src).expect("builtin bound")
}

fn run_group(g: &str) -> Vec<ClaimResult> {
    match g {
        "motzkin" => three_term_group("motzkin", Theorem::Pos(MOTZKIN_G), 11, 6, 1),
        "fine" => three_term_group("fine", Theorem::Pos(FINE_G), 5, 7, 2),
        "delannoy" => three_term_group("delannoy", Theorem::Neg(DELANNOY_H), 0, 2, 1),
        "polyhex" => three_term_group("polyhex", Theorem::Neg(POLYHEX_H), 5, 2, 1),
        "domb" => three_term_group("domb", Theorem::Neg(DOMB_H), 22, 2, 1),
        "derangement" => derangement_group(),
        _ if g.starts_with("harmonic.m") => harmonic_group(g[10..].parse().unwrap_or(0)),
        _ if g.starts_with("order5.") => vec![order5(&g[7..])],
        _ if g.starts_with("forge.") => vec![forge_claim(&g[6..])],
        _ if g.starts_with("scan.") => vec![scan_claim(&g[5..])],
        _ => Vec::new(),
    }
}

enum Theorem {
    Pos(&'static str),
    Neg(&'static str),
}

/// Ratio certificate from theorem threshold `n0`, stitched with an exact check
/// from middle index `m`; then the root criterion from `k`.
fn three_term_group(name: &str, thm: Theorem, n0: i64, m: i64, k: i64) -> Vec<ClaimResult> {
    let mut c = cache(name);
    let t = Instant::now();
    let ratio_id = format!("{name}.ratio_logconcave");
    let cert = match thm {
        Theorem::Pos(g) => certify::certify_ratio_logconcave_pos(&mut c, &bound(g), n0),
        Theorem::Neg(h) => certify::certify_ratio_logconcave_neg(&mut c, &bound(h), n0, None),
    }
    .and_then(|cert| certify::stitch(&mut c, cert, m));
    let bound_text = match thm {
        Theorem::Pos(g) => format!("lower bound g(n) = {g}"),
        Theorem::Neg(h) => format!("upper bound h(n) = {h}, floor 3u(n)/4"),
    };
    let ratio = match cert {
        Ok(cert) => {
            let from = cert.conclusion_from;
            let mut r = result(&ratio_id, t).with_cert(cert.clone());
            r.summary = format!("ratio log-concave for n >= {from}");
            r.details.insert(0, format!("{bound_text}; theorem threshold {n0}, lemmas from {}", n0 + 2));
            Ok((r.timed(t), cert))
        }
        Err(e) => Err(result(&ratio_id, t).fail(format!("ratio certificate failed: {e}"))),
    };

    let t = Instant::now();
    let root_id = format!("{name}.root_logconcave");
    let root = match &ratio {
        Ok((_, cert)) => {
            let ev = RatioEvidence::Certificate(Box::new(cert.clone()));
            root_claim(&mut c, &root_id, k, Direction::Concave, ev, t)
        }
        Err(_) => result(&root_id, t).fail("no ratio evidence"),
    };
    let ratio = match ratio {
        Ok((r, _)) => r,
        Err(r) => r,
    };
    vec![ratio, root]
}

fn root_claim(c: &mut TermCache, id: &str, k: i64, dir: Direction, ev: RatioEvidence, t: Instant) -> ClaimResult {
    let mut r = match certify::certify_root(c, k, dir, ev, ROOT_END) {
        Ok(cert) => {
            let mut r = result(id, t).with_cert(cert);
            r.summary = format!("n-th root strictly log-{} for n >= {k}", dir.name());
            r
        }
        Err(e) => result(id, t).fail(format!("root criterion failed: {e}")),
    };
    // Fine's criterion starts at k = 2 (f_1 = 0); the exact check still covers middle 2
    if c.spec().name == "fine" && r.status != Status::Failed {
        match logcheck::check_root(c, 2, ROOT_END, dir, Strictness::Strict) {
            Ok(v) if v.holds => r = r.with_verdict(v),
            Ok(v) => r = r.with_verdict(v).fail("exact root check fails"),
            Err(e) => r = r.fail(format!("exact root check: {e}")),
        }
    }
    r.timed(t)
}

fn derangement_group() -> Vec<ClaimResult> {
    let mut c = cache("derangement");
    let end = DERANGEMENT_END;
    let mut out = Vec::new();

    let t = Instant::now();
    let r = result("derangement.lower_bound", t);
    let first_bad = (5..=end).find(|&n| match c.term(n) {
        Ok(d) => d <= int(5 * (n + 3)),
        Err(_) => true,
    });
    out.push(match first_bad {
        None => {
            let mut r = r;
            r.status = Status::FiniteVerified;
            r.summary = format!("D_n > 5(n+3) for 5 <= n <= {end}");
            r.details.push("exact comparison at every index".into());
            r.timed(t)
        }
        Some(n) => r.fail(format!("D_n > 5(n+3) fails at n = {n}")).timed(t),
    });

    let t = Instant::now();
    let r = result("derangement.logconvex", t);
    out.push(match logcheck::check_terms(&mut c, 3, end - 1, Direction::Convex, Strictness::Strict) {
        Ok(v) if v.holds => {
            let mut r = r.with_verdict(v);
            r.status = Status::FiniteVerified;
            r.strictness = Some(Strictness::Strict);
            r.summary = format!("{{D_n}} strictly log-convex on [2, {end}]");
            r.timed(t)
        }
        Ok(v) => r.with_verdict(v).fail("log-convexity fails").timed(t),
        Err(e) => r.fail(e.to_string()).timed(t),
    });

    let t = Instant::now();
    let r = result("derangement.ratio_logconcave", t);
    let full = logcheck::check_ratio_logconcave(&mut c, 4, end - 1, true);
    let tail = logcheck::check_ratio_logconcave(&mut c, 6, end - 1, true);
    out.push(match (&full, &tail) {
        (Ok(v), _) if v.holds => {
            let mut r = r.with_verdict(v.clone());
            r.status = Status::FiniteVerified;
            r.summary = format!("{{D_n}}_{{n>=2}} ratio log-concave on [2, {end}]");
            r.timed(t)
        }
        (Ok(v), Ok(w)) => {
            let mut r = r.with_verdict(v.clone()).with_verdict(w.clone());
            r.strictness = Some(Strictness::Strict);
            r = r.fail(format!(
                "{{D_n}}_{{n>=2}} is not ratio log-concave: the inequality fails at middle index {}",
                v.first_failure.unwrap_or(0)
            ));
            if let Ok(line) = derangement_counterexample(&mut c, 5) {
                r.details.push(line);
            }
            r.timed(t)
        }
        (Err(e), _) | (_, Err(e)) => r.fail(e.to_string()).timed(t),
    });

    let t = Instant::now();
    out.push(match tail {
        Ok(v) => root_claim(&mut c, "derangement.root_logconcave", 3, Direction::Concave, RatioEvidence::Finite(v), t),
        Err(e) => result("derangement.root_logconcave", t).fail(e.to_string()),
    });
    out
}

/// `a_n³a_{n−2}` against `a_{n+1}a_{n−1}³` at middle index `n`, as text.
fn derangement_counterexample(c: &mut TermCache, n: i64) -> Result<String, crate::sequences::SeqError> {
    let t: Vec<Rational> = c.range(n - 2, n + 1)?;
    let lhs = &t[2] * &t[2] * &t[2] * &t[0];
    let rhs = &t[3] * &t[1] * &t[1] * &t[1];
    Ok(format!("counterexample at n = {n}: D_n^3 D_(n-2) = {lhs} < D_(n+1) D_(n-1)^3 = {rhs}"))
}

fn harmonic_group(m: u32) -> Vec<ClaimResult> {
    let mut c = TermCache::new(builtin("harmonic", m).expect("harmonic"));
    let ratio_id = format!("harmonic.m{m}.ratio_logconvex");
    let root_id = format!("harmonic.m{m}.root_logconvex");
    let t = Instant::now();
    let v = logcheck::check_ratio_logconvex(&mut c, 3, HARMONIC_END, true);
    let (ratio, ev) = match v {
        Ok(v) if v.holds => {
            let mut r = result(&ratio_id, t).with_verdict(v.clone());
            r.status = Status::FiniteVerified;
            r.strictness = Some(Strictness::Strict);
            r.summary = "H_(n+2)H_n/H_(n+1)^2 strictly increasing for 1 <= n <= 1000".into();
            (r.timed(t), Some(v))
        }
        Ok(v) => (result(&ratio_id, t).with_verdict(v).fail("ratio log-convexity fails"), None),
        Err(e) => (result(&ratio_id, t).fail(e.to_string()), None),
    };
    let t = Instant::now();
    let root = match ev {
        Some(v) => root_claim(&mut c, &root_id, 3, Direction::Convex, RatioEvidence::Finite(v), t),
        None => result(&root_id, t).fail("no ratio evidence"),
    };
    vec![ratio, root]
}

fn order5(name: &str) -> ClaimResult {
    let id = format!("order5.{name}");
    let t = Instant::now();
    let r = result(&id, t);
    match logcheck::check_order_k(&mut cache(name), 5, 1, 80, false) {
        Ok(vs) => {
            let ok = vs.iter().all(|v| v.holds);
            let mut r = vs.into_iter().fold(r, ClaimResult::with_verdict);
            r.strictness = Some(Strictness::Weak);
            if ok {
                r.status = Status::FiniteVerified;
                r.summary = "log-monotonic of order 5 on [1, 80]".into();
                r.timed(t)
            } else {
                r.fail("order-5 log-monotonicity fails").timed(t)
            }
        }
        Err(e) => r.fail(e.to_string()).timed(t),
    }
}

/// The expected first correction, where one is known.
fn expected_x1(name: &str) -> Option<QuadNum> {
    match name {
        "motzkin" => Some(QuadNum::from_rational(Rational::new((-9).into(), 16.into()))),
        "delannoy" => QuadNum::new(int(0), Rational::new((-1).into(), 32.into()), 2).ok(),
        _ => None,
    }
}

fn forge_kind(name: &str) -> BoundKind {
    match name {
        "motzkin" | "fine" => BoundKind::Lower,
        _ => BoundKind::Upper,
    }
}

fn forge_claim(name: &str) -> ClaimResult {
    let id = format!("forge.{name}");
    let t = Instant::now();
    let r = result(&id, t);
    let spec = builtin(name, 1).expect("builtin");
    let kind = forge_kind(name);
    let out = match boundforge::forge(&spec, kind, FORGE_DEPTH) {
        Ok(o) => o,
        Err(b) => {
            let (e, trace) = *b;
            let mut r = r.fail(format!("forge failed: {e}"));
            r.forge = Some(trace);
            return r.timed(t);
        }
    };
    let mut r = r.with_cert(out.certificate.clone());
    let at = out.trace.validated_from.map_or("unknown".to_string(), |n| n.to_string());
    r.details.insert(0, format!("final bound {} validated from theorem threshold {at}", out.bound));
    let x1 = out.trace.corrections.first().map(|c| c.chosen.clone());
    if let Some(want) = expected_x1(name) {
        match &x1 {
            Some(x) if *x == want => r.details.push(format!("x1 = {x} as expected")),
            other => {
                let got = other.as_ref().map_or("none".to_string(), |x| x.to_string());
                r = r.fail(format!("x1 = {got}, expected {want}"));
            }
        }
    }
    if let Some(f) = &out.trace.fallback {
        r.details.push(format!(
            "coefficient search around {} chose offsets {} (eighths) after {} candidates",
            f.candidate,
            f.chosen.map_or("none".to_string(), |(i, j)| format!("({i}, {j})")),
            f.tried
        ));
    }
    if name == "domb" {
        let computed = out.trace.fallback.as_ref().map(|f| f.candidate.to_string()).unwrap_or_default();
        r.details.push(format!(
            "discrepancy: reference intermediate s(n) = {DOMB_S_REFERENCE}, computed (u + S/n^3)/2 = {computed}; only final bounds are validated"
        ));
        let reference = bound(DOMB_H);
        let mut c = cache("domb");
        match certify::certify_ratio_logconcave_neg(&mut c, &reference, 22, None) {
            Ok(_) => r.details.push(format!("reference final h(n) = {DOMB_H} certified from theorem threshold 22")),
            Err(e) => r = r.fail(format!("reference final h(n) does not certify: {e}")),
        }
    }
    if r.status != Status::Failed {
        r.summary = match x1 {
            Some(x) => format!("{kind:?} bound forged, x1 = {x}"),
            None => format!("{kind:?} bound forged"),
        };
    }
    r.forge = Some(out.trace);
    r.timed(t)
}

fn scan_claim(name: &str) -> ClaimResult {
    let id = format!("scan.{name}");
    let t = Instant::now();
    let r = result(&id, t);
    let (k_max, horizon) = (3, 200);
    match logcheck::scan_almost_order(&mut cache(name), k_max, horizon) {
        Ok(rows) => {
            let mut r = r;
            r.status = Status::Empirical;
            r.strictness = Some(Strictness::Weak);
            r.summary = format!("empirical only: R^r behavior for r < {k_max} up to n = {horizon}");
            for row in &rows {
                r.details.push(format!(
                    "R^{} log-{} from index {} through {}",
                    row.r,
                    row.direction.name(),
                    row.holds_from,
                    row.checked_to
                ));
            }
            r.scan = rows;
            r.timed(t)
        }
        Err(e) => r.fail(e.to_string()).timed(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_unique_and_grouped() {
        let mut ids: Vec<_> = SUITE.iter().map(|(i, _)| *i).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), SUITE.len());
        assert_eq!(select(Some("domb")), vec!["domb.ratio_logconcave", "domb.root_logconcave"]);
        assert_eq!(select(Some("harmonic")).len(), 8);
        assert_eq!(select(Some("forge.fine")), vec!["forge.fine"]);
        assert_eq!(group_of("harmonic.m3.root_logconvex"), "harmonic.m3");
        assert_eq!(group_of("scan.bell"), "scan.bell");
    }

    #[test]
    fn domb_only() {
        let claims = run(Some("domb"));
        assert_eq!(claims.len(), 2);
        assert!(claims.iter().all(|c| c.status == Status::Certified), "{claims:#?}");
        let report = Report::new(claims, "t");
        let js = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<Report>(&js).unwrap(), report);
        assert!(report.to_markdown().contains("| `domb.root_logconcave` | certified |"));
    }

    #[test]
    fn scans_are_empirical() {
        let c = run(Some("scan.bell"));
        assert_eq!(c[0].status, Status::Empirical);
        assert_eq!(c[0].scan.len(), 3);
    }
}
