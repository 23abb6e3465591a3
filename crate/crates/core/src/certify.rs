//! Theorem appliers. Each combines exact finite checks with polynomial
//! positivity certificates and returns a re-checkable [`Certificate`].
//!
//! Index bookkeeping: "{a_n}_{n≥N} is ratio log-concave" means
//! `a_n³a_{n−2} > a_{n+1}a_{n−1}³` for every `n ≥ N + 2`, so hypotheses of the
//! three-term criteria are certified from `N + 2` and the conclusion is
//! recorded from `N`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{cmp_power_products, ExactError, ExpGuard, QuadNum, Rational, Sign};
use crate::logcheck::{self, CheckError, Direction, RangeVerdict, Strictness};
use crate::ratfun::{certify_positive, positivity_threshold, PositivityCertificate, PositivityError, RatFun, RatFunError};
use crate::sequences::{SeqError, TermCache};

type Q = QuadNum;
type RF = RatFun<QuadNum>;

/// Terms checked when the floor induction step cannot be certified.
pub const FLOOR_FINITE_HORIZON: i64 = 500;
/// Largest threshold tried by the threshold finders.
pub const MAX_SEARCH_N: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("{0} is not a three-term recurrence a_n = u(n)a_(n-1) + v(n)a_(n-2)")]
    NotThreeTerm(String),
    #[error("sign gate: expected {expected} for n >= 2 ({detail})")]
    SignGate { expected: String, detail: String },
    #[error("condition {condition} refuted at n = {at} (value {value})")]
    Refuted { condition: String, at: i64, value: String },
    #[error("condition {condition} has a pole at n = {at}")]
    Pole { condition: String, at: i64 },
    #[error("base case {label} fails at n = {index}: {lhs} vs {rhs}")]
    BaseCase { label: String, index: i64, lhs: String, rhs: String },
    #[error("initial condition fails at k = {k} ({direction:?})")]
    InitialCondition { k: i64, direction: Direction },
    #[error("ratio evidence does not support the claim: {0}")]
    MissingRatioEvidence(String),
    #[error("threshold must be at least {min}, got {got}")]
    BadThreshold { min: i64, got: i64 },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl CertifyError {
    /// Index of a refutation, if the error names one.
    pub fn index(&self) -> Option<i64> {
        match self {
            CertifyError::Refuted { at, .. } | CertifyError::Pole { at, .. } => Some(*at),
            CertifyError::BaseCase { index, .. } => Some(*index),
            CertifyError::InitialCondition { k, .. } => Some(*k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    RatioLogconcave,
    RatioLogconvex,
    LowerBound,
    UpperBound,
    FloorBound,
    RootLogconcave,
    RootLogconvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Three-term criterion with `v(n) > 0` and a lower bound `g`.
    ThreeTermPositive,
    /// Three-term criterion with `v(n) < 0`, floor `3u/4` and upper bound `h`.
    ThreeTermNegative,
    LowerBoundLemma,
    UpperBoundLemma,
    FloorInduction,
    /// Floor checked term by term on a finite range only.
    FloorFinite,
    RootCriterionConcave,
    RootCriterionConvex,
    /// A symbolic certificate joined with a finite prefix check.
    Stitched,
    /// Exact finite checks only.
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub sequence: String,
    pub property: Property,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<RF>,
    /// For ratio and root properties the claim is about `{a_n}_{n≥from}`;
    /// for bounds it is the first `n` at which the bound holds.
    pub from: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn accepts(self, ord: Ordering) -> bool {
        match self {
            Relation::Lt => ord == Ordering::Less,
            Relation::Le => ord != Ordering::Greater,
            Relation::Gt => ord == Ordering::Greater,
            Relation::Ge => ord != Ordering::Less,
        }
    }
}

/// `base^exp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Power {
    pub base: Q,
    pub exp: u64,
}

/// An exact comparison `∏ lhs  relation  ∏ rhs` evaluated at `index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseCase {
    pub label: String,
    pub index: i64,
    pub lhs: Vec<Power>,
    pub relation: Relation,
    pub rhs: Vec<Power>,
    pub holds: bool,
}

impl BaseCase {
    fn scalar(label: &str, index: i64, lhs: Q, relation: Relation, rhs: Q) -> Result<Self, CertifyError> {
        let mut b = BaseCase {
            label: label.into(),
            index,
            lhs: vec![Power { base: lhs, exp: 1 }],
            relation,
            rhs: vec![Power { base: rhs, exp: 1 }],
            holds: false,
        };
        b.holds = b.evaluate()?;
        Ok(b)
    }

    /// Recompute the relation from the stored values.
    pub fn evaluate(&self) -> Result<bool, CertifyError> {
        let ord = match (self.lhs.as_slice(), self.rhs.as_slice()) {
            ([l], [r]) if l.exp == 1 && r.exp == 1 => l.base.checked_cmp(&r.base)?,
            _ => {
                let side = |ps: &[Power]| -> Result<Vec<(Rational, u64)>, CertifyError> {
                    ps.iter()
                        .map(|p| {
                            p.base
                                .to_rational()
                                .map(|r| (r, p.exp))
                                .ok_or_else(|| CertifyError::Exact(ExactError::BadRadicand(p.base.radicand())))
                        })
                        .collect()
                };
                cmp_power_products(&side(&self.lhs)?, &side(&self.rhs)?, ExpGuard::from_env())?
            }
        };
        Ok(self.relation.accepts(ord))
    }

    fn require(self) -> Result<Self, CertifyError> {
        if self.holds {
            return Ok(self);
        }
        let show = |ps: &[Power]| {
            ps.iter()
                .map(|p| if p.exp == 1 { p.base.to_string() } else { format!("({})^{}", p.base, p.exp) })
                .collect::<Vec<_>>()
                .join("*")
        };
        Err(CertifyError::BaseCase {
            label: self.label.clone(),
            index: self.index,
            lhs: show(&self.lhs),
            rhs: show(&self.rhs),
        })
    }
}

/// A positivity certificate for a named condition, or the record that the
/// condition's expression is identically zero (accepted for `≥ 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPositivity {
    pub condition: String,
    pub from: i64,
    pub expression: RF,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PositivityCertificate<Q>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: Claim,
    pub method: Method,
    pub hypotheses_from: i64,
    pub conclusion_from: i64,
    /// True when the claim covers every index from `conclusion_from` on;
    /// false when only the finite checks back it.
    pub tail: bool,
    pub finite_checks: Vec<RangeVerdict>,
    pub positivity: Vec<NamedPositivity>,
    pub base_cases: Vec<BaseCase>,
    pub lemmas: Vec<Certificate>,
    pub notes: Vec<String>,
}

impl Certificate {
    /// Re-verify every component: positivity witnesses are recomputed from
    /// their targets, base cases re-evaluated, finite verdicts must hold.
    pub fn recheck(&self) -> Result<(), String> {
        for p in &self.positivity {
            match &p.certificate {
                Some(c) => {
                    if c.target != p.expression || c.threshold != p.from {
                        return Err(format!("{}: certificate does not match its condition", p.condition));
                    }
                    c.recheck().map_err(|e| format!("{}: {e}", p.condition))?;
                }
                None if p.expression.is_zero() => {}
                None => return Err(format!("{}: missing certificate", p.condition)),
            }
        }
        for b in &self.base_cases {
            if !b.holds || !b.evaluate().map_err(|e| e.to_string())? {
                return Err(format!("base case {} at {} does not hold", b.label, b.index));
            }
        }
        if let Some(v) = self.finite_checks.iter().find(|v| !v.holds) {
            return Err(format!("finite check {} on [{}, {}] fails", v.predicate, v.start, v.end));
        }
        self.lemmas.iter().try_for_each(Certificate::recheck)
    }

    /// Every symbolic and finite component, flattened.
    pub fn all_positivity(&self) -> Vec<&NamedPositivity> {
        let mut out: Vec<_> = self.positivity.iter().collect();
        for l in &self.lemmas {
            out.extend(l.all_positivity());
        }
        out
    }

    pub fn find_lemma(&self, property: Property) -> Option<&Certificate> {
        if self.claim.property == property {
            return Some(self);
        }
        self.lemmas.iter().find_map(|l| l.find_lemma(property))
    }
}

fn positive(condition: &str, f: &RF, from: i64) -> Result<NamedPositivity, CertifyError> {
    match certify_positive(f, from) {
        Ok(c) => Ok(NamedPositivity {
            condition: condition.into(),
            from,
            expression: f.clone(),
            certificate: Some(c),
        }),
        Err(PositivityError::Pole { at }) => Err(CertifyError::Pole { condition: condition.into(), at }),
        Err(PositivityError::Refuted { at, value }) => Err(CertifyError::Refuted {
            condition: condition.into(),
            at,
            value,
        }),
        Err(PositivityError::InvalidWitness(w)) => Err(CertifyError::Refuted {
            condition: condition.into(),
            at: from,
            value: w,
        }),
    }
}

fn nonnegative(condition: &str, f: &RF, from: i64) -> Result<NamedPositivity, CertifyError> {
    if f.is_zero() {
        return Ok(NamedPositivity {
            condition: condition.into(),
            from,
            expression: f.clone(),
            certificate: None,
        });
    }
    positive(condition, f, from)
}

fn three_term(cache: &TermCache) -> Result<(RF, RF), CertifyError> {
    let spec = cache.spec();
    spec.three_term()
        .map(|(u, v)| (u.to_quad(), v.to_quad()))
        .ok_or_else(|| CertifyError::NotThreeTerm(spec.name.clone()))
}

/// `v(n) > 0` (or `< 0`) for every `n ≥ 2`. A zero at `n = 2` alone is
/// tolerated (the gate is then certified from 3): every use of `v` in the
/// lemmas is at an index of at least 3.
fn sign_gate(v: &RF, want: Sign) -> Result<NamedPositivity, CertifyError> {
    let (name, target) = match want {
        Sign::Positive => ("v(n) > 0", v.clone()),
        _ => ("v(n) < 0", -v.clone()),
    };
    let from = match v.eval(2) {
        Ok(x) if x.sign() == Sign::Zero => 3,
        _ => 2,
    };
    positive(name, &target, from).map_err(|e| CertifyError::SignGate {
        expected: name.into(),
        detail: e.to_string(),
    })
}

/// Sign of `v(n)` for `n ≥ 2`, if it is definite (a zero at `n = 2` aside).
pub fn v_sign(cache: &TermCache) -> Option<Sign> {
    let (_, v) = three_term(cache).ok()?;
    if sign_gate(&v, Sign::Positive).is_ok() {
        Some(Sign::Positive)
    } else if sign_gate(&v, Sign::Negative).is_ok() {
        Some(Sign::Negative)
    } else {
        None
    }
}

fn quad_ratio(cache: &mut TermCache, n: i64) -> Result<Q, CertifyError> {
    Ok(Q::from_rational(cache.ratio(n)?))
}

fn div(a: &RF, b: &RF) -> Result<RF, CertifyError> {
    Ok(a.checked_div(b)?)
}

/// `x⁴ − u(n)x³ − u(n+1)v(n)x − v(n)v(n+1)` at `x = b(n)`.
pub fn quartic(b: &RF, u: &RF, v: &RF) -> RF {
    let (u1, v1) = (u.shift(1), v.shift(1));
    &(&(&b.pow(4) - &(u * &b.pow(3))) - &(&(&u1 * v) * b)) - &(v * &v1)
}

/// Step expression of the lower-bound lemma:
/// `v(n+1)/(g(n+1) − u(n+1)) − u(n) − v(n)/g(n−1)`.
pub fn lower_step(g: &RF, u: &RF, v: &RF) -> Result<RF, CertifyError> {
    let upper = div(&v.shift(1), &(&g.shift(1) - &u.shift(1)))?;
    Ok(&(&upper - u) - &div(v, &g.shift(-1))?)
}

/// Step expression of the upper-bound lemma: `h(n+1) − u(n+1) − v(n+1)/h(n)`.
pub fn upper_step(h: &RF, u: &RF, v: &RF) -> Result<RF, CertifyError> {
    Ok(&(&h.shift(1) - &u.shift(1)) - &div(&v.shift(1), h)?)
}

/// Step expression of the floor induction: `u(n+1) + v(n+1)/L(n) − L(n+1)`.
pub fn floor_step(l: &RF, u: &RF, v: &RF) -> Result<RF, CertifyError> {
    Ok(&(&u.shift(1) + &div(&v.shift(1), l)?) - &l.shift(1))
}

fn bare(claim: Claim, method: Method, hyp: i64) -> Certificate {
    Certificate {
        conclusion_from: claim.from,
        claim,
        method,
        hypotheses_from: hyp,
        tail: true,
        finite_checks: Vec::new(),
        positivity: Vec::new(),
        base_cases: Vec::new(),
        lemmas: Vec::new(),
        notes: Vec::new(),
    }
}

fn claim(cache: &TermCache, property: Property, bound: Option<&RF>, from: i64) -> Claim {
    Claim {
        sequence: cache.spec().name.clone(),
        property,
        bound: bound.cloned(),
        from,
    }
}

/// `g(n) < a_n/a_{n−1} < v(n+1)/(g(n+1) − u(n+1))` for all `n ≥ N`, for a
/// three-term recurrence with `v(n) > 0`.
pub fn certify_lower_bound(cache: &mut TermCache, g: &RF, n0: i64) -> Result<Certificate, CertifyError> {
    if n0 < 1 {
        return Err(CertifyError::BadThreshold { min: 1, got: n0 });
    }
    let (u, v) = three_term(cache)?;
    let gate = sign_gate(&v, Sign::Positive)?;
    let gap = &g.shift(1) - &u.shift(1);
    let gap_cert = positive("g(n+1) - u(n+1) > 0", &gap, n0)?;
    let g_cert = positive("g(n) > 0", g, n0)?;

    let r = quad_ratio(cache, n0)?;
    let upper_at = v.eval(n0 + 1)?.checked_div(&gap.eval(n0)?)?;
    let lo = BaseCase::scalar("g(N) < a_N/a_(N-1)", n0, g.eval(n0)?, Relation::Lt, r.clone())?.require()?;
    let hi = BaseCase::scalar("a_N/a_(N-1) < v(N+1)/(g(N+1)-u(N+1))", n0, r, Relation::Lt, upper_at)?.require()?;

    let step = positive(
        "u(n) + v(n)/g(n-1) < v(n+1)/(g(n+1)-u(n+1))",
        &lower_step(g, &u, &v)?,
        n0,
    )?;
    let mut c = bare(claim(cache, Property::LowerBound, Some(g), n0), Method::LowerBoundLemma, n0);
    c.positivity = vec![gate, gap_cert, g_cert, step];
    c.base_cases = vec![lo, hi];
    Ok(c)
}

/// Ratio log-concavity of `{a_n}_{n≥N}` when `v(n) > 0`, from a lower bound
/// `g` whose conditions hold for `n ≥ N + 2`.
pub fn certify_ratio_logconcave_pos(cache: &mut TermCache, g: &RF, n0: i64) -> Result<Certificate, CertifyError> {
    if n0 < 0 {
        return Err(CertifyError::BadThreshold { min: 0, got: n0 });
    }
    let (u, v) = three_term(cache)?;
    let gate = sign_gate(&v, Sign::Positive)?;
    let hyp = n0 + 2;
    let mut pos = vec![gate];
    pos.push(positive("u(n) > 0", &u, hyp)?);
    pos.push(positive("v(n) > 0", &v, hyp)?);
    pos.push(positive("u(n)^3 - u(n+1)v(n) > 0", &(&u.pow(3) - &(&u.shift(1) * &v)), hyp)?);
    pos.push(positive("condition (ii)", &quartic(g, &u, &v), hyp)?);
    pos.push(nonnegative("g(n) - u(n) >= 0", &(g - &u), hyp)?);
    let lemma = certify_lower_bound(cache, g, hyp)?;

    let mut c = bare(claim(cache, Property::RatioLogconcave, Some(g), n0), Method::ThreeTermPositive, hyp);
    c.positivity = pos;
    c.lemmas = vec![lemma];
    c.finite_checks = vec![logcheck::check_ratio_logconcave(cache, hyp, hyp + 10, true)?];
    Ok(c)
}

/// `a_n/a_{n−1} < h(n)` for all `n ≥ N`, for a three-term recurrence with
/// `v(n) < 0`.
pub fn certify_upper_bound(cache: &mut TermCache, h: &RF, n0: i64) -> Result<Certificate, CertifyError> {
    if n0 < 1 {
        return Err(CertifyError::BadThreshold { min: 1, got: n0 });
    }
    let (u, v) = three_term(cache)?;
    let gate = sign_gate(&v, Sign::Negative)?;
    let h_cert = positive("h(n) > 0", h, n0)?;
    let r = quad_ratio(cache, n0)?;
    let base = BaseCase::scalar("a_N/a_(N-1) < h(N)", n0, r, Relation::Lt, h.eval(n0)?)?.require()?;
    let step = positive("h(n+1) > u(n+1) + v(n+1)/h(n)", &upper_step(h, &u, &v)?, n0)?;
    let mut c = bare(claim(cache, Property::UpperBound, Some(h), n0), Method::UpperBoundLemma, n0);
    c.positivity = vec![gate, h_cert, step];
    c.base_cases = vec![base];
    Ok(c)
}

/// The default floor `3u(n)/4`.
pub fn default_floor(cache: &TermCache) -> Result<RF, CertifyError> {
    let (u, _) = three_term(cache)?;
    Ok(u.scale(&Q::from_rational(Rational::new(3.into(), 4.into()))))
}

/// `a_n/a_{n−1} ≥ L(n)` for `n ≥ N` by induction when `v(n) < 0`: the next
/// ratio `u(n+1) + v(n+1)/r` increases with `r`. If the induction step cannot
/// be certified, falls back to a term-by-term check on
/// `[N, N + FLOOR_FINITE_HORIZON]` with no claim beyond it.
pub fn certify_floor_bound(cache: &mut TermCache, l: &RF, n0: i64) -> Result<Certificate, CertifyError> {
    if n0 < 1 {
        return Err(CertifyError::BadThreshold { min: 1, got: n0 });
    }
    let (u, v) = three_term(cache)?;
    let gate = sign_gate(&v, Sign::Negative)?;
    let r = quad_ratio(cache, n0)?;
    let base = BaseCase::scalar("a_N/a_(N-1) >= L(N)", n0, r, Relation::Ge, l.eval(n0)?)?.require()?;
    let mut c = bare(claim(cache, Property::FloorBound, Some(l), n0), Method::FloorInduction, n0);
    c.base_cases = vec![base];
    let inductive = positive("L(n) > 0", l, n0)
        .and_then(|lp| Ok((lp, positive("u(n+1) + v(n+1)/L(n) > L(n+1)", &floor_step(l, &u, &v)?, n0)?)));
    match inductive {
        Ok((lp, step)) => c.positivity = vec![gate, lp, step],
        Err(e @ (CertifyError::Refuted { .. } | CertifyError::Pole { .. })) => {
            let end = n0 + FLOOR_FINITE_HORIZON;
            cache.warm(end)?;
            let terms: &TermCache = cache;
            let bad = logcheck::first_bad(n0, end, |n| -> Result<bool, CertifyError> {
                let (a, b) = (terms.get(n).cloned(), terms.get(n - 1).cloned());
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(CertifyError::Seq(SeqError::BelowRange { n: n - 1, first: terms.first_index() }));
                };
                let r = Q::from_rational(a / b);
                Ok(r.checked_cmp(&l.eval(n)?)? != Ordering::Less)
            })?;
            c.method = Method::FloorFinite;
            c.tail = false;
            c.positivity = vec![gate];
            c.finite_checks = vec![RangeVerdict {
                predicate: "a_n/a_(n-1) >= L(n)".into(),
                start: n0,
                end,
                holds: bad.is_none(),
                first_failure: bad,
                strictness: Strictness::Weak,
            }];
            c.notes.push(format!("induction step not certified ({e}); finite check only"));
            if let Some(at) = bad {
                return Err(CertifyError::Refuted {
                    condition: "a_n/a_(n-1) >= L(n)".into(),
                    at,
                    value: quad_ratio(cache, at)?.to_string(),
                });
            }
        }
        Err(e) => return Err(e),
    }
    Ok(c)
}

/// Ratio log-concavity of `{a_n}_{n≥N}` when `v(n) < 0`, from the floor
/// (default `3u/4`), an upper bound `h`, and negativity of the quartic at `h`,
/// all for `n ≥ N + 2`.
pub fn certify_ratio_logconcave_neg(
    cache: &mut TermCache,
    h: &RF,
    n0: i64,
    floor: Option<&RF>,
) -> Result<Certificate, CertifyError> {
    if n0 < 0 {
        return Err(CertifyError::BadThreshold { min: 0, got: n0 });
    }
    let (u, v) = three_term(cache)?;
    let gate = sign_gate(&v, Sign::Negative)?;
    let hyp = n0 + 2;
    let l = match floor {
        Some(l) => l.clone(),
        None => default_floor(cache)?,
    };
    // f'(3u/4) = −u(n+1)v(n) > 0 needs u > 0; f then increases on [3u/4, ∞)
    let mut pos = vec![gate, positive("u(n) > 0", &u, hyp)?];
    pos.push(positive("condition (ii)", &-quartic(h, &u, &v), hyp)?);
    let floor_cert = certify_floor_bound(cache, &l, hyp)?;
    let upper = certify_upper_bound(cache, h, hyp)?;

    let mut c = bare(claim(cache, Property::RatioLogconcave, Some(h), n0), Method::ThreeTermNegative, hyp);
    c.tail = floor_cert.tail;
    if !c.tail {
        c.notes.push("floor bound is finite-only, so the conclusion is finite-verified".into());
    }
    c.positivity = pos;
    c.lemmas = vec![floor_cert, upper];
    c.finite_checks = vec![logcheck::check_ratio_logconcave(cache, hyp, hyp + 10, true)?];
    Ok(c)
}

/// Join a ratio certificate from `N` with an exact finite check on middle
/// indices `[m, N + 1]`; the merged claim is about `{a_n}_{n≥m−2}`. The join is
/// cross-validated on `[m, N + 10]`.
pub fn stitch(cache: &mut TermCache, cert: Certificate, m: i64) -> Result<Certificate, CertifyError> {
    let n0 = cert.conclusion_from;
    let dir = match cert.claim.property {
        Property::RatioLogconcave => Direction::Concave,
        Property::RatioLogconvex => Direction::Convex,
        _ => return Err(CertifyError::MissingRatioEvidence("stitching needs a ratio certificate".into())),
    };
    let mut checks = Vec::new();
    if m <= n0 + 1 {
        let prefix = logcheck::check_ratio(cache, m, n0 + 1, dir, Strictness::Strict)?;
        if let Some(at) = prefix.first_failure {
            return Err(CertifyError::Refuted {
                condition: "finite ratio prefix".into(),
                at,
                value: "inequality fails".into(),
            });
        }
        checks.push(prefix);
    }
    let cross = logcheck::check_ratio(cache, m, n0 + 10, dir, Strictness::Strict)?;
    if let Some(at) = cross.first_failure {
        return Err(CertifyError::Refuted {
            condition: "stitch cross-validation".into(),
            at,
            value: "inequality fails".into(),
        });
    }
    checks.push(cross);
    let from = (m - 2).min(n0);
    let mut c = bare(
        Claim {
            sequence: cert.claim.sequence.clone(),
            property: cert.claim.property,
            bound: None,
            from,
        },
        Method::Stitched,
        cert.hypotheses_from,
    );
    c.tail = cert.tail;
    c.finite_checks = checks;
    c.lemmas = vec![cert];
    Ok(c)
}

/// Evidence that `{a_n}_{n≥k}` is ratio log-concave (or log-convex).
#[derive(Debug, Clone)]
pub enum RatioEvidence {
    Certificate(Box<Certificate>),
    /// A finite check on middle indices; supports a finite-verified claim only.
    Finite(RangeVerdict),
}

/// Strict log-concavity (or convexity) of `{ⁿ√a_n}_{n≥k}` from ratio
/// log-concavity (or convexity) of `{a_n}_{n≥k'}` and the initial condition at
/// `k'`, where `k'` is the first index the ratio evidence covers (at least
/// `k`). An exact root check on middle indices `[k + 1, desk_end]` covers the
/// gap between `k` and `k'` and cross-validates the rest.
pub fn certify_root(
    cache: &mut TermCache,
    k: i64,
    dir: Direction,
    evidence: RatioEvidence,
    desk_end: i64,
) -> Result<Certificate, CertifyError> {
    if k < 1 {
        return Err(CertifyError::BadThreshold { min: 1, got: k });
    }
    let (want, name) = match dir {
        Direction::Concave => (Property::RatioLogconcave, "ratio-logconcave"),
        Direction::Convex => (Property::RatioLogconvex, "ratio-logconvex"),
    };
    let (tail, lemma, finite, from) = match evidence {
        RatioEvidence::Certificate(c) => {
            if c.claim.property != want {
                return Err(CertifyError::MissingRatioEvidence(format!(
                    "need {name}, have {:?}",
                    c.claim.property
                )));
            }
            let from = c.conclusion_from;
            (c.tail, Some(*c), None, from)
        }
        RatioEvidence::Finite(v) => {
            if !v.holds || v.predicate != name {
                return Err(CertifyError::MissingRatioEvidence(format!(
                    "finite verdict {} on [{}, {}] (holds: {})",
                    v.predicate, v.start, v.end, v.holds
                )));
            }
            let from = v.start - 2;
            (false, None, Some(v), from)
        }
    };
    let k_eff = from.max(k);
    if desk_end < k_eff + 1 {
        return Err(CertifyError::MissingRatioEvidence(format!(
            "ratio evidence starts at {k_eff}; the root check must reach middle {}",
            k_eff + 1
        )));
    }
    let mut base_cases = Vec::new();
    for at in if k_eff == k { vec![k] } else { vec![k, k_eff] } {
        let init = initial_condition(cache, at, dir)?;
        if !init.holds {
            return Err(CertifyError::InitialCondition { k: at, direction: dir });
        }
        base_cases.push(init);
    }
    let root = logcheck::check_root(cache, (k + 1).max(2), desk_end, dir, Strictness::Strict)?;
    if let Some(at) = root.first_failure {
        return Err(CertifyError::Refuted {
            condition: format!("root log-{} cross-check", dir.name()),
            at,
            value: "inequality fails".into(),
        });
    }
    let (property, method) = match dir {
        Direction::Concave => (Property::RootLogconcave, Method::RootCriterionConcave),
        Direction::Convex => (Property::RootLogconvex, Method::RootCriterionConvex),
    };
    let mut c = bare(claim(cache, property, None, k), method, k_eff);
    c.tail = tail;
    c.base_cases = base_cases;
    c.finite_checks = finite.into_iter().chain([root]).collect();
    c.lemmas = lemma.into_iter().collect();
    if k_eff > k {
        c.notes.push(format!(
            "ratio evidence starts at {k_eff}; middles {} to {} are covered by the exact root check",
            k + 1,
            k_eff + 1
        ));
    }
    if !tail {
        c.notes.push("ratio evidence is finite, so the conclusion is finite-verified".into());
    }
    Ok(c)
}

/// The root criterion's initial condition at `k` as a base case.
pub fn initial_condition(cache: &mut TermCache, k: i64, dir: Direction) -> Result<BaseCase, CertifyError> {
    let (lhs, rhs) = logcheck::initial_condition_sides(cache, k)?;
    let powers = |side: Vec<(Rational, u64)>| {
        side.into_iter()
            .map(|(b, exp)| Power { base: Q::from_rational(b), exp })
            .collect::<Vec<_>>()
    };
    let mut init = BaseCase {
        label: "initial condition".into(),
        index: k,
        lhs: powers(lhs),
        relation: match dir {
            Direction::Concave => Relation::Gt,
            Direction::Convex => Relation::Lt,
        },
        rhs: powers(rhs),
        holds: false,
    };
    init.holds = init.evaluate()?;
    Ok(init)
}

pub fn certify_root_logconcave(cache: &mut TermCache, k: i64, evidence: RatioEvidence, desk_end: i64) -> Result<Certificate, CertifyError> {
    certify_root(cache, k, Direction::Concave, evidence, desk_end)
}

pub fn certify_root_logconvex(cache: &mut TermCache, k: i64, evidence: RatioEvidence, desk_end: i64) -> Result<Certificate, CertifyError> {
    certify_root(cache, k, Direction::Convex, evidence, desk_end)
}

/// A finite ratio check wrapped as a certificate with no tail claim.
pub fn finite_ratio_certificate(cache: &mut TermCache, from: i64, end: i64, dir: Direction) -> Result<Certificate, CertifyError> {
    let v = logcheck::check_ratio(cache, from + 2, end, dir, Strictness::Strict)?;
    if let Some(at) = v.first_failure {
        return Err(CertifyError::Refuted {
            condition: v.predicate,
            at,
            value: "inequality fails".into(),
        });
    }
    let property = match dir {
        Direction::Concave => Property::RatioLogconcave,
        Direction::Convex => Property::RatioLogconvex,
    };
    let mut c = bare(claim(cache, property, None, from), Method::Finite, from + 2);
    c.tail = false;
    c.finite_checks = vec![v];
    Ok(c)
}

fn max_threshold(conds: &[&RF], from: i64) -> Option<i64> {
    conds.iter().try_fold(from, |acc, f| {
        if f.is_zero() {
            Some(acc)
        } else {
            positivity_threshold(f, from).map(|t| t.max(acc))
        }
    })
}

fn first_base(cache: &mut TermCache, from: i64, ok: impl Fn(&mut TermCache, i64) -> Result<bool, CertifyError>) -> Option<i64> {
    (from..=MAX_SEARCH_N).find(|&n| ok(cache, n).unwrap_or(false))
}

/// Smallest `N` in `[from, MAX_SEARCH_N]` at which [`certify_lower_bound`]
/// succeeds.
pub fn lower_bound_threshold(cache: &mut TermCache, g: &RF, from: i64) -> Option<i64> {
    let (u, v) = three_term(cache).ok()?;
    let gap = &g.shift(1) - &u.shift(1);
    let step = lower_step(g, &u, &v).ok()?;
    let start = max_threshold(&[&gap, g, &step], from.max(1))?;
    let n = first_base(cache, start, |c, n| {
        let r = quad_ratio(c, n)?;
        let upper = v.eval(n + 1)?.checked_div(&gap.eval(n)?)?;
        Ok(g.eval(n)?.checked_cmp(&r)? == Ordering::Less && r.checked_cmp(&upper)? == Ordering::Less)
    })?;
    certify_lower_bound(cache, g, n).ok().map(|_| n)
}

/// Smallest `N` in `[from, MAX_SEARCH_N]` at which [`certify_upper_bound`]
/// succeeds.
pub fn upper_bound_threshold(cache: &mut TermCache, h: &RF, from: i64) -> Option<i64> {
    let (u, v) = three_term(cache).ok()?;
    let step = upper_step(h, &u, &v).ok()?;
    let start = max_threshold(&[h, &step], from.max(1))?;
    let n = first_base(cache, start, |c, n| Ok(quad_ratio(c, n)?.checked_cmp(&h.eval(n)?)? == Ordering::Less))?;
    certify_upper_bound(cache, h, n).ok().map(|_| n)
}

/// Smallest `N` in `[from, MAX_SEARCH_N]` at which the floor induction is
/// certified (finite fallback excluded).
pub fn floor_threshold(cache: &mut TermCache, l: &RF, from: i64) -> Option<i64> {
    let (u, v) = three_term(cache).ok()?;
    let step = floor_step(l, &u, &v).ok()?;
    let start = max_threshold(&[l, &step], from.max(1))?;
    let n = first_base(cache, start, |c, n| Ok(quad_ratio(c, n)?.checked_cmp(&l.eval(n)?)? != Ordering::Less))?;
    certify_floor_bound(cache, l, n).ok().filter(|c| c.tail).map(|_| n)
}

/// Smallest theorem threshold `N ≥ 0` for [`certify_ratio_logconcave_pos`].
pub fn pos_threshold(cache: &mut TermCache, g: &RF) -> Option<i64> {
    let (u, v) = three_term(cache).ok()?;
    let conds = [
        u.clone(),
        v.clone(),
        &u.pow(3) - &(&u.shift(1) * &v),
        quartic(g, &u, &v),
        g - &u,
    ];
    let refs: Vec<&RF> = conds.iter().collect();
    let hyp = max_threshold(&refs, 2)?;
    let lemma = lower_bound_threshold(cache, g, hyp)?;
    let n0 = lemma - 2;
    certify_ratio_logconcave_pos(cache, g, n0).ok().map(|_| n0)
}

/// Smallest theorem threshold `N ≥ 0` for [`certify_ratio_logconcave_neg`]
/// with the default floor.
pub fn neg_threshold(cache: &mut TermCache, h: &RF) -> Option<i64> {
    let (u, v) = three_term(cache).ok()?;
    let conds = [u.clone(), -quartic(h, &u, &v)];
    let refs: Vec<&RF> = conds.iter().collect();
    let mut hyp = max_threshold(&refs, 2)?;
    let l = default_floor(cache).ok()?;
    loop {
        let n = upper_bound_threshold(cache, h, hyp)?;
        if certify_floor_bound(cache, &l, n).is_ok_and(|c| c.tail) {
            let n0 = n - 2;
            return certify_ratio_logconcave_neg(cache, h, n0, None).ok().map(|_| n0);
        }
        if n >= MAX_SEARCH_N {
            return None;
        }
        hyp = n + 1;
    }
}
