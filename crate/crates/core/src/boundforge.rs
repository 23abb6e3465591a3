//! Heuristic discovery of ratio bounds for three-term recurrences.
//!
//! Starting from the larger root `λ(n)` of `λ² − u(n)λ − v(n) = 0`, a
//! rational base bound is built from a polynomial square-root decomposition
//! of the radicand, then refined by corrections `x_k/(d(n)·n^k)` where each
//! `x_k` kills the leading coefficient (in `n`) of the numerator of the
//! lemma's step expression.

use std::cmp::Ordering;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{self, Certificate, CertifyError};
use crate::exactnum::{QuadNum, Rational, Sign};
use crate::ratfun::{exact_sqrt, sqrt_prefix, DecomposeError, Poly, RadicalRatio, RatFun, SqrtMode};
use crate::sequences::{SequenceSpec, TermCache};

type Q = QuadNum;
type RF = RatFun<QuadNum>;
type P = Poly<QuadNum>;

/// Grid radius (in steps of 1/8) of the coefficient-adjustment fallback.
pub const FALLBACK_RADIUS: i64 = 64;
/// Offsets (in steps of 1/8) tried around a root of `H(x)` that fails.
pub const OFFSET_RADIUS: i64 = 64;
/// Sample points of the fallback prefilter.
pub const PREFILTER_AT: [i64; 4] = [64, 128, 1000, 1_000_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `g(n) < a_n/a_{n−1}`, for `v(n) > 0`.
    Lower,
    /// `a_n/a_{n−1} < h(n)`, for `v(n) < 0`.
    Upper,
}

impl BoundKind {
    fn sign(self) -> Sign {
        match self {
            BoundKind::Lower => Sign::Positive,
            BoundKind::Upper => Sign::Negative,
        }
    }

    fn mode(self) -> SqrtMode {
        match self {
            BoundKind::Lower => SqrtMode::Minus,
            BoundKind::Upper => SqrtMode::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "kebab-case")]
pub enum ForgeError {
    #[error("{0} is not a three-term recurrence")]
    NotThreeTerm(String),
    #[error("v(n) {actual} for n >= 2, kind mismatch")]
    KindMismatch { actual: String },
    #[error("denominator of u^2+4v is not a perfect square: {0}")]
    NonSquareDenominator(String),
    #[error("radicand decomposition failed: {0}")]
    Decompose(String),
    #[error("H(x) at step {step} does not involve x: {h}")]
    ConstantLeading { step: usize, h: String },
    #[error("H(x) at step {step} has degree {degree} > 2")]
    HDegree { step: usize, degree: usize },
    #[error("H(x) at step {step} has no root in a quadratic field: {h}")]
    NoRoot { step: usize, h: String },
    #[error("no candidate validated within {depth} correction steps")]
    DepthExhausted { depth: usize },
    #[error("no fallback candidate validated ({tried} tried)")]
    FallbackExhausted { tried: usize },
    #[error("{0}")]
    Certify(String),
}

impl From<CertifyError> for ForgeError {
    fn from(e: CertifyError) -> Self {
        ForgeError::Certify(e.to_string())
    }
}

/// A polynomial in `x` and `n`, stored by powers of `x`: `Σ x^e·c_e(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivarPoly(Vec<P>);

impl BivarPoly {
    pub fn from_n(p: P) -> Self {
        BivarPoly(vec![p])
    }

    /// `x·p(n)`.
    pub fn x_times(p: P) -> Self {
        BivarPoly(vec![P::zero(), p])
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn x_degree(&self) -> usize {
        self.0.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn n_degree(&self) -> Option<usize> {
        self.0.iter().filter_map(|c| c.degree()).max()
    }

    /// Coefficient of `n^k`, as a polynomial in `x`.
    pub fn n_coeff(&self, k: usize) -> P {
        P::new(self.0.iter().map(|c| c.coeff(k)).collect())
    }

    /// The coefficient of the highest power of `n`, as a polynomial in `x`.
    pub fn leading_in_n(&self) -> P {
        self.n_degree().map(|k| self.n_coeff(k)).unwrap_or_else(P::zero)
    }

    pub fn shift(&self, t: i64) -> Self {
        BivarPoly(self.0.iter().map(|c| c.shift(t)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let len = self.0.len().max(o.0.len());
        let get = |v: &Vec<P>, i: usize| v.get(i).cloned().unwrap_or_else(P::zero);
        BivarPoly((0..len).map(|i| &get(&self.0, i) + &get(&o.0, i)).collect()).trim()
    }

    pub fn neg(&self) -> Self {
        BivarPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return BivarPoly(Vec::new());
        }
        let mut out = vec![P::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BivarPoly(out).trim()
    }

    /// Substitute `x = value`.
    pub fn at_x(&self, value: &Q) -> P {
        self.0
            .iter()
            .rev()
            .fold(P::zero(), |acc, c| &(&acc * &P::constant(value.clone())) + c)
    }
}

/// A rational function in `n` with coefficients polynomial in `x`. Kept
/// unreduced: common factors free of `x` only scale the leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct BivarRat {
    pub numer: BivarPoly,
    pub denom: BivarPoly,
}

impl BivarRat {
    pub fn from_rf(f: &RF) -> Self {
        BivarRat {
            numer: BivarPoly::from_n(f.numer().clone()),
            denom: BivarPoly::from_n(f.denom().clone()),
        }
    }

    pub fn shift(&self, t: i64) -> Self {
        BivarRat {
            numer: self.numer.shift(t),
            denom: self.denom.shift(t),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        BivarRat {
            numer: self.numer.mul(&o.denom).add(&o.numer.mul(&self.denom)),
            denom: self.denom.mul(&o.denom),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&BivarRat {
            numer: o.numer.neg(),
            denom: o.denom.clone(),
        })
    }

    pub fn div(&self, o: &Self) -> Self {
        BivarRat {
            numer: self.numer.mul(&o.denom),
            denom: self.denom.mul(&o.numer),
        }
    }
}

/// `λ(n) = u/2 + (1/2)·√(u² + 4v)`; the radicand is stored as `P(n)/Q(n)`.
pub fn make_lambda(u: &RatFun<Rational>, v: &RatFun<Rational>) -> RadicalRatio<Rational> {
    let half = RatFun::constant(Rational::new(1.into(), 2.into()));
    let four = RatFun::from_int(4);
    RadicalRatio {
        rational_part: u * &half,
        radicand: &(u * u) + &(&four * v),
        scale: half,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Decomposition {
    /// `P = S² ∓ c` with `c > 0`.
    Decomposed { root: P, c: Q, mode: SqrtMode },
    /// `P = S²`: the base bound is `λ` itself.
    ExactSquare { root: P },
    Failed { message: String, root: Option<P>, remainder: Option<P> },
}

/// `(u + S/√Q)/2` together with the decomposition that produced `S`.
pub fn base_bound(
    u: &RatFun<Rational>,
    v: &RatFun<Rational>,
    kind: BoundKind,
) -> (Result<RF, ForgeError>, Decomposition) {
    let lambda = make_lambda(u, v);
    let sq = match exact_sqrt(lambda.radicand.denom()) {
        Some(s) => s,
        None => {
            let msg = lambda.radicand.denom().to_string();
            return (
                Err(ForgeError::NonSquareDenominator(msg.clone())),
                Decomposition::Failed { message: format!("non-square denominator {msg}"), root: None, remainder: None },
            );
        }
    };
    let p = lambda.radicand.numer();
    let assemble = |root: &P| -> Result<RF, ForgeError> {
        let s = RF::new(root.clone(), sq.clone()).map_err(|e| ForgeError::Decompose(e.to_string()))?;
        let half = Q::from_rational(Rational::new(1.into(), 2.into()));
        Ok((&u.to_quad() + &s).scale(&half))
    };
    match sqrt_prefix(p) {
        Ok((root, rem)) if rem.is_zero() => (assemble(&root), Decomposition::ExactSquare { root }),
        Ok((root, rem)) => {
            let failed = |e: DecomposeError| {
                (
                    Err(ForgeError::Decompose(e.to_string())),
                    Decomposition::Failed {
                        message: e.to_string(),
                        root: Some(root.clone()),
                        remainder: Some(rem.clone()),
                    },
                )
            };
            if !rem.is_constant() {
                return failed(DecomposeError::NonConstantRemainder {
                    root: root.to_string(),
                    remainder: rem.to_string(),
                });
            }
            let r = rem.coeff(0);
            let c = match kind.mode() {
                SqrtMode::Minus => -r.clone(),
                SqrtMode::Plus => r.clone(),
            };
            if c.sign() != Sign::Positive {
                return failed(DecomposeError::WrongSign {
                    root: root.to_string(),
                    remainder: r.to_string(),
                });
            }
            (assemble(&root), Decomposition::Decomposed { root, c, mode: kind.mode() })
        }
        Err(e) => (
            Err(ForgeError::Decompose(e.to_string())),
            Decomposition::Failed { message: e.to_string(), root: None, remainder: None },
        ),
    }
}

/// The lemma step expression for `candidate(n) = A(n) + x/(d(n)·n^k)` as a
/// [`BivarRat`]: `C(x,n)` for lower bounds, `D(x,n)` for upper bounds.
pub fn step_expression(a: &RF, d: &P, k: usize, u: &RF, v: &RF, kind: BoundKind) -> BivarRat {
    let corr = BivarRat {
        numer: BivarPoly::x_times(P::one()),
        denom: BivarPoly::from_n(d * &P::monomial(Q::one(), k)),
    };
    let g = BivarRat::from_rf(a).add(&corr);
    let (g1, u1, v1) = (g.shift(1), BivarRat::from_rf(&u.shift(1)), BivarRat::from_rf(&v.shift(1)));
    match kind {
        BoundKind::Lower => v1.div(&g1.sub(&u1)).sub(&g),
        BoundKind::Upper => g1.sub(&u1).sub(&v1.div(&g)),
    }
}

/// Roots of a polynomial of degree 1 or 2 in `x`, smallest first.
fn solve(h: &P, step: usize) -> Result<Vec<Q>, ForgeError> {
    let show = || h.to_string();
    match h.degree() {
        None => Err(ForgeError::ConstantLeading { step, h: "0".into() }),
        Some(0) => Err(ForgeError::ConstantLeading { step, h: show() }),
        Some(1) => Ok(vec![-h.coeff(0) / h.coeff(1)]),
        Some(2) => {
            let (a, b, c) = (h.coeff(2), h.coeff(1), h.coeff(0));
            let disc = b.clone() * b.clone() - Q::from_int(4) * a.clone() * c;
            let root = disc
                .to_rational()
                .filter(|r| Sign::of_rational(r) != Sign::Negative)
                .and_then(|r| Q::sqrt_rational(&r))
                .ok_or_else(|| ForgeError::NoRoot { step, h: show() })?;
            if b.radicand() != 1 && root.radicand() != 1 && b.radicand() != root.radicand() {
                return Err(ForgeError::NoRoot { step, h: show() });
            }
            let two_a = Q::from_int(2) * a;
            let mut roots = vec![(-b.clone() - root.clone()) / two_a.clone(), (-b + root) / two_a];
            roots.sort_by(|x, y| x.checked_cmp(y).unwrap_or(Ordering::Equal));
            roots.dedup();
            Ok(roots)
        }
        Some(degree) => Err(ForgeError::HDegree { step, degree }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub step: usize,
    /// Leading coefficient in `n` of the step numerator, as a polynomial in `x`.
    pub h: P,
    pub roots: Vec<Q>,
    pub chosen: Q,
    /// True when `chosen` is an offset from the first root rather than a root.
    pub off_root: bool,
    pub candidate: RF,
    /// Theorem threshold at which the candidate validated, if it did.
    pub validated_from: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FallbackSearch {
    pub candidate: RF,
    pub radius: i64,
    pub tried: usize,
    pub passed_prefilter: usize,
    /// Offsets (in eighths) on the `n` and constant coefficients of the
    /// numerator of the chosen bound.
    pub chosen: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgeTrace {
    pub sequence: String,
    pub kind: BoundKind,
    pub lambda: LambdaRecord,
    pub decomposition: Decomposition,
    pub base: Option<RF>,
    /// Monic denominator of the base bound, the `d(n)` of the corrections.
    pub d: Option<P>,
    pub base_validated_from: Option<i64>,
    pub corrections: Vec<Correction>,
    pub fallback: Option<FallbackSearch>,
    #[serde(rename = "final")]
    pub final_bound: Option<RF>,
    pub validated_from: Option<i64>,
    pub validation: Option<Certificate>,
    pub failure: Option<ForgeError>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub rational_part: RatFun<Rational>,
    pub scale: RatFun<Rational>,
    pub radicand: RatFun<Rational>,
}

impl From<&RadicalRatio<Rational>> for LambdaRecord {
    fn from(l: &RadicalRatio<Rational>) -> Self {
        LambdaRecord {
            rational_part: l.rational_part.clone(),
            scale: l.scale.clone(),
            radicand: l.radicand.clone(),
        }
    }
}

impl ForgeTrace {
    /// Rebuild the final bound from the base and the recorded corrections.
    pub fn replay(&self) -> Option<RF> {
        if let Some(f) = &self.fallback {
            let (i, j) = f.chosen?;
            return Some(adjust(&f.candidate, i, j));
        }
        let mut g = self.base.clone()?;
        let d = self.d.as_ref()?;
        for c in &self.corrections {
            g = &g + &correction_term(d, c.step, &c.chosen);
        }
        Some(g)
    }
}

fn correction_term(d: &P, k: usize, x: &Q) -> RF {
    RF::new(P::constant(x.clone()), d * &P::monomial(Q::one(), k)).expect("nonzero denominator")
}

/// `candidate + (i/8)·n/den + (j/8)/den`, where `den` is the candidate's
/// denominator: shifts the `n¹` and `n⁰` numerator coefficients.
pub fn adjust(candidate: &RF, i: i64, j: i64) -> RF {
    let eighth = |k: i64| Q::from_rational(Rational::new(k.into(), 8.into()));
    let shift = P::new(vec![eighth(j), eighth(i)]);
    RF::new(candidate.numer() + &shift, candidate.denom().clone()).expect("nonzero denominator")
}

/// Theorem-level validation: the smallest threshold at which the bound
/// certifies ratio log-concavity (lemma thresholds searched over `[2, 64]`).
pub fn validate(cache: &mut TermCache, kind: BoundKind, bound: &RF) -> Option<(i64, Certificate)> {
    let n0 = match kind {
        BoundKind::Lower => certify::pos_threshold(cache, bound)?,
        BoundKind::Upper => certify::neg_threshold(cache, bound)?,
    };
    let cert = match kind {
        BoundKind::Lower => certify::certify_ratio_logconcave_pos(cache, bound, n0),
        BoundKind::Upper => certify::certify_ratio_logconcave_neg(cache, bound, n0, None),
    };
    cert.ok().map(|c| (n0, c))
}

/// Cheap necessary conditions at a few large `n`, evaluated pointwise: bound
/// positive, lemma step positive, condition (ii) with the right sign.
pub fn prefilter(bound: &RF, u: &RF, v: &RF, kind: BoundKind) -> bool {
    prefilter_with(|n| bound.eval(n).ok(), |n| u.eval(n).ok(), |n| v.eval(n).ok(), kind)
}

fn prefilter_with(
    bound: impl Fn(i64) -> Option<Q>,
    u: impl Fn(i64) -> Option<Q>,
    v: impl Fn(i64) -> Option<Q>,
    kind: BoundKind,
) -> bool {
    let at = |n: i64| -> Option<bool> {
        let (b0, b1) = (bound(n)?, bound(n + 1)?);
        let (u0, u1) = (u(n)?, u(n + 1)?);
        let (v0, v1) = (v(n)?, v(n + 1)?);
        let step = match kind {
            BoundKind::Lower => {
                let gm = bound(n - 1)?;
                v1.checked_div(&(b1 - u1.clone())).ok()? - u0.clone() - v0.checked_div(&gm).ok()?
            }
            BoundKind::Upper => b1 - u1.clone() - v1.checked_div(&b0).ok()?,
        };
        let b3 = b0.clone() * b0.clone() * b0.clone();
        let q = b3.clone() * b0.clone() - u0 * b3 - u1 * v0.clone() * b0.clone() - v0 * v1;
        Some(b0.sign() == Sign::Positive && step.sign() == Sign::Positive && q.sign() == kind.sign())
    };
    PREFILTER_AT.iter().all(|&n| at(n) == Some(true))
}

/// Grid offsets ordered by Chebyshev ring, then lexicographically.
pub fn grid(radius: i64) -> impl Iterator<Item = (i64, i64)> {
    (0..=radius).flat_map(move |r| {
        (-r..=r).flat_map(move |i| (-r..=r).filter(move |&j| i.abs().max(j.abs()) == r).map(move |j| (i, j)))
    })
}

pub struct ForgeOutcome {
    pub bound: RF,
    pub certificate: Certificate,
    pub trace: ForgeTrace,
}

/// Run the whole procedure. On failure the error comes with the trace so far.
pub fn forge(spec: &SequenceSpec, kind: BoundKind, max_depth: usize) -> Result<ForgeOutcome, Box<(ForgeError, ForgeTrace)>> {
    let (u, v) = match spec.three_term() {
        Some((u, v)) => (u.clone(), v.clone()),
        None => {
            let e = ForgeError::NotThreeTerm(spec.name.clone());
            let lambda = make_lambda(&RatFun::zero(), &RatFun::zero());
            return Err(Box::new((e.clone(), empty_trace(spec, kind, &lambda, e))));
        }
    };
    let lambda = make_lambda(&u, &v);
    let mut cache = TermCache::new(spec.clone());
    let mut trace = empty_trace(spec, kind, &lambda, ForgeError::DepthExhausted { depth: max_depth });
    trace.failure = None;
    let fail = |mut trace: ForgeTrace, e: ForgeError| {
        trace.failure = Some(e.clone());
        Err(Box::new((e, trace)))
    };

    match certify::v_sign(&cache) {
        Some(s) if s == kind.sign() => {}
        other => {
            let actual = match other {
                Some(Sign::Positive) => "> 0",
                Some(Sign::Negative) => "< 0",
                _ => "has no fixed sign",
            };
            return fail(trace, ForgeError::KindMismatch { actual: actual.into() });
        }
    }

    let (uq, vq) = (u.to_quad(), v.to_quad());
    let (base, decomposition) = base_bound(&u, &v, kind);
    trace.decomposition = decomposition;
    let base = match base {
        Ok(b) => b,
        Err(e) => {
            trace.notes.push(format!("decomposition failed ({e}); using the square-root prefix with coefficient search"));
            return run_fallback(&mut cache, trace, &uq, &vq, kind);
        }
    };
    if matches!(trace.decomposition, Decomposition::ExactSquare { .. }) {
        trace.notes.push("u^2+4v is a perfect square; the base bound is the root itself".into());
    }
    let d = base.denom().clone();
    trace.base = Some(base.clone());
    trace.d = Some(d.clone());
    if let Some((n0, cert)) = validate(&mut cache, kind, &base) {
        trace.base_validated_from = Some(n0);
        return Ok(finish(trace, base, n0, cert));
    }

    let mut current = base;
    for step in 1..=max_depth {
        let expr = step_expression(&current, &d, step, &uq, &vq, kind);
        let h = expr.numer.leading_in_n();
        if expr.numer.x_degree() > 2 {
            return fail(trace, ForgeError::HDegree { step, degree: expr.numer.x_degree() });
        }
        let roots = match solve(&h, step) {
            Ok(r) => r,
            Err(e) => return fail(trace, e),
        };
        // roots are tried smallest first; if none validates the first one is kept
        let mut chosen = None;
        for x in &roots {
            let candidate = &current + &correction_term(&d, step, x);
            if let Some(found) = validate(&mut cache, kind, &candidate) {
                chosen = Some((x.clone(), candidate, Some(found)));
                break;
            }
        }
        if chosen.is_none() {
            chosen = off_root(&mut cache, &current, &d, step, &roots[0], &uq, &vq, kind);
        }
        let (x, candidate, found) = chosen.unwrap_or_else(|| {
            let x = roots[0].clone();
            let candidate = &current + &correction_term(&d, step, &x);
            (x, candidate, None)
        });
        trace.corrections.push(Correction {
            step,
            h: h.clone(),
            roots: roots.clone(),
            off_root: !roots.contains(&x),
            chosen: x,
            candidate: candidate.clone(),
            validated_from: found.as_ref().map(|(n, _)| *n),
        });
        if let Some((n0, cert)) = found {
            return Ok(finish(trace, candidate, n0, cert));
        }
        current = candidate;
    }
    fail(trace, ForgeError::DepthExhausted { depth: max_depth })
}

/// When no root validates, try `x* ± j/8` for `j = 1..=OFFSET_RADIUS` (plus
/// side first at each `j`); prefiltered, then validated.
#[allow(clippy::too_many_arguments)]
fn off_root(
    cache: &mut TermCache,
    current: &RF,
    d: &P,
    step: usize,
    root: &Q,
    u: &RF,
    v: &RF,
    kind: BoundKind,
) -> Option<(Q, RF, Option<(i64, Certificate)>)> {
    let eighth = Q::from_rational(Rational::new(1.into(), 8.into()));
    for j in 1..=OFFSET_RADIUS {
        for s in [1, -1] {
            let x = root.clone() + Q::from_int(s * j) * eighth.clone();
            let candidate = current + &correction_term(d, step, &x);
            if !prefilter(&candidate, u, v, kind) {
                continue;
            }
            if let Some(found) = validate(cache, kind, &candidate) {
                return Some((x, candidate, Some(found)));
            }
        }
    }
    None
}

fn empty_trace(spec: &SequenceSpec, kind: BoundKind, lambda: &RadicalRatio<Rational>, e: ForgeError) -> ForgeTrace {
    ForgeTrace {
        sequence: spec.name.clone(),
        kind,
        lambda: lambda.into(),
        decomposition: Decomposition::Failed { message: "not attempted".into(), root: None, remainder: None },
        base: None,
        d: None,
        base_validated_from: None,
        corrections: Vec::new(),
        fallback: None,
        final_bound: None,
        validated_from: None,
        validation: None,
        failure: Some(e),
        notes: Vec::new(),
    }
}

fn finish(mut trace: ForgeTrace, bound: RF, n0: i64, cert: Certificate) -> ForgeOutcome {
    trace.final_bound = Some(bound.clone());
    trace.validated_from = Some(n0);
    trace.validation = Some(cert.clone());
    ForgeOutcome { bound, certificate: cert, trace }
}

fn run_fallback(
    cache: &mut TermCache,
    mut trace: ForgeTrace,
    u: &RF,
    v: &RF,
    kind: BoundKind,
) -> Result<ForgeOutcome, Box<(ForgeError, ForgeTrace)>> {
    let prefix = match &trace.decomposition {
        Decomposition::Failed { root: Some(root), .. } => root.clone(),
        _ => {
            let e = ForgeError::Decompose("no square-root prefix available".into());
            trace.failure = Some(e.clone());
            return Err(Box::new((e, trace)));
        }
    };
    let lambda = &trace.lambda;
    let sq = exact_sqrt(lambda.radicand.denom()).expect("checked in base_bound");
    let half = Q::from_rational(Rational::new(1.into(), 2.into()));
    let candidate = (u + &RF::new(prefix, sq).expect("nonzero")).scale(&half);
    let mut search = FallbackSearch {
        candidate: candidate.clone(),
        radius: FALLBACK_RADIUS,
        tried: 0,
        passed_prefilter: 0,
        chosen: None,
    };
    // candidate and denominator values at the prefilter points and neighbours
    let points: Vec<i64> = PREFILTER_AT.iter().flat_map(|&n| [n - 1, n, n + 1]).collect();
    let table: Vec<(i64, Option<(Q, Q)>)> = points
        .iter()
        .map(|&n| (n, candidate.eval(n).ok().map(|c| (c, candidate.denom().eval_int(n)))))
        .collect();
    let values = |f: &RF| -> Vec<(i64, Option<Q>)> { points.iter().map(|&n| (n, f.eval(n).ok())).collect() };
    let (ut, vt) = (values(u), values(v));
    let lookup = |t: &[(i64, Option<Q>)], n: i64| t.iter().find(|(m, _)| *m == n).and_then(|(_, x)| x.clone());
    let eighth = Q::from_rational(Rational::new(1.into(), 8.into()));
    for (i, j) in grid(FALLBACK_RADIUS) {
        search.tried += 1;
        let at = |n: i64| -> Option<Q> {
            let (c, den) = table.iter().find(|(m, _)| *m == n)?.1.as_ref()?;
            let shift = (Q::from_int(i) * Q::from_int(n) + Q::from_int(j)) * eighth.clone();
            Some(c.clone() + shift.checked_div(den).ok()?)
        };
        if !prefilter_with(at, |n| lookup(&ut, n), |n| lookup(&vt, n), kind) {
            continue;
        }
        let bound = adjust(&candidate, i, j);
        search.passed_prefilter += 1;
        if let Some((n0, cert)) = validate(cache, kind, &bound) {
            search.chosen = Some((i, j));
            trace.fallback = Some(search);
            return Ok(finish(trace, bound, n0, cert));
        }
    }
    let e = ForgeError::FallbackExhausted { tried: search.tried };
    trace.fallback = Some(search);
    trace.failure = Some(e.clone());
    Err(Box::new((e, trace)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_ratfun, parse_scalar};
    use num_traits::Zero;
    use crate::sequences::builtin;

    fn uv(name: &str) -> (RatFun<Rational>, RatFun<Rational>) {
        let s = builtin(name, 1).unwrap();
        let (u, v) = s.three_term().unwrap();
        (u.clone(), v.clone())
    }

    fn rf(s: &str) -> RF {
        parse_ratfun(s).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let (u, v) = uv("motzkin");
        let l = make_lambda(&u, &v);
        assert_eq!(l.radicand.numer().to_string(), "16*n^2+16*n-23");
        assert_eq!(l.radicand.denom().to_string(), "n^2+4*n+4");
        let (u, v) = uv("delannoy");
        let l = make_lambda(&u, &v);
        assert_eq!(l.radicand.numer().to_string(), "32*n^2-32*n+9");
        assert_eq!(l.radicand.denom().to_string(), "n^2");
        let l = make_lambda(&RatFun::from_int(2), &RatFun::from_int(3));
        assert_eq!(l.eval(7).unwrap(), Q::from_int(3));
    }

    #[test]
    fn base_bound_examples() {
        let (u, v) = uv("motzkin");
        assert_eq!(base_bound(&u, &v, BoundKind::Lower).0.unwrap(), rf("(3*n+3/2)/(n+2)"));
        let (u, v) = uv("delannoy");
        assert_eq!(
            base_bound(&u, &v, BoundKind::Upper).0.unwrap(),
            rf("((3+2*sqrt(2))*n-3/2-sqrt(2))/n")
        );
        let (u, v) = uv("domb");
        for kind in [BoundKind::Lower, BoundKind::Upper] {
            match base_bound(&u, &v, kind) {
                (Err(_), Decomposition::Failed { remainder: Some(r), .. }) => {
                    assert_eq!(r.to_string(), "-208*n^2+208*n-48")
                }
                other => panic!("{other:?}"),
            }
        }
        let (u, v) = uv("fine");
        let (b, d) = base_bound(&u, &v, BoundKind::Lower);
        assert!(matches!(d, Decomposition::ExactSquare { .. }));
        assert_eq!(b.unwrap(), rf("(4*n-2)/(n+1)"));
    }

    #[test]
    fn base_exceeds_root() {
        // (2r − u)²Q − P = c > 0 when r is the mode-minus base
        let (u, v) = uv("motzkin");
        let l = make_lambda(&u, &v);
        let r = base_bound(&u, &v, BoundKind::Lower).0.unwrap();
        let two = Q::from_int(2);
        for n in 2..102 {
            let t = r.eval(n).unwrap() * two.clone() - Q::from_rational(u.eval(n).unwrap());
            let lhs = t.clone() * t * Q::from_rational(l.radicand.denom().eval_int(n));
            let diff = lhs - Q::from_rational(l.radicand.numer().eval_int(n));
            assert_eq!(diff, Q::from_int(27));
        }
    }

    #[test]
    fn motzkin_step_expression() {
        let (u, v) = uv("motzkin");
        let base = rf("(3*n+3/2)/(n+2)");
        let e = step_expression(&base, base.denom(), 1, &u.to_quad(), &v.to_quad(), BoundKind::Lower);
        let h = e.numer.leading_in_n();
        assert_eq!(solve(&h, 1).unwrap(), vec![parse_scalar("-9/16").unwrap()]);
    }

    #[test]
    fn solve_quadratic_smaller_first() {
        let h = P::new(vec![Q::from_int(-2), Q::zero(), Q::one()]);
        let r = solve(&h, 1).unwrap();
        assert_eq!(r, vec![parse_scalar("-sqrt(2)").unwrap(), parse_scalar("sqrt(2)").unwrap()]);
        assert!(matches!(solve(&P::constant(Q::one()), 1), Err(ForgeError::ConstantLeading { .. })));
    }

    #[test]
    fn forge_motzkin_lower() {
        let out = forge(&builtin("motzkin", 1).unwrap(), BoundKind::Lower, 3).unwrap();
        assert_eq!(out.trace.corrections[0].chosen, parse_scalar("-9/16").unwrap());
        assert_eq!(out.bound, rf("(6*n^2+3*n-9/8)/(2*n*(n+2))"));
        assert_eq!(out.trace.replay().unwrap(), out.bound);
    }

    #[test]
    fn forge_delannoy_upper() {
        let out = forge(&builtin("delannoy", 1).unwrap(), BoundKind::Upper, 3).unwrap();
        assert_eq!(out.trace.corrections[0].chosen, parse_scalar("-sqrt(2)/32").unwrap());
        assert_eq!(out.bound, rf("((3+2*sqrt(2))*n^2-3/2*n-sqrt(2)*n-sqrt(2)/32)/n^2"));
    }

    #[test]
    fn forge_fine_polyhex_domb() {
        let fine = forge(&builtin("fine", 1).unwrap(), BoundKind::Lower, 3).unwrap();
        assert_eq!(fine.bound, rf("(4*n^2-2*n+2/3)/(n^2+n)"));

        let poly = forge(&builtin("polyhex", 1).unwrap(), BoundKind::Upper, 4).unwrap();
        assert_eq!(poly.trace.corrections[0].chosen, parse_scalar("15/16").unwrap());
        assert!(poly.trace.corrections[1].off_root);
        assert_eq!(poly.trace.replay().unwrap(), poly.bound);

        let domb = forge(&builtin("domb", 1).unwrap(), BoundKind::Upper, 4).unwrap();
        let fb = domb.trace.fallback.as_ref().unwrap();
        assert_eq!(fb.candidate, rf("(16*n^3-24*n^2+20*n-6)/n^3"));
        assert_eq!(domb.trace.replay().unwrap(), domb.bound);
        domb.certificate.recheck().unwrap();
    }

    #[test]
    fn trace_is_deterministic_and_round_trips() {
        let spec = builtin("delannoy", 1).unwrap();
        let a = forge(&spec, BoundKind::Upper, 3).unwrap().trace;
        let b = forge(&spec, BoundKind::Upper, 3).unwrap().trace;
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, serde_json::to_string(&b).unwrap());
        let back: ForgeTrace = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn forge_kind_mismatch() {
        match forge(&builtin("fine", 1).unwrap(), BoundKind::Upper, 3) {
            Err(b) => assert_eq!(b.0.to_string(), "v(n) > 0 for n >= 2, kind mismatch"),
            Ok(_) => panic!(),
        }
    }

    #[test]
    fn grid_order() {
        let g: Vec<_> = grid(1).collect();
        assert_eq!(g[0], (0, 0));
        assert_eq!(g[1..], [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]);
        assert_eq!(grid(FALLBACK_RADIUS).count(), 129 * 129);
        let domb = rf("(16*n^3-24*n^2+20*n-6)/n^3");
        assert_eq!(adjust(&domb, -64, 32), rf("(16*n^3-24*n^2+12*n-2)/n^3"));
    }
}
