//! Finite-range exact checkers for log-concavity, log-convexity, the ratio
//! operator `R`, log-monotonicity of order `k`, ratio and `n`-th root
//! log-behavior, and the initial conditions of the root criteria.
//!
//! All comparisons are integer cross-products; nothing here rounds.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{cmp_power_products, rat_div, ExactError, ExpGuard, Rational};
use crate::sequences::{SeqError, TermCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Strict,
    Weak,
}

impl Strictness {
    pub fn from_flag(strict: bool) -> Self {
        if strict {
            Strictness::Strict
        } else {
            Strictness::Weak
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Concave,
    Convex,
}

impl Direction {
    /// Does `lhs ? rhs` satisfy the direction, where concave wants `lhs > rhs`?
    pub fn accepts(self, ord: Ordering, s: Strictness) -> bool {
        match (self, ord, s) {
            (_, Ordering::Equal, Strictness::Weak) => true,
            (Direction::Concave, Ordering::Greater, _) => true,
            (Direction::Convex, Ordering::Less, _) => true,
            _ => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Concave => "concave",
            Direction::Convex => "convex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeVerdict {
    pub predicate: String,
    pub start: i64,
    pub end: i64,
    pub holds: bool,
    pub first_failure: Option<i64>,
    pub strictness: Strictness,
}

impl RangeVerdict {
    fn new(predicate: impl Into<String>, start: i64, end: i64, first_failure: Option<i64>, s: Strictness) -> Self {
        RangeVerdict {
            predicate: predicate.into(),
            start,
            end,
            holds: first_failure.is_none(),
            first_failure,
            strictness: s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("term at index {at} is not positive")]
    NonPositive { at: i64 },
    #[error("empty range [{start}, {end}]")]
    EmptyRange { start: i64, end: i64 },
    #[error("exponent guard exceeded at n = {at}; largest feasible end is {max_feasible_end:?}")]
    GuardExceeded { at: i64, max_feasible_end: Option<i64>, bits: u64, cap: u64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Exact order of `∏ lhs_i^{e_i}` against `∏ rhs_j^{f_j}` for positive
/// rationals with small exponents. A floating-point estimate with a rigorous
/// error bound decides clear cases; close ones fall back to one integer
/// cross-multiplication.
pub fn cmp_monomials(lhs: &[(&Rational, u32)], rhs: &[(&Rational, u32)]) -> Ordering {
    if let Some(ord) = estimate_cmp(lhs, rhs) {
        return ord;
    }
    fn side(num: &[(&Rational, u32)], den: &[(&Rational, u32)]) -> BigInt {
        let mut acc = BigInt::one();
        for (r, e) in num {
            acc *= num_traits::pow(r.numer().clone(), *e as usize);
        }
        for (r, e) in den {
            if !r.denom().is_one() {
                acc *= num_traits::pow(r.denom().clone(), *e as usize);
            }
        }
        acc
    }
    side(lhs, rhs).cmp(&side(rhs, lhs))
}

/// `x ≈ m·2^e` with `m` in `[1, 2)` and relative error below `2^-52`.
fn split(x: &BigInt) -> (f64, i64) {
    let bits = x.bits();
    let top = if bits > 64 { x >> (bits - 64) } else { x.clone() };
    let top = top.magnitude().iter_u64_digits().next().unwrap_or(0) as f64;
    let shift = bits.saturating_sub(64) as i64;
    let e = bits as i64 - 1;
    (top * 2f64.powi((shift - e) as i32), e)
}

/// Order of the two monomials when the estimate clears its error bound.
/// At most 64 factors per side, each contributing a relative error below
/// `2^-51`, so the total error stays far below the `1e-9` margin.
fn estimate_cmp(lhs: &[(&Rational, u32)], rhs: &[(&Rational, u32)]) -> Option<Ordering> {
    fn side(num: &[(&Rational, u32)], den: &[(&Rational, u32)]) -> Option<(f64, i64, u32)> {
        let (mut m, mut e, mut count) = (1.0f64, 0i64, 0u32);
        let mut push = |x: &BigInt, k: u32| {
            let (xm, xe) = split(x);
            for _ in 0..k {
                m *= xm;
                e += xe;
            }
            count += k;
        };
        for (r, k) in num {
            push(r.numer(), *k);
        }
        for (r, k) in den {
            push(r.denom(), *k);
        }
        (count <= 64).then_some((m, e, count))
    }
    let (ml, el, cl) = side(lhs, rhs)?;
    let (mr, er, cr) = side(rhs, lhs)?;
    let gap = el - er;
    // each mantissa product lies in [1, 2^count)
    if gap > cr as i64 {
        return Some(Ordering::Greater);
    }
    if -gap > cl as i64 {
        return Some(Ordering::Less);
    }
    let q = ml / mr * 2f64.powi(gap as i32);
    if q > 1.0 + 1e-9 {
        Some(Ordering::Greater)
    } else if q < 1.0 - 1e-9 {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Evaluate `ok(n)` on `[lo, hi]`, splitting the range across threads, and
/// return the smallest index where it is false or errs.
pub(crate) fn first_bad<E: Send>(
    lo: i64,
    hi: i64,
    ok: impl Fn(i64) -> Result<bool, E> + Sync,
) -> Result<Option<i64>, E> {
    if hi < lo {
        return Ok(None);
    }
    let len = (hi - lo + 1) as usize;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(len.div_ceil(64)).max(1);
    let chunk = len.div_ceil(workers) as i64;
    let scan = |a: i64, b: i64| -> Option<(i64, Result<(), E>)> {
        (a..=b).find_map(|n| match ok(n) {
            Ok(true) => None,
            Ok(false) => Some((n, Ok(()))),
            Err(e) => Some((n, Err(e))),
        })
    };
    let found: Vec<(i64, Result<(), E>)> = if workers == 1 {
        scan(lo, hi).into_iter().collect()
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers as i64)
                .map(|w| {
                    let a = lo + w * chunk;
                    let b = (a + chunk - 1).min(hi);
                    let scan = &scan;
                    s.spawn(move || if a <= b { scan(a, b) } else { None })
                })
                .collect();
            handles.into_iter().filter_map(|h| h.join().unwrap()).collect()
        })
    };
    match found.into_iter().min_by_key(|(n, _)| *n) {
        None => Ok(None),
        Some((n, Ok(()))) => Ok(Some(n)),
        Some((_, Err(e))) => Err(e),
    }
}

fn positive_terms(cache: &mut TermCache, from: i64, to: i64) -> Result<Vec<Rational>, CheckError> {
    let terms = cache.range(from, to)?;
    if let Some(i) = terms.iter().position(|t| !t.is_positive()) {
        return Err(CheckError::NonPositive { at: from + i as i64 });
    }
    Ok(terms)
}

fn nonempty(start: i64, end: i64) -> Result<(), CheckError> {
    if end < start {
        Err(CheckError::EmptyRange { start, end })
    } else {
        Ok(())
    }
}

/// Consecutive ratios `b_i = x_{i+1}/x_i`.
pub fn ratios(values: &[Rational]) -> Vec<Rational> {
    values.windows(2).map(|w| rat_div(&w[1], &w[0])).collect()
}

/// `b_n = a_{n+1}/a_n` for `n` in `[start, end]`.
pub fn apply_r(cache: &mut TermCache, start: i64, end: i64) -> Result<Vec<Rational>, CheckError> {
    nonempty(start, end)?;
    Ok(ratios(&positive_terms(cache, start, end + 1)?))
}

/// `x_i² ? x_{i−1}x_{i+1}` at every interior position of `values`, labelled
/// with indices `offset + i`.
pub fn check_log(values: &[Rational], offset: i64, dir: Direction, s: Strictness) -> Result<RangeVerdict, CheckError> {
    if let Some(i) = values.iter().position(|t| !t.is_positive()) {
        return Err(CheckError::NonPositive { at: offset + i as i64 });
    }
    let (start, end) = (offset + 1, offset + values.len() as i64 - 2);
    nonempty(start, end)?;
    let at = |n: i64| &values[(n - offset) as usize];
    let bad = first_bad(start, end, |n| {
        Ok::<_, CheckError>(dir.accepts(cmp_monomials(&[(at(n), 2)], &[(at(n - 1), 1), (at(n + 1), 1)]), s))
    })?;
    Ok(RangeVerdict::new(format!("log{}", dir.name()), start, end, bad, s))
}

pub fn check_logconcave(values: &[Rational], offset: i64, strict: bool) -> Result<RangeVerdict, CheckError> {
    check_log(values, offset, Direction::Concave, Strictness::from_flag(strict))
}

pub fn check_logconvex(values: &[Rational], offset: i64, strict: bool) -> Result<RangeVerdict, CheckError> {
    check_log(values, offset, Direction::Convex, Strictness::from_flag(strict))
}

/// Log-concavity or log-convexity of the terms themselves, middle indices in
/// `[start, end]`.
pub fn check_terms(cache: &mut TermCache, start: i64, end: i64, dir: Direction, s: Strictness) -> Result<RangeVerdict, CheckError> {
    nonempty(start, end)?;
    let terms = positive_terms(cache, start - 1, end + 1)?;
    check_log(&terms, start - 1, dir, s)
}

/// Log-monotonicity of order `k` on the terms `a_start..a_end`: `R^r` must be
/// log-convex for even `r` and log-concave for odd `r`. `R^r` uses `r` more
/// terms, so verdict `r` covers the interior of `[start, end − r]`.
pub fn check_order_k(cache: &mut TermCache, k: usize, start: i64, end: i64, strict: bool) -> Result<Vec<RangeVerdict>, CheckError> {
    let s = Strictness::from_flag(strict);
    let mut seq = positive_terms(cache, start, end)?;
    let mut out = Vec::with_capacity(k);
    for r in 0..k {
        let dir = if r % 2 == 0 { Direction::Convex } else { Direction::Concave };
        let mut v = check_log(&seq, start, dir, s)?;
        v.predicate = format!("R^{r} log{}", dir.name());
        out.push(v);
        seq = ratios(&seq);
    }
    Ok(out)
}

/// `a_n³a_{n−2} ? a_{n+1}a_{n−1}³` for middle indices `n` in `[start, end]`.
pub fn check_ratio(cache: &mut TermCache, start: i64, end: i64, dir: Direction, s: Strictness) -> Result<RangeVerdict, CheckError> {
    nonempty(start, end)?;
    let base = start - 2;
    let terms = positive_terms(cache, base, end + 1)?;
    let at = |n: i64| &terms[(n - base) as usize];
    let bad = first_bad(start, end, |n| {
        Ok::<_, CheckError>(dir.accepts(
            cmp_monomials(&[(at(n), 3), (at(n - 2), 1)], &[(at(n + 1), 1), (at(n - 1), 3)]),
            s,
        ))
    })?;
    Ok(RangeVerdict::new(format!("ratio-log{}", dir.name()), start, end, bad, s))
}

pub fn check_ratio_logconcave(cache: &mut TermCache, start: i64, end: i64, strict: bool) -> Result<RangeVerdict, CheckError> {
    check_ratio(cache, start, end, Direction::Concave, Strictness::from_flag(strict))
}

pub fn check_ratio_logconvex(cache: &mut TermCache, start: i64, end: i64, strict: bool) -> Result<RangeVerdict, CheckError> {
    check_ratio(cache, start, end, Direction::Convex, Strictness::from_flag(strict))
}

/// Order of `∏ lhs` against `∏ rhs` for nonnegative bases; a product with a
/// zero base is zero.
fn cmp_with_zeros(lhs: &[(Rational, u64)], rhs: &[(Rational, u64)], guard: ExpGuard) -> Result<Ordering, ExactError> {
    let zero = |side: &[(Rational, u64)]| side.iter().any(|(b, e)| b.is_zero() && *e > 0);
    match (zero(lhs), zero(rhs)) {
        (false, false) => cmp_power_products(lhs, rhs, guard),
        (true, true) => Ok(Ordering::Equal),
        (true, false) => Ok(Ordering::Less),
        (false, true) => Ok(Ordering::Greater),
    }
}

/// `(ⁿ√a_n)² ? ⁿ⁺¹√a_{n+1} · ⁿ⁻¹√a_{n−1}` for `n` in `[start, end]`, i.e.
/// `a_n^{2(n²−1)} ? a_{n+1}^{n(n−1)} a_{n−1}^{n(n+1)}`. A zero `a_{n−1}` makes
/// the right side zero.
pub fn check_root(cache: &mut TermCache, start: i64, end: i64, dir: Direction, s: Strictness) -> Result<RangeVerdict, CheckError> {
    check_root_guarded(cache, start, end, dir, s, ExpGuard::from_env())
}

/// [`check_root`] with an explicit exponent guard.
pub fn check_root_guarded(
    cache: &mut TermCache,
    start: i64,
    end: i64,
    dir: Direction,
    s: Strictness,
    guard: ExpGuard,
) -> Result<RangeVerdict, CheckError> {
    nonempty(start, end)?;
    if start < 2 {
        return Err(CheckError::EmptyRange { start, end });
    }
    let base = start - 1;
    let terms = cache.range(base, end + 1)?;
    if let Some(i) = terms.iter().position(|t| t.is_negative()) {
        return Err(CheckError::NonPositive { at: base + i as i64 });
    }
    if let Some(i) = terms[1..].iter().position(|t| t.is_zero()) {
        return Err(CheckError::NonPositive { at: start + i as i64 });
    }
    let at = |n: i64| terms[(n - base) as usize].clone();
    let outcome = first_bad(start, end, |n| {
        let nn = n as u64;
        let lhs = [(at(n), 2 * (nn * nn - 1))];
        let rhs = [(at(n + 1), nn * (nn - 1)), (at(n - 1), nn * (nn + 1))];
        cmp_with_zeros(&lhs, &rhs, guard).map(|o| dir.accepts(o, s)).map_err(|e| (n, e))
    });
    match outcome {
        Ok(bad) => Ok(RangeVerdict::new(format!("root-log{}", dir.name()), start, end, bad, s)),
        Err((n, ExactError::GuardExceeded { bits, cap })) => Err(CheckError::GuardExceeded {
            at: n,
            max_feasible_end: (n > start).then_some(n - 1),
            bits,
            cap,
        }),
        Err((_, e)) => Err(e.into()),
    }
}

pub fn check_root_logconcave(cache: &mut TermCache, start: i64, end: i64) -> Result<RangeVerdict, CheckError> {
    check_root(cache, start, end, Direction::Concave, Strictness::Strict)
}

pub fn check_root_logconvex(cache: &mut TermCache, start: i64, end: i64) -> Result<RangeVerdict, CheckError> {
    check_root(cache, start, end, Direction::Convex, Strictness::Strict)
}

/// Both sides of the initial condition at `k`:
/// `a_{k+1}^{2k(k+2)}` against `a_k^{(k+1)(k+2)} · a_{k+2}^{k(k+1)}`.
pub fn initial_condition_sides(cache: &mut TermCache, k: i64) -> Result<(Vec<(Rational, u64)>, Vec<(Rational, u64)>), CheckError> {
    if k < 1 {
        return Err(CheckError::EmptyRange { start: k, end: k + 2 });
    }
    let t = positive_terms(cache, k, k + 2)?;
    let kk = k as u64;
    Ok((
        vec![(t[1].clone(), 2 * kk * (kk + 2))],
        vec![(t[0].clone(), (kk + 1) * (kk + 2)), (t[2].clone(), kk * (kk + 1))],
    ))
}

/// Strict initial condition of the root criteria at `k` in direction `dir`.
pub fn check_initial_condition(cache: &mut TermCache, k: i64, dir: Direction) -> Result<bool, CheckError> {
    let (lhs, rhs) = initial_condition_sides(cache, k)?;
    let ord = cmp_power_products(&lhs, &rhs, ExpGuard::from_env())?;
    Ok(dir.accepts(ord, Strictness::Strict))
}

/// One row of [`scan_almost_order`]. Empirical evidence, not a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub r: usize,
    pub direction: Direction,
    /// Least `s` such that `R^r` restricted to indices `≥ s` has the required
    /// log-behavior at every checked middle index up to the horizon.
    pub holds_from: i64,
    /// Last middle index checked for this `r`.
    pub checked_to: i64,
    pub evidence: String,
}

/// For each `r < k_max`, the least start from which `R^r` has the alternating
/// log-behavior (weak inequalities) through `horizon`.
pub fn scan_almost_order(cache: &mut TermCache, k_max: usize, horizon: i64) -> Result<Vec<ScanRow>, CheckError> {
    let first = cache.spec().valid_from;
    let mut seq = positive_terms(cache, first, horizon)?;
    let mut rows = Vec::with_capacity(k_max);
    for r in 0..k_max {
        let dir = if r % 2 == 0 { Direction::Convex } else { Direction::Concave };
        let checked_to = first + seq.len() as i64 - 2;
        let last_fail = (1..seq.len().saturating_sub(1))
            .rev()
            .find(|&i| !dir.accepts(cmp_monomials(&[(&seq[i], 2)], &[(&seq[i - 1], 1), (&seq[i + 1], 1)]), Strictness::Weak));
        rows.push(ScanRow {
            r,
            direction: dir,
            holds_from: last_fail.map_or(first, |i| first + i as i64),
            checked_to,
            evidence: "empirical".into(),
        });
        seq = ratios(&seq);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::sequences::{builtin, TermCache};

    fn cache(name: &str, m: u32) -> TermCache {
        TermCache::new(builtin(name, m).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn estimate_defers_near_ties() {
        let big = num_traits::pow(BigInt::from(10), 40);
        let a = Rational::from_integer(&big + 1);
        let b = Rational::from_integer(big.clone());
        let c = Rational::from_integer(&big + 2);
        assert_eq!(estimate_cmp(&[(&a, 2)], &[(&b, 1), (&c, 1)]), None);
        assert_eq!(cmp_monomials(&[(&a, 2)], &[(&b, 1), (&c, 1)]), Ordering::Greater);
        assert_eq!(cmp_monomials(&[(&b, 2)], &[(&b, 1), (&b, 1)]), Ordering::Equal);
        let x = rat(7, 3);
        assert_eq!(estimate_cmp(&[(&x, 3)], &[(&x, 2)]), Some(Ordering::Greater));
        assert_eq!(cmp_monomials(&[(&int(1), 1)], &[(&x, 2), (&rat(3, 7), 2)]), Ordering::Equal);
    }

    #[test]
    fn apply_r_examples() {
        assert_eq!(
            apply_r(&mut cache("catalan", 0), 1, 4).unwrap(),
            vec![int(2), rat(5, 2), rat(14, 5), rat(42, 14)]
        );
        assert_eq!(apply_r(&mut cache("fine", 0), 1, 3), Err(CheckError::NonPositive { at: 1 }));
        assert_eq!(ratios(&ints(&[1, 1, 1])), ints(&[1, 1]));
    }

    #[test]
    fn log_examples() {
        let v = check_logconcave(&ints(&[1, 2, 3, 4]), 0, true).unwrap();
        assert!(v.holds);
        assert_eq!((v.start, v.end), (1, 2));
        assert!(check_logconvex(&ints(&[1, 1, 2, 5, 14]), 0, false).unwrap().holds);
        let bad = check_logconcave(&ints(&[1, 3, 4, 13]), 0, false).unwrap();
        assert_eq!(bad.first_failure, Some(2));
        assert!(!bad.holds);
        assert!(matches!(check_logconcave(&ints(&[1, 2]), 0, false), Err(CheckError::EmptyRange { .. })));
    }

    #[test]
    fn order_k_examples() {
        let vs = check_order_k(&mut cache("catalan", 0), 3, 1, 60, false).unwrap();
        assert_eq!(vs.len(), 3);
        assert!(vs.iter().all(|v| v.holds));
        assert_eq!((vs[2].start, vs[2].end), (2, 57));
        assert!(check_order_k(&mut cache("bernoulli_abs_even", 0), 3, 1, 40, false).unwrap().iter().all(|v| v.holds));
        // 1, 1, 2, 4, 9: ratios 1, 2, 2, 9/4
        let m = check_order_k(&mut cache("motzkin", 0), 2, 0, 4, false).unwrap();
        assert_eq!(m[1].first_failure, Some(2));
    }

    #[test]
    fn ratio_examples() {
        assert!(check_ratio_logconcave(&mut cache("motzkin", 0), 6, 12, true).unwrap().holds);
        assert!(check_ratio_logconcave(&mut cache("domb", 0), 2, 23, true).unwrap().holds);
        assert!(check_ratio_logconvex(&mut cache("harmonic", 1), 3, 1000, true).unwrap().holds);
        let m = check_ratio_logconcave(&mut cache("motzkin", 0), 2, 12, true).unwrap();
        assert_eq!(m.first_failure, Some(3));
    }

    #[test]
    fn root_examples() {
        assert!(check_root_logconcave(&mut cache("motzkin", 0), 2, 5).unwrap().holds);
        assert!(check_root_logconcave(&mut cache("domb", 0), 2, 40).unwrap().holds);
        // {ⁿ√H_n}_{n≥3}: middle indices from 4
        assert!(check_root_logconvex(&mut cache("harmonic", 1), 4, 40).unwrap().holds);
        assert_eq!(check_root_logconvex(&mut cache("harmonic", 1), 3, 40).unwrap().first_failure, Some(3));
        // f_1 = 0 makes the right side vanish at n = 2
        assert!(check_root_logconcave(&mut cache("fine", 0), 2, 60).unwrap().holds);
    }

    #[test]
    fn initial_condition_examples() {
        assert!(check_initial_condition(&mut cache("derangement", 0), 3, Direction::Concave).unwrap());
        assert!(check_initial_condition(&mut cache("harmonic", 2), 3, Direction::Convex).unwrap());
        assert!(check_initial_condition(&mut cache("delannoy", 0), 1, Direction::Concave).unwrap());
        assert!(!check_initial_condition(&mut cache("delannoy", 0), 1, Direction::Convex).unwrap());
    }

    #[test]
    fn scans() {
        let rows = scan_almost_order(&mut cache("catalan", 0), 4, 200).unwrap();
        assert!(rows.iter().all(|r| r.holds_from <= 1 && r.evidence == "empirical"));
        let m = scan_almost_order(&mut cache("motzkin", 0), 3, 200).unwrap();
        assert!(m[1].holds_from > 0 && m[1].holds_from < 20);
        assert_eq!(scan_almost_order(&mut cache("bell", 0), 3, 200).unwrap().len(), 3);
    }

    #[test]
    fn guard_reports_feasible_end() {
        let guard = ExpGuard::new(20_000);
        let e = check_root_guarded(&mut cache("domb", 0), 2, 60, Direction::Concave, Strictness::Strict, guard);
        match e {
            Err(CheckError::GuardExceeded { at, max_feasible_end, .. }) => {
                assert_eq!(max_feasible_end, Some(at - 1));
            }
            other => panic!("{other:?}"),
        }
    }
}
