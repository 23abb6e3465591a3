//! Exact scalars: arbitrary-precision rationals, elements of a real quadratic
//! field `Q(√d)`, and exact comparison of products of rational powers.
//!
//! Nothing in this module touches floating point. Every ordering it returns is
//! decided by integer arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact fraction of arbitrary-precision integers, always in lowest terms with
/// a positive denominator.
pub type Rational = BigRational;

/// Environment variable that overrides [`ExpGuard::DEFAULT_BITS`].
pub const EXP_GUARD_ENV: &str = "LOGMONO_EXP_GUARD";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("0^0 is undefined")]
    ZeroToZero,
    #[error("base {index} on the {side} side is not strictly positive")]
    NonPositiveBase { side: &'static str, index: usize },
    #[error("operand would need about {bits} bits, above the exponent guard of {cap} bits")]
    GuardExceeded { bits: u64, cap: u64 },
    #[error("radicand {0} is not a square-free integer >= 1")]
    BadRadicand(u64),
    #[error("cannot combine elements of Q(sqrt({left})) and Q(sqrt({right}))")]
    RadicandMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
}

/// Sign of an exact real number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(r: &Rational) -> Sign {
        Sign::of_bigint(r.numer())
    }

    pub fn of_bigint(i: &BigInt) -> Sign {
        match i.sign() {
            num_bigint::Sign::Minus => Sign::Negative,
            num_bigint::Sign::NoSign => Sign::Zero,
            num_bigint::Sign::Plus => Sign::Positive,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        })
    }
}

/// Split a positive integer as `f² · d` with `d` square-free. Returns `None`
/// when the input is not positive or `d` does not fit in a `u64`.
pub fn square_free_split(n: &BigInt) -> Option<(BigInt, u64)> {
    if !n.is_positive() {
        return None;
    }
    let mut rest = n.clone();
    let mut root = BigInt::one();
    let mut core = BigInt::one();
    let mut p = BigInt::from(2u32);
    // Trial division is plenty for the coefficient sizes that show up here.
    let limit = BigInt::from(2_000_000u32);
    while &p * &p <= rest && p <= limit {
        let mut count = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            count += 1;
        }
        if count > 0 {
            root *= p.pow(count / 2);
            if count % 2 == 1 {
                core *= &p;
            }
        }
        p += 1u32;
    }
    if rest > BigInt::one() {
        let s = rest.sqrt();
        if &s * &s == rest {
            root *= s;
        } else if p <= limit || rest < &limit * &limit {
            core *= rest;
        } else {
            return None;
        }
    }
    core.to_u64().map(|d| (root, d))
}

fn is_square_free(d: u64) -> bool {
    matches!(square_free_split(&BigInt::from(d)), Some((f, core)) if f.is_one() && core == d)
}

/// `base^exponent`, computed on numerator and denominator separately.
pub fn pow_rational(base: &Rational, exponent: u32) -> Result<Rational, ExactError> {
    if exponent == 0 && base.is_zero() {
        return Err(ExactError::ZeroToZero);
    }
    Ok(Rational::new_raw(
        base.numer().pow(exponent),
        base.denom().pow(exponent),
    ))
}

/// Cap on the bit size of either side of a power-product comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpGuard {
    pub max_bits: u64,
}

impl ExpGuard {
    pub const DEFAULT_BITS: u64 = 1 << 26;

    pub fn new(max_bits: u64) -> Self {
        ExpGuard { max_bits }
    }

    /// Reads [`EXP_GUARD_ENV`], falling back to the default when unset or
    /// unparsable.
    pub fn from_env() -> Self {
        std::env::var(EXP_GUARD_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .map(ExpGuard::new)
            .unwrap_or_default()
    }
}

impl Default for ExpGuard {
    fn default() -> Self {
        ExpGuard::new(Self::DEFAULT_BITS)
    }
}

/// Exact ordering of `∏ lhs_i^{e_i}` against `∏ rhs_j^{f_j}` for strictly
/// positive rational bases.
///
/// Both sides are cleared of denominators and compared as integers. The
/// exponents are first divided by their common gcd, which preserves the
/// ordering of positive quantities.
pub fn cmp_power_products(
    lhs: &[(Rational, u64)],
    rhs: &[(Rational, u64)],
    guard: ExpGuard,
) -> Result<Ordering, ExactError> {
    for (side, list) in [("left", lhs), ("right", rhs)] {
        if let Some(index) = list.iter().position(|(b, _)| !b.is_positive()) {
            return Err(ExactError::NonPositiveBase { side, index });
        }
    }
    let g = lhs
        .iter()
        .chain(rhs)
        .map(|(_, e)| *e)
        .filter(|e| *e != 0)
        .fold(0u64, |acc, e| acc.gcd(&e));
    let g = g.max(1);

    // left integer: lhs numerators and rhs denominators; right: the rest.
    let left_factors: Vec<(&BigInt, u64)> = lhs
        .iter()
        .map(|(b, e)| (b.numer(), e / g))
        .chain(rhs.iter().map(|(b, e)| (b.denom(), e / g)))
        .collect();
    let right_factors: Vec<(&BigInt, u64)> = rhs
        .iter()
        .map(|(b, e)| (b.numer(), e / g))
        .chain(lhs.iter().map(|(b, e)| (b.denom(), e / g)))
        .collect();

    let left = guarded_product(&left_factors, guard)?;
    let right = guarded_product(&right_factors, guard)?;
    Ok(left.cmp(&right))
}

fn guarded_product(factors: &[(&BigInt, u64)], guard: ExpGuard) -> Result<BigInt, ExactError> {
    let mut bits: u64 = 0;
    for (b, e) in factors {
        if b.is_one() || *e == 0 {
            continue;
        }
        bits = bits.saturating_add(b.bits().saturating_mul(*e));
    }
    if bits > guard.max_bits {
        return Err(ExactError::GuardExceeded {
            bits,
            cap: guard.max_bits,
        });
    }
    let mut acc = BigInt::one();
    for (b, e) in factors {
        if b.is_one() || *e == 0 {
            continue;
        }
        let e = u32::try_from(*e).map_err(|_| ExactError::GuardExceeded {
            bits,
            cap: guard.max_bits,
        })?;
        acc *= b.pow(e);
    }
    Ok(acc)
}

/// Element `rat + irr·√radicand` of a real quadratic field.
///
/// Canonical form: `radicand` is square-free, and whenever `irr` is zero the
/// radicand is stored as 1, so a rational value has exactly one
/// representation. Values with radicand 1 embed into every `Q(√d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    rat: Rational,
    irr: Rational,
    radicand: u64,
}

impl QuadNum {
    pub fn new(rat: Rational, irr: Rational, radicand: u64) -> Result<Self, ExactError> {
        if radicand == 0 || !is_square_free(radicand) {
            return Err(ExactError::BadRadicand(radicand));
        }
        if radicand == 1 {
            return Ok(QuadNum::from_rational(rat + irr));
        }
        Ok(QuadNum::canonical(rat, irr, radicand))
    }

    fn canonical(rat: Rational, irr: Rational, radicand: u64) -> Self {
        if irr.is_zero() {
            QuadNum {
                rat,
                irr,
                radicand: 1,
            }
        } else {
            QuadNum { rat, irr, radicand }
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        QuadNum {
            rat: r,
            irr: Rational::zero(),
            radicand: 1,
        }
    }

    pub fn from_int(i: i64) -> Self {
        QuadNum::from_rational(Rational::from_integer(i.into()))
    }

    /// `√r` for a non-negative rational `r`, or `None` for negative input or a
    /// radicand too large to represent.
    pub fn sqrt_rational(r: &Rational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(QuadNum::from_int(0));
        }
        // √(p/q) = √(p·q) / q
        let pq = r.numer() * r.denom();
        let (f, d) = square_free_split(&pq)?;
        let coeff = Rational::new(f, r.denom().clone());
        if d == 1 {
            Some(QuadNum::from_rational(coeff))
        } else {
            Some(QuadNum::canonical(Rational::zero(), coeff, d))
        }
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn irr_part(&self) -> &Rational {
        &self.irr
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rat.clone())
    }

    pub fn sign(&self) -> Sign {
        quad_sign(self)
    }

    pub fn conjugate(&self) -> Self {
        QuadNum::canonical(self.rat.clone(), -self.irr.clone(), self.radicand)
    }

    /// Field norm `rat² − irr²·d`.
    pub fn norm(&self) -> Rational {
        if self.irr.is_zero() {
            return rat_mul(&self.rat, &self.rat);
        }
        let d = Rational::from_integer(self.radicand.into());
        rat_add(&rat_mul(&self.rat, &self.rat), &-rat_mul(&rat_mul(&self.irr, &self.irr), &d))
    }

    /// A rational `b` with `|self| <= b`.
    pub fn abs_upper_bound(&self) -> Rational {
        if self.irr.is_zero() {
            return self.rat.abs();
        }
        let root_ceil = {
            let s = self.radicand.sqrt();
            if s * s == self.radicand {
                s
            } else {
                s + 1
            }
        };
        self.rat.abs() + self.irr.abs() * Rational::from_integer(root_ceil.into())
    }

    fn common_radicand(&self, other: &Self) -> Result<u64, ExactError> {
        match (self.radicand, other.radicand) {
            (a, b) if a == b => Ok(a),
            (1, b) => Ok(b),
            (a, 1) => Ok(a),
            (a, b) => Err(ExactError::RadicandMismatch { left: a, right: b }),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.common_radicand(other)?;
        Ok(QuadNum::canonical(rat_add(&self.rat, &other.rat), rat_add(&self.irr, &other.irr), d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.common_radicand(other)?;
        Ok(QuadNum::canonical(
            rat_add(&self.rat, &-other.rat.clone()),
            rat_add(&self.irr, &-other.irr.clone()),
            d,
        ))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let d = self.common_radicand(other)?;
        if self.irr.is_zero() && other.irr.is_zero() {
            return Ok(QuadNum::from_rational(rat_mul(&self.rat, &other.rat)));
        }
        let dq = Rational::from_integer(d.into());
        let rat = rat_add(&rat_mul(&self.rat, &other.rat), &rat_mul(&rat_mul(&self.irr, &other.irr), &dq));
        let irr = rat_add(&rat_mul(&self.rat, &other.irr), &rat_mul(&self.irr, &other.rat));
        Ok(QuadNum::canonical(rat, irr, d))
    }

    pub fn checked_inv(&self) -> Result<Self, ExactError> {
        let norm = self.norm();
        if norm.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(QuadNum::canonical(
            rat_div(&self.rat, &norm),
            -rat_div(&self.irr, &norm),
            self.radicand,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_mul(&other.checked_inv()?)
    }

    /// Exact ordering, or an error for incompatible radicands.
    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering, ExactError> {
        Ok(match self.checked_sub(other)?.sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }
}

/// Exact sign of `rat + irr·√d`.
pub fn quad_sign(q: &QuadNum) -> Sign {
    let a = Sign::of_rational(&q.rat);
    let b = Sign::of_rational(&q.irr);
    if b == Sign::Zero {
        return a;
    }
    if a == Sign::Zero || a == b {
        return b;
    }
    // Opposite signs: the part with the larger square wins.
    let a2 = &q.rat * &q.rat;
    let b2d = &q.irr * &q.irr * Rational::from_integer(q.radicand.into());
    match a2.cmp(&b2d) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => Sign::Zero,
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_cmp(other).ok()
    }
}

fn expect_compatible<T>(r: Result<T, ExactError>) -> T {
    r.unwrap_or_else(|e| panic!("quadratic-field arithmetic: {e}"))
}

impl Add for QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: QuadNum) -> QuadNum {
        expect_compatible(self.checked_add(&rhs))
    }
}

impl Sub for QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: QuadNum) -> QuadNum {
        expect_compatible(self.checked_sub(&rhs))
    }
}

impl Mul for QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: QuadNum) -> QuadNum {
        expect_compatible(self.checked_mul(&rhs))
    }
}

impl Div for QuadNum {
    type Output = QuadNum;
    fn div(self, rhs: QuadNum) -> QuadNum {
        expect_compatible(self.checked_div(&rhs))
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::canonical(-self.rat, -self.irr, self.radicand)
    }
}

impl Zero for QuadNum {
    fn zero() -> Self {
        QuadNum::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }
}

impl One for QuadNum {
    fn one() -> Self {
        QuadNum::from_int(1)
    }
}

impl From<Rational> for QuadNum {
    fn from(r: Rational) -> Self {
        QuadNum::from_rational(r)
    }
}

fn fmt_irrational(f: &mut fmt::Formatter<'_>, coeff: &Rational, d: u64, lead: bool) -> fmt::Result {
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    if neg {
        f.write_str("-")?;
    } else if !lead {
        f.write_str("+")?;
    }
    if mag.is_one() {
        write!(f, "sqrt({d})")
    } else {
        write!(f, "{mag}*sqrt({d})")
    }
}

/// Formats as `a+b*sqrt(d)`, dropping zero parts and unit coefficients.
impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if self.rat.is_zero() {
            return fmt_irrational(f, &self.irr, self.radicand, true);
        }
        write!(f, "{}", self.rat)?;
        fmt_irrational(f, &self.irr, self.radicand, false)
    }
}

/// Coefficient field for polynomials and rational functions: either
/// [`Rational`] or [`QuadNum`].
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn from_rational(r: Rational) -> Self;

    fn from_int(i: i64) -> Self {
        Self::from_rational(Rational::from_integer(i.into()))
    }

    /// `None` when the quadratic number is not representable in this field.
    fn from_quad(q: &QuadNum) -> Option<Self>;

    fn to_quad(&self) -> QuadNum;

    fn sign(&self) -> Sign;

    /// A rational upper bound on the absolute value.
    fn abs_upper_bound(&self) -> Rational;

    /// Scalar that a nonzero coefficient list is divided by to make it
    /// primitive. The default is the leading (last) coefficient.
    fn content(coeffs: &[Self]) -> Self {
        coeffs
            .iter()
            .rev()
            .find(|c| !c.is_zero())
            .cloned()
            .unwrap_or_else(Self::one)
    }
}

/// Gcd of numerators over lcm of denominators, made positive: dividing by it
/// leaves coprime integer coefficients.
fn rational_content<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    if num.is_zero() {
        Rational::one()
    } else {
        Rational::new(num, den)
    }
}

impl Field for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn from_quad(q: &QuadNum) -> Option<Self> {
        q.to_rational()
    }

    fn to_quad(&self) -> QuadNum {
        QuadNum::from_rational(self.clone())
    }

    fn sign(&self) -> Sign {
        Sign::of_rational(self)
    }

    fn abs_upper_bound(&self) -> Rational {
        self.abs()
    }

    fn content(coeffs: &[Self]) -> Self {
        rational_content(coeffs.iter())
    }
}

impl Field for QuadNum {
    fn from_rational(r: Rational) -> Self {
        QuadNum::from_rational(r)
    }

    fn from_quad(q: &QuadNum) -> Option<Self> {
        Some(q.clone())
    }

    fn to_quad(&self) -> QuadNum {
        self.clone()
    }

    fn sign(&self) -> Sign {
        quad_sign(self)
    }

    fn abs_upper_bound(&self) -> Rational {
        QuadNum::abs_upper_bound(self)
    }

    fn content(coeffs: &[Self]) -> Self {
        if coeffs.iter().all(QuadNum::is_rational) {
            QuadNum::from_rational(rational_content(coeffs.iter().map(|c| &c.rat)))
        } else {
            coeffs
                .iter()
                .rev()
                .find(|c| !c.is_zero())
                .cloned()
                .unwrap_or_else(QuadNum::one)
        }
    }
}

/// Shorthand for `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

/// Shorthand for an integer-valued rational.
pub fn int(p: i64) -> Rational {
    Rational::from_integer(p.into())
}


/// Euclidean gcd. Unlike the binary gcd behind `BigRational`, this is linear
/// in the size of the larger operand when the other one is small.
pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.is_one() {
            return b;
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// `n/d` in lowest terms, reduced with [`gcd_big`].
pub fn rat_from_parts(n: BigInt, d: BigInt) -> Rational {
    assert!(!d.is_zero(), "zero denominator");
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n, d) };
    if d.is_one() {
        return Rational::new_raw(n, d);
    }
    let g = gcd_big(&n, &d);
    if g.is_one() {
        Rational::new_raw(n, d)
    } else {
        Rational::new_raw(n / &g, d / g)
    }
}

pub fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    if a.denom().is_one() && b.denom().is_one() {
        return Rational::from_integer(a.numer() * b.numer());
    }
    rat_from_parts(a.numer() * b.numer(), a.denom() * b.denom())
}

pub fn rat_add(a: &Rational, b: &Rational) -> Rational {
    if a.denom().is_one() && b.denom().is_one() {
        return Rational::from_integer(a.numer() + b.numer());
    }
    if a.denom() == b.denom() {
        return rat_from_parts(a.numer() + b.numer(), a.denom().clone());
    }
    rat_from_parts(
        a.numer() * b.denom() + b.numer() * a.denom(),
        a.denom() * b.denom(),
    )
}

pub fn rat_div(a: &Rational, b: &Rational) -> Rational {
    rat_from_parts(a.numer() * b.denom(), a.denom() * b.numer())
}
