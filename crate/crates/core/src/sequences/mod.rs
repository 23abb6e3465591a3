//! Exact sequence generation: the builtin sequences, order-2 recurrences read
//! from a small text format, and a memoizing term cache.

mod builtins;
mod cache;
mod dsl;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::expr::ParseError;
use crate::ratfun::RatFun;

pub use builtins::{builtin, builtin_names};
pub use cache::{TermCache, DEFAULT_CEILING};
pub use dsl::parse_spec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("index {n} is below the first defined index {first}")]
    BelowRange { n: i64, first: i64 },
    #[error("index {n} exceeds the cache ceiling of {ceiling} terms")]
    CeilingExceeded { n: i64, ceiling: usize },
    #[error("recurrence coefficient has a pole at n = {at}")]
    Pole { at: i64 },
    #[error("zero predecessor: term at index {at} is 0")]
    ZeroPredecessor { at: i64 },
    #[error("term at index {at} is not positive")]
    NonPositive { at: i64 },
    #[error("unknown sequence {0:?}")]
    Unknown(String),
    #[error("syntax error at {0}")]
    Syntax(ParseError),
    #[error("{0}")]
    Semantic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeqKind {
    Builtin,
    DslRecurrence,
}

/// How term `n` is obtained from the earlier ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `a_n = u(n)a_{n−1} + v(n)a_{n−2} + extra(n)`.
    Recurrence,
    Catalan,
    CentralBinomial,
    Harmonic { m: u32 },
    BernoulliAbsEven,
    Bell,
}

/// Inhomogeneous part `coeff` or `(−1)^n · coeff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extra {
    pub alternating: bool,
    pub coeff: Rational,
}

impl Extra {
    pub fn at(&self, n: i64) -> Rational {
        if self.alternating && n % 2 != 0 {
            -self.coeff.clone()
        } else {
            self.coeff.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub name: String,
    pub kind: SeqKind,
    pub order: usize,
    pub u: Option<RatFun<Rational>>,
    pub v: Option<RatFun<Rational>>,
    pub extra: Option<Extra>,
    pub initial_terms: Vec<(i64, Rational)>,
    /// Smallest index from which every term is positive.
    pub valid_from: i64,
    pub rule: Rule,
    /// The literature defines the sequence over the integers.
    pub integral: bool,
}

impl SequenceSpec {
    pub fn first_index(&self) -> i64 {
        self.initial_terms[0].0
    }

    /// `(u, v)` when the sequence is a three-term recurrence.
    pub fn three_term(&self) -> Option<(&RatFun<Rational>, &RatFun<Rational>)> {
        match (&self.rule, &self.u, &self.v, &self.extra) {
            (Rule::Recurrence, Some(u), Some(v), None) if !v.is_zero() => Some((u, v)),
            _ => None,
        }
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
