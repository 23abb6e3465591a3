//! Univariate polynomials and rational functions in `n` over [`Rational`] or
//! [`QuadNum`], with exact positivity certificates for all integers `n ≥ N`.
//!
//! [`Rational`]: crate::exactnum::Rational
//! [`QuadNum`]: crate::exactnum::QuadNum

mod poly;
mod positivity;
#[allow(clippy::module_inception)]
mod ratfun;
mod sqrt;

use thiserror::Error;

use crate::exactnum::ExactError;

pub use poly::{Poly, SturmChain};
pub use positivity::{
    cauchy_bound, certify_positive, positivity_threshold, sturm_largest_root_bound,
    PositivityCertificate, PositivityMethod, PositivityWitness,
};
pub use ratfun::{RadicalRatio, RatFun};
pub use sqrt::{exact_sqrt, poly_sqrt_decompose, sqrt_prefix, SqrtMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFunError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("pole at n = {at}")]
    Pole { at: i64 },
    #[error("radicand at n = {at} is not a rational number")]
    NonRationalRadicand { at: i64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositivityError {
    #[error("refuted at n = {at} (value {value})")]
    Refuted { at: i64, value: String },
    #[error("pole at n = {at}")]
    Pole { at: i64 },
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
}

impl PositivityError {
    /// Index of the violation, if the error names one.
    pub fn index(&self) -> Option<i64> {
        match self {
            PositivityError::Refuted { at, .. } | PositivityError::Pole { at } => Some(*at),
            PositivityError::InvalidWitness(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("cannot take the square root of the zero polynomial")]
    Zero,
    #[error("polynomial has odd degree {0}")]
    OddDegree(usize),
    #[error("leading coefficient {0} is not a positive rational")]
    LeadingNotSquarable(String),
    #[error("square root needs sqrt({1}) but the coefficients live in Q(sqrt({0}))")]
    RadicandMismatch(u64, u64),
    #[error("remainder {remainder} after removing ({root})^2 is not constant")]
    NonConstantRemainder { root: String, remainder: String },
    #[error("remainder {remainder} after removing ({root})^2 has the wrong sign")]
    WrongSign { root: String, remainder: String },
}
