//! Exact verification and certification of log-concavity, log-convexity and
//! related log-behavior of combinatorial sequences.

pub mod boundforge;
pub mod certify;
pub mod exactnum;
pub mod expr;
pub mod logcheck;
pub mod reproduce;
pub mod ratfun;
pub mod sequences;
pub mod serde_util;
