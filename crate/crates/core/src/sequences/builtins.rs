use super::{Extra, Rule, SeqError, SeqKind, SequenceSpec};
use crate::exactnum::{int, Rational};
use crate::expr::parse_ratfun_in;
use crate::ratfun::RatFun;

const NAMES: &[&str] = &[
    "catalan",
    "central_binomial",
    "motzkin",
    "fine",
    "delannoy",
    "polyhex",
    "domb",
    "derangement",
    "harmonic",
    "bernoulli_abs_even",
    "bell",
];

pub fn builtin_names() -> &'static [&'static str] {
    NAMES
}

fn rf(src: &str) -> RatFun<Rational> {
    parse_ratfun_in(src).expect("builtin coefficient")
}

fn three_term(name: &str, u: &str, v: &str, a0: i64, a1: i64, valid_from: i64) -> SequenceSpec {
    SequenceSpec {
        name: name.into(),
        kind: SeqKind::Builtin,
        order: 2,
        u: Some(rf(u)),
        v: Some(rf(v)),
        extra: None,
        initial_terms: vec![(0, int(a0)), (1, int(a1))],
        valid_from,
        rule: Rule::Recurrence,
        integral: true,
    }
}

fn closed(name: &str, rule: Rule, first: (i64, Rational), integral: bool) -> SequenceSpec {
    SequenceSpec {
        name: name.into(),
        kind: SeqKind::Builtin,
        order: 0,
        u: None,
        v: None,
        extra: None,
        valid_from: first.0,
        initial_terms: vec![first],
        rule,
        integral,
    }
}

/// Look up a builtin by name. `m` is the exponent of the generalized harmonic
/// numbers and is ignored for every other sequence.
pub fn builtin(name: &str, m: u32) -> Result<SequenceSpec, SeqError> {
    Ok(match name {
        "catalan" => closed(name, Rule::Catalan, (0, int(1)), true),
        "central_binomial" => closed(name, Rule::CentralBinomial, (0, int(1)), true),
        "motzkin" => three_term(name, "(2*n+1)/(n+2)", "(3*n-3)/(n+2)", 1, 1, 0),
        "fine" => three_term(name, "(7*n-5)/(2*n+2)", "(2*n-1)/(n+1)", 1, 0, 2),
        "delannoy" => three_term(name, "3*(2*n-1)/n", "-(n-1)/n", 1, 3, 0),
        "polyhex" => three_term(name, "(6*n-3)/(n+1)", "-(5*n-10)/(n+1)", 1, 1, 0),
        "domb" => three_term(
            name,
            "2*(2*n-1)*(5*n^2-5*n+2)/n^3",
            "-64*(n-1)^3/n^3",
            1,
            4,
            0,
        ),
        "derangement" => SequenceSpec {
            extra: Some(Extra {
                alternating: true,
                coeff: int(1),
            }),
            ..three_term(name, "n", "0", 1, 0, 2)
        },
        "harmonic" => {
            if m == 0 {
                return Err(SeqError::Semantic("harmonic needs m >= 1".into()));
            }
            closed(name, Rule::Harmonic { m }, (1, int(1)), false)
        }
        "bernoulli_abs_even" => closed(
            name,
            Rule::BernoulliAbsEven,
            (1, Rational::new(1.into(), 6.into())),
            false,
        ),
        "bell" => closed(name, Rule::Bell, (0, int(1)), true),
        _ => return Err(SeqError::Unknown(name.into())),
    })
}
