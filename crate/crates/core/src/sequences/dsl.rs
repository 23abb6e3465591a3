//! ```text
//! spec       := "sequence" IDENT "{" item* "}"
//! item       := ("u" | "v") "(" "n" ")" "=" ratexpr ";"
//!             | "init" initlist ";"
//!             | "extra" "(" "n" ")" "=" signedterm ";"
//! initlist   := "a" "(" INT ")" "=" rational ("," "a" "(" INT ")" "=" rational)*
//! signedterm := "(-1)^n" "*" rational | rational
//! ```

use num_traits::{Signed, ToPrimitive};

use super::{Extra, Rule, SeqError, SeqKind, SequenceSpec, TermCache};
use crate::exactnum::{Field, Rational};
use crate::expr::{ParseError, Parser, Pos, Tok};
use crate::ratfun::{sturm_largest_root_bound, RatFun};

/// Terms inspected when locating `valid_from`.
const PROBE_TERMS: i64 = 50;

pub fn parse_spec(text: &str) -> Result<SequenceSpec, SeqError> {
    let raw = parse_raw(text).map_err(SeqError::Syntax)?;
    build(raw)
}

struct Raw {
    name: String,
    u: Option<(RatFun<Rational>, Pos)>,
    v: Option<(RatFun<Rational>, Pos)>,
    extra: Option<Extra>,
    init: Vec<(i64, Rational, Pos)>,
}

fn parse_raw(text: &str) -> Result<Raw, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_ident("sequence")?;
    let name = p.ident()?;
    p.expect_sym('{')?;
    let mut raw = Raw {
        name,
        u: None,
        v: None,
        extra: None,
        init: Vec::new(),
    };
    while !p.eat_sym('}') {
        let pos = p.pos();
        let key = match p.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return p.error("'u', 'v', 'init', 'extra' or '}'"),
        };
        p.next();
        match key.as_str() {
            "u" | "v" => {
                arg_n(&mut p)?;
                p.expect_sym('=')?;
                let epos = p.pos();
                let e = p.expr()?;
                let r = e
                    .to_rational()
                    .ok_or_else(|| ParseError::new(epos, "coefficients must be rational"))?;
                let slot = if key == "u" { &mut raw.u } else { &mut raw.v };
                if slot.is_some() {
                    return Err(ParseError::new(pos, format!("duplicate {key}(n)")));
                }
                *slot = Some((r, epos));
            }
            "init" => loop {
                let ipos = p.pos();
                p.expect_ident("a")?;
                p.expect_sym('(')?;
                let neg = p.eat_sym('-');
                let idx = p
                    .int()?
                    .to_i64()
                    .ok_or_else(|| ParseError::new(ipos, "index out of range"))?;
                p.expect_sym(')')?;
                p.expect_sym('=')?;
                let val = p.rational()?;
                raw.init.push((if neg { -idx } else { idx }, val, ipos));
                if !p.eat_sym(',') {
                    break;
                }
            },
            "extra" => {
                arg_n(&mut p)?;
                p.expect_sym('=')?;
                raw.extra = Some(signed_term(&mut p)?);
            }
            _ => {
                return Err(ParseError::new(
                    pos,
                    format!("expected 'u', 'v', 'init', 'extra' or '}}', found '{key}'"),
                ))
            }
        }
        p.expect_sym(';')?;
    }
    p.expect_eof()?;
    Ok(raw)
}

fn arg_n(p: &mut Parser) -> Result<(), ParseError> {
    p.expect_sym('(')?;
    p.expect_ident("n")?;
    p.expect_sym(')')
}

fn signed_term(p: &mut Parser) -> Result<Extra, ParseError> {
    let alternating = *p.peek() == Tok::Sym('(')
        && *p.peek_at(1) == Tok::Sym('-')
        && *p.peek_at(2) == Tok::Int(1.into());
    if alternating {
        for c in ['(', '-'] {
            p.expect_sym(c)?;
        }
        p.int()?;
        p.expect_sym(')')?;
        p.expect_sym('^')?;
        p.expect_ident("n")?;
        p.expect_sym('*')?;
    }
    Ok(Extra {
        alternating,
        coeff: p.rational()?,
    })
}

fn semantic(msg: impl Into<String>) -> SeqError {
    SeqError::Semantic(msg.into())
}

fn build(raw: Raw) -> Result<SequenceSpec, SeqError> {
    let (u, _) = raw.u.ok_or_else(|| semantic("missing u(n)"))?;
    let (v, _) = raw.v.ok_or_else(|| semantic("missing v(n)"))?;
    let mut init: Vec<(i64, Rational)> = raw.init.into_iter().map(|(i, r, _)| (i, r)).collect();
    init.sort_by_key(|(i, _)| *i);
    match init.as_slice() {
        [] => return Err(semantic("missing initial terms")),
        [_] => return Err(semantic("an order-2 recurrence needs two initial terms")),
        [(a, _), (b, _)] if b - a != 1 => {
            return Err(semantic(format!("initial indices {a} and {b} are not consecutive")))
        }
        [_, _] => {}
        _ => return Err(semantic("an order-2 recurrence takes exactly two initial terms")),
    }
    let start = init[1].0 + 1;
    for f in [&u, &v] {
        if let Some(at) = first_pole(f, start) {
            return Err(SeqError::Pole { at });
        }
    }
    let mut spec = SequenceSpec {
        name: raw.name,
        kind: SeqKind::DslRecurrence,
        order: 2,
        u: Some(u),
        v: Some(v),
        extra: raw.extra,
        valid_from: init[0].0,
        initial_terms: init,
        rule: Rule::Recurrence,
        integral: false,
    };
    let mut cache = TermCache::new(spec.clone());
    let first = spec.first_index();
    let terms = cache.range(first, first + PROBE_TERMS - 1)?;
    if let Some(last_bad) = terms.iter().rposition(|t| !t.is_positive()) {
        spec.valid_from = first + last_bad as i64 + 1;
    }
    Ok(spec)
}

/// Smallest integer `n ≥ start` with `denom(n) = 0`; complete, because every
/// real root lies below the Sturm bound.
fn first_pole(f: &RatFun<Rational>, start: i64) -> Option<i64> {
    let d = f.denom();
    if d.is_constant() {
        return None;
    }
    let rho = sturm_largest_root_bound(d);
    let top = rho.ceil().to_integer().to_i64()?;
    (start..=top).find(|&n| d.eval_int(n).sign() == crate::exactnum::Sign::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::builtin;

    const MOTZKIN2: &str =
        "sequence motzkin2 { u(n) = (2*n+1)/(n+2); v(n) = (3*n-3)/(n+2); init a(0)=1, a(1)=1; }";

    #[test]
    fn motzkin_from_text_matches_builtin() {
        let spec = parse_spec(MOTZKIN2).unwrap();
        assert_eq!(spec.name, "motzkin2");
        let mut a = TermCache::new(spec);
        let mut b = TermCache::new(builtin("motzkin", 0).unwrap());
        assert_eq!(a.range(0, 49).unwrap(), b.range(0, 49).unwrap());
    }

    #[test]
    fn pole_is_semantic_error() {
        let e = parse_spec("sequence bad { u(n) = 1/(n-3); v(n) = 1; init a(0)=1, a(1)=1; }");
        assert_eq!(e, Err(SeqError::Pole { at: 3 }));
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_spec("sequence x { u(n) = ; }") {
            Err(SeqError::Syntax(e)) => assert_eq!(e.pos, Pos { line: 1, col: 21 }),
            other => panic!("{other:?}"),
        }
        match parse_spec("sequence x {\n  w(n) = 1;\n}") {
            Err(SeqError::Syntax(e)) => assert_eq!(e.pos, Pos { line: 2, col: 3 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn derangement_with_extra_and_comments() {
        let src = "# derangements\nsequence der {\n  u(n) = n;\n  v(n) = 0;\n  extra(n) = (-1)^n*1;\n  init a(0)=1, a(1)=0;\n}";
        let spec = parse_spec(src).unwrap();
        assert_eq!(spec.valid_from, 2);
        let mut a = TermCache::new(spec);
        let mut b = TermCache::new(builtin("derangement", 0).unwrap());
        assert_eq!(a.range(0, 49).unwrap(), b.range(0, 49).unwrap());
    }

    #[test]
    fn semantic_checks() {
        assert!(matches!(
            parse_spec("sequence s { u(n) = 1; v(n) = 1; }"),
            Err(SeqError::Semantic(_))
        ));
        assert!(matches!(
            parse_spec("sequence s { u(n) = 1; v(n) = 1; init a(0)=1, a(2)=1; }"),
            Err(SeqError::Semantic(_))
        ));
        assert!(matches!(
            parse_spec("sequence s { u(n) = sqrt(2); v(n) = 1; init a(0)=1, a(1)=1; }"),
            Err(SeqError::Syntax(_))
        ));
        let fib = parse_spec("sequence fib { u(n) = 1; v(n) = 1; init a(0)=0, a(1)=1; }").unwrap();
        assert_eq!(fib.valid_from, 1);
        let neg = parse_spec("sequence s { u(n)=1; v(n)=0; extra(n) = -1/2; init a(0)=1, a(1)=1/3; }");
        assert!(neg.is_ok());
    }
}
