//! Lexer and recursive-descent parser for rational-function expressions in `n`.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" "-"? INT)?
//! atom   := INT | "n" | "sqrt" "(" expr ")" | "(" expr ")"
//! ```
//!
//! Values are built as [`RatFun<QuadNum>`]; `sqrt` only accepts a constant
//! argument whose square root lies in some `Q(√d)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{Field, QuadNum, Rational};
use crate::ratfun::{Poly, RatFun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(i) => write!(f, "integer {i}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: &str = "+-*/^(){};,=";

/// Tokenize `src`. `#` starts a comment running to the end of the line.
pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut pos = Pos { line: 1, col: 1 };
    let advance = |pos: &mut Pos, c: char| {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            chars.next();
            advance(&mut pos, c);
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance(&mut pos, c);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                advance(&mut pos, d);
            }
            out.push((Tok::Int(s.parse().unwrap()), start));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                advance(&mut pos, d);
            }
            out.push((Tok::Ident(s), start));
        } else if SYMBOLS.contains(c) {
            chars.next();
            advance(&mut pos, c);
            out.push((Tok::Sym(c), start));
        } else {
            return Err(ParseError::new(start, format!("unexpected character '{c}'")));
        }
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

/// Token cursor shared by the expression parser and the sequence DSL.
pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type Expr = RatFun<QuadNum>;

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn error<T>(&self, what: &str) -> Result<T, ParseError> {
        Err(ParseError::new(
            self.pos(),
            format!("expected {what}, found {}", self.peek()),
        ))
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.error(&format!("'{c}'"))
        }
    }

    pub fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == name) {
            self.next();
            Ok(())
        } else {
            self.error(&format!("'{name}'"))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => self.error("identifier"),
        }
    }

    pub fn int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.next();
                Ok(i)
            }
            _ => self.error("integer"),
        }
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    /// Optionally signed rational literal `-p/q`.
    pub fn rational(&mut self) -> Result<Rational, ParseError> {
        let neg = self.eat_sym('-');
        let p = self.int()?;
        let q = if self.eat_sym('/') {
            let pos = self.pos();
            let q = self.int()?;
            if q.is_zero() {
                return Err(ParseError::new(pos, "zero denominator"));
            }
            q
        } else {
            BigInt::from(1)
        };
        let r = Rational::new(p, q);
        Ok(if neg { -r } else { r })
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            let pos = self.pos();
            if self.eat_sym('+') {
                let rhs = self.term()?;
                acc = combine(pos, &acc, &rhs, |a, b| a + b)?;
            } else if self.eat_sym('-') {
                let rhs = self.term()?;
                acc = combine(pos, &acc, &rhs, |a, b| a - b)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let pos = self.pos();
            if self.eat_sym('*') {
                let rhs = self.unary()?;
                acc = combine(pos, &acc, &rhs, |a, b| a * b)?;
            } else if self.eat_sym('/') {
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return Err(ParseError::new(pos, "division by zero"));
                }
                acc = combine(pos, &acc, &rhs, |a, b| a / b)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym('-') {
            Ok(-self.unary()?)
        } else if self.eat_sym('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let neg = self.eat_sym('-');
        let e = self
            .int()?
            .to_u32()
            .filter(|e| *e <= 4096)
            .ok_or_else(|| ParseError::new(pos, "exponent too large"))?;
        let p = base.pow(e);
        if neg {
            p.inv().map_err(|_| ParseError::new(pos, "zero raised to a negative power"))
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.next();
                Ok(RatFun::constant(QuadNum::from_rational(Rational::from_integer(i))))
            }
            Tok::Ident(s) if s == "n" => {
                self.next();
                Ok(RatFun::var())
            }
            Tok::Ident(s) if s == "sqrt" => {
                self.next();
                self.expect_sym('(')?;
                let arg = self.expr()?;
                self.expect_sym(')')?;
                let root = arg
                    .as_constant()
                    .and_then(|c| c.to_rational())
                    .and_then(|r| QuadNum::sqrt_rational(&r))
                    .ok_or_else(|| {
                        ParseError::new(pos, "sqrt needs a nonnegative rational constant")
                    })?;
                Ok(RatFun::constant(root))
            }
            Tok::Sym('(') => {
                self.next();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            _ => self.error("a number, 'n', 'sqrt' or '('"),
        }
    }
}

fn combine(
    pos: Pos,
    a: &Expr,
    b: &Expr,
    op: impl Fn(&Expr, &Expr) -> Expr,
) -> Result<Expr, ParseError> {
    let (da, db) = (a.radicand(), b.radicand());
    if da != 1 && db != 1 && da != db {
        return Err(ParseError::new(
            pos,
            format!("cannot mix sqrt({da}) and sqrt({db})"),
        ));
    }
    Ok(op(a, b))
}

/// Parse a whole string as a rational function of `n`.
pub fn parse_ratfun(src: &str) -> Result<RatFun<QuadNum>, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parse a rational function and convert it to coefficient field `F`.
pub fn parse_ratfun_in<F: Field>(src: &str) -> Result<RatFun<F>, ParseError> {
    let q = parse_ratfun(src)?;
    let conv = |p: &Poly<QuadNum>| -> Option<Poly<F>> {
        Some(Poly::new(
            p.coeffs().iter().map(F::from_quad).collect::<Option<Vec<_>>>()?,
        ))
    };
    let (n, d) = conv(q.numer())
        .zip(conv(q.denom()))
        .ok_or_else(|| ParseError::new(Pos::default(), "coefficient outside the target field"))?;
    RatFun::new(n, d).map_err(|e| ParseError::new(Pos::default(), e.to_string()))
}

/// Parse a constant such as `-3/2-sqrt(2)` or `1/32*sqrt(2)`.
pub fn parse_scalar(src: &str) -> Result<QuadNum, ParseError> {
    parse_ratfun(src)?
        .as_constant()
        .ok_or_else(|| ParseError::new(Pos::default(), "expected a constant, found an expression in n"))
}
