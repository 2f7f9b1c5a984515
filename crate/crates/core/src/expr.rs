//! Expression grammar for table entries.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' int)?
//! base   := rational | 't' | 'alpha' | ident | '(' expr ')'
//! ```
//!
//! Rationals are `p` or `p/q`. Exponents are integer literals; a negative
//! exponent (`t^-1` or `t^(-1)`) is accepted only on `t`. Identifiers other
//! than `t` and `alpha` are accepted only when the caller allows them (basis
//! vectors `Y3`, named polynomials `p7`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
    pub message: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: ", self.line, self.column)?;
        if let Some(m) = &self.message {
            write!(f, "{m}; ")?;
        }
        if self.expected.is_empty() {
            write!(f, "found {}", self.found)
        } else {
            write!(f, "expected one of {}, found {}", self.expected.join(", "), self.found)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number `{r}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// Parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    Num(Rational),
    T,
    Alpha,
    Symbol(String),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Pow(Box<Expression>, i64),
}

/// Symbol resolution failures during evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("product of two non-scalar factors is not linear")]
    Nonlinear,
    #[error("a basis vector cannot be raised to a power")]
    VectorPower,
}

/// Value of an expression that may contain basis vectors linearly.
/// Key `None` is the scalar part.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Linear {
    pub parts: BTreeMap<Option<String>, Scalar>,
}

impl Linear {
    fn scalar(s: Scalar) -> Self {
        let mut parts = BTreeMap::new();
        if !s.is_zero() {
            parts.insert(None, s);
        }
        Linear { parts }
    }

    fn as_scalar(&self) -> Option<Scalar> {
        match self.parts.len() {
            0 => Some(Scalar::zero()),
            1 => self.parts.get(&None).cloned(),
            _ => None,
        }
    }

    fn combine(mut self, other: Linear, sign: bool) -> Linear {
        for (k, v) in other.parts {
            let slot = self.parts.entry(k.clone()).or_default();
            if sign {
                *slot += &v;
            } else {
                *slot -= &v;
            }
            if slot.is_zero() {
                self.parts.remove(&k);
            }
        }
        self
    }

    fn times(&self, s: &Scalar) -> Linear {
        Linear {
            parts: self
                .parts
                .iter()
                .map(|(k, v)| (k.clone(), v * s))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }
}

impl Expression {
    /// Value as a scalar; any identifier is an error.
    pub fn to_scalar(&self) -> Result<Scalar, EvalError> {
        self.eval_with(&|_| None)
    }

    /// Value as a scalar, resolving identifiers through `env`.
    pub fn eval_with(&self, env: &dyn Fn(&str) -> Option<Scalar>) -> Result<Scalar, EvalError> {
        let lin = self.eval_linear(env, &|_| false)?;
        lin.as_scalar().ok_or(EvalError::Nonlinear)
    }

    /// Value as a linear combination of the identifiers accepted by `is_vector`.
    pub fn eval_linear(
        &self,
        env: &dyn Fn(&str) -> Option<Scalar>,
        is_vector: &dyn Fn(&str) -> bool,
    ) -> Result<Linear, EvalError> {
        Ok(match self {
            Expression::Num(r) => Linear::scalar(Scalar::constant(r.clone())),
            Expression::T => Linear::scalar(Scalar::t()),
            Expression::Alpha => Linear::scalar(Scalar::alpha()),
            Expression::Symbol(s) if is_vector(s) => {
                let mut parts = BTreeMap::new();
                parts.insert(Some(s.clone()), Scalar::one());
                Linear { parts }
            }
            Expression::Symbol(s) => {
                Linear::scalar(env(s).ok_or_else(|| EvalError::UnknownSymbol(s.clone()))?)
            }
            Expression::Neg(a) => a.eval_linear(env, is_vector)?.times(&Scalar::from_int(-1)),
            Expression::Add(a, b) => a
                .eval_linear(env, is_vector)?
                .combine(b.eval_linear(env, is_vector)?, true),
            Expression::Sub(a, b) => a
                .eval_linear(env, is_vector)?
                .combine(b.eval_linear(env, is_vector)?, false),
            Expression::Mul(a, b) => {
                let x = a.eval_linear(env, is_vector)?;
                let y = b.eval_linear(env, is_vector)?;
                match (x.as_scalar(), y.as_scalar()) {
                    (Some(s), _) => y.times(&s),
                    (_, Some(s)) => x.times(&s),
                    _ => return Err(EvalError::Nonlinear),
                }
            }
            Expression::Pow(a, e) => {
                let base = a
                    .eval_linear(env, is_vector)?
                    .as_scalar()
                    .ok_or(EvalError::VectorPower)?;
                if *e >= 0 {
                    Linear::scalar(base.pow(*e as u32))
                } else {
                    // Only `t` reaches here, enforced by the parser.
                    Linear::scalar(Scalar::t_pow(*e))
                }
            }
        })
    }

    /// Every identifier other than `t` and `alpha`.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expression::Symbol(s) => {
                out.insert(s.clone());
            }
            Expression::Neg(a) | Expression::Pow(a, _) => a.collect_symbols(out),
            Expression::Add(a, b) | Expression::Sub(a, b) | Expression::Mul(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => {}
        }
    }

    pub fn uses_t(&self) -> bool {
        match self {
            Expression::T => true,
            Expression::Neg(a) | Expression::Pow(a, _) => a.uses_t(),
            Expression::Add(a, b) | Expression::Sub(a, b) | Expression::Mul(a, b) => a.uses_t() || b.uses_t(),
            _ => false,
        }
    }

    pub fn uses_alpha(&self) -> bool {
        match self {
            Expression::Alpha => true,
            Expression::Neg(a) | Expression::Pow(a, _) => a.uses_alpha(),
            Expression::Add(a, b) | Expression::Sub(a, b) | Expression::Mul(a, b) => {
                a.uses_alpha() || b.uses_alpha()
            }
            _ => false,
        }
    }
}

const SUM: u8 = 0;
const PRODUCT: u8 = 1;
const FACTOR: u8 = 2;
const ATOM: u8 = 3;

fn render(e: &Expression, level: u8, head: bool) -> String {
    let wrap = |needs: bool, inner: String| if needs { format!("({inner})") } else { inner };
    match e {
        Expression::Num(r) if r < &Rational::zero() => format!("({})", crate::scalar::fmt_rational(r)),
        Expression::Num(r) => crate::scalar::fmt_rational(r),
        Expression::T => "t".into(),
        Expression::Alpha => "alpha".into(),
        Expression::Symbol(s) => s.clone(),
        Expression::Neg(a) => {
            if head && level == SUM {
                format!("-{}", render(a, PRODUCT, false))
            } else {
                format!("(-{})", render(a, PRODUCT, false))
            }
        }
        Expression::Add(a, b) | Expression::Sub(a, b) => {
            let op = if matches!(e, Expression::Add(..)) { "+" } else { "-" };
            let needs = level > SUM;
            let inner = format!("{} {op} {}", render(a, SUM, head || needs), render(b, PRODUCT, false));
            wrap(needs, inner)
        }
        Expression::Mul(a, b) => wrap(
            level > PRODUCT,
            format!("{}*{}", render(a, PRODUCT, false), render(b, FACTOR, false)),
        ),
        Expression::Pow(a, k) => wrap(level > FACTOR, format!("{}^{k}", render(a, ATOM, false))),
    }
}

/// Minimal-parenthesis rendering; parsing the output yields the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, SUM, true))
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

struct Spanned {
    tok: Tok,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, col: usize, found: String, message: &str) -> ParseError {
        ParseError {
            line: self.line,
            column: self.col0 + col + 1,
            expected: Vec::new(),
            found,
            message: Some(message.into()),
        }
    }

    fn digits(&mut self) -> BigInt {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .expect("digits")
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let column = self.pos;
            let Some(&c) = self.src.get(self.pos) else {
                out.push(Spanned { tok: Tok::Eof, column });
                return Ok(out);
            };
            let tok = match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'0'..=b'9' => {
                    let num = self.digits();
                    let den = if self.src.get(self.pos) == Some(&b'/')
                        && self.src.get(self.pos + 1).is_some_and(|d| d.is_ascii_digit())
                    {
                        self.pos += 1;
                        let d = self.digits();
                        if d.is_zero() {
                            return Err(self.err(column, "`/0`".into(), "zero denominator"));
                        }
                        d
                    } else {
                        BigInt::one()
                    };
                    out.push(Spanned {
                        tok: Tok::Num(Rational::new(num, den)),
                        column,
                    });
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                    out.push(Spanned {
                        tok: Tok::Ident(s.to_string()),
                        column,
                    });
                    continue;
                }
                _ => {
                    let ch = std::str::from_utf8(&self.src[self.pos..])
                        .ok()
                        .and_then(|s| s.chars().next())
                        .unwrap_or('?');
                    return Err(self.err(column, format!("`{ch}`"), "unexpected character"));
                }
            };
            self.pos += 1;
            out.push(Spanned { tok, column });
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    col0: usize,
    allow_ident: &'a dyn Fn(&str) -> bool,
}

const BASE_START: [&str; 5] = ["number", "`t`", "`alpha`", "`(`", "`-`"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str], message: Option<&str>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: self.line,
            // 1-based column.
            column: self.col0 + s.column + 1,
            expected: expected.iter().map(|e| e.to_string()).collect(),
            found: s.tok.describe(),
            message: message.map(str::to_string),
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = if *self.peek() == Tok::Minus {
            self.bump();
            Expression::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expression::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expression::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expression::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expression, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let e = match self.peek() {
            Tok::Num(r) if r.is_integer() => {
                let v: i64 = r
                    .numer()
                    .try_into()
                    .map_err(|_| self.error(&["integer exponent"], Some("exponent too large")))?;
                if v > u32::MAX as i64 {
                    return Err(self.error(&["integer exponent"], Some("exponent too large")));
                }
                self.bump();
                if neg {
                    -v
                } else {
                    v
                }
            }
            _ => {
                let exp: &[&str] = if neg || paren { &["integer"] } else { &["integer", "`-`", "`(`"] };
                return Err(self.error(exp, Some("dangling exponent")));
            }
        };
        if paren {
            if *self.peek() != Tok::RParen {
                return Err(self.error(&["`)`"], None));
            }
            self.bump();
        }
        if e < 0 && base != Expression::T {
            return Err(ParseError {
                message: Some("negative exponent allowed only on t".into()),
                ..self.error(&[], None)
            });
        }
        Ok(Expression::Pow(Box::new(base), e))
    }

    fn base(&mut self) -> Result<Expression, ParseError> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.bump();
                Ok(Expression::Num(r))
            }
            Tok::Ident(s) if s == "t" => {
                self.bump();
                Ok(Expression::T)
            }
            Tok::Ident(s) if s == "alpha" => {
                self.bump();
                Ok(Expression::Alpha)
            }
            Tok::Ident(s) if (self.allow_ident)(&s) => {
                self.bump();
                Ok(Expression::Symbol(s))
            }
            Tok::Ident(_) => Err(self.error(&BASE_START[..4], Some("unknown symbol"))),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`+`", "`-`", "`*`", "`^`"], None));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.error(&BASE_START[..4], None)),
        }
    }
}

/// Parses a standalone expression in `t` and `alpha`.
pub fn parse_expression(text: &str) -> Result<Expression, ParseError> {
    parse_at(text, 1, 0, &|_| false)
}

/// Parses `text` found on `line` starting at byte offset `col0`, accepting
/// identifiers for which `allow_ident` holds.
pub fn parse_at(
    text: &str,
    line: usize,
    col0: usize,
    allow_ident: &dyn Fn(&str) -> bool,
) -> Result<Expression, ParseError> {
    let toks = Lexer {
        src: text.as_bytes(),
        pos: 0,
        line,
        col0,
    }
    .tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        col0,
        allow_ident,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["`+`", "`-`", "`*`", "`^`", "end of input"], None));
    }
    Ok(e)
}

/// Parses and evaluates a scalar expression in `t` and `alpha`.
pub fn parse_scalar(text: &str) -> Result<Scalar, ParseError> {
    let e = parse_expression(text)?;
    Ok(e.to_scalar().expect("no identifiers accepted"))
}

/// Symbol accepted by [`parse_at`] for basis vectors with the given prefix
/// (`Y3`, `X10`).
pub fn basis_symbol_index(prefix: char, s: &str) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}
