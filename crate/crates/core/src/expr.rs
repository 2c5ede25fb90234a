//! Expression language for the command line front end.
//!
//! ```text
//! expr   := sum ('@' sum)*
//! sum    := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' exponent)?
//! atom   := 'x' | number | name '(' args ')' | 'log^' int '(' expr ')' | '(' expr ')'
//! ```
//!
//! `@` is right composition and binds loosest, left to right. `inv` is the
//! compositional inverse; `1/s` the reciprocal. `O(m)` adds a cutoff, so the
//! canonical text form of every series parses back to itself.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use crate::compose::compose;
use crate::conjugacy::{abel, conjugator, iterate, AbelResult};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::invert::comp_inverse;
use crate::scalar::{Coeff, ScalarMode};
use crate::series::Series;
use crate::translog::{exp_s, log_s, pow_s};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    X,
    Num(Number),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Compose(Box<Expr>, Box<Expr>),
    /// `log^k(e)`, `k ≥ 1`.
    Log(usize, Box<Expr>),
    Call(String, Vec<Expr>),
}

/// A numeric literal as written; its value depends on the scalar mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Number {
    pub digits: String,
    pub precision: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.1.is_ascii_digit())) {
            let mut s = String::new();
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                s.push(chars[i].1);
                i += 1;
            }
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    s.extend(chars[i..j].iter().map(|c| c.1));
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        s.push(chars[i].1);
                        i += 1;
                    }
                }
            }
            let mut precision = None;
            if i < chars.len() && chars[i].1 == '~' {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let p: String = chars[start..i].iter().map(|c| c.1).collect();
                precision = Some(p.parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: "expected precision after `~`".into(),
                })?);
            }
            if s.matches('.').count() > 1 {
                return Err(Error::Syntax { pos, msg: format!("malformed number `{s}`") });
            }
            out.push((pos, Tok::Num(Number { digits: s, precision })));
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                s.push(chars[i].1);
                i += 1;
            }
            out.push((pos, Tok::Ident(s)));
            continue;
        }
        let sym = match ch {
            '−' => '-',
            '∘' => '@',
            '·' => '*',
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' | '@' => ch,
            _ => return Err(Error::Syntax { pos, msg: format!("unexpected character `{ch}`") }),
        };
        out.push((pos, Tok::Sym(sym)));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn error(&self, msg: String) -> Error {
        Error::Syntax { pos: self.pos(), msg }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.sum()?;
        while self.eat('@') {
            e = Expr::Compose(Box::new(e), Box::new(self.sum()?));
        }
        Ok(e)
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.factor()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let exp = if self.eat('-') {
                Expr::Neg(Box::new(self.atom()?))
            } else {
                self.atom()?
            };
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Num(n)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "x" => Ok(Expr::X),
            Tok::Ident(name) => {
                if name == "log" && self.eat('^') {
                    let k = match self.bump() {
                        Tok::Num(Number { digits, precision: None }) => digits.parse::<usize>().ok().filter(|k| *k >= 1),
                        _ => None,
                    }
                    .ok_or_else(|| self.error("expected a positive integer after `log^`".into()))?;
                    let args = self.args()?;
                    return match <[Expr; 1]>::try_from(args) {
                        Ok([a]) => Ok(Expr::Log(k, Box::new(a))),
                        Err(_) => Err(Error::Syntax { pos, msg: "log takes one argument".into() }),
                    };
                }
                let arity = match name.as_str() {
                    "log" | "exp" | "inv" | "abel" | "O" => 1,
                    "iter" | "conj" | "cmp" => 2,
                    _ => return Err(Error::UnknownFunction(name)),
                };
                if *self.peek() != Tok::Sym('(') {
                    return Err(self.error(format!("expected `(` after `{name}`")));
                }
                let args = self.args()?;
                if args.len() != arity {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!("`{name}` takes {arity} argument(s), got {}", args.len()),
                    });
                }
                if name == "log" {
                    let [a] = <[Expr; 1]>::try_from(args).unwrap();
                    return Ok(Expr::Log(1, Box::new(a)));
                }
                Ok(Expr::Call(name, args))
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(Error::Syntax { pos, msg: format!("unexpected {t:?}") }),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("trailing input".into()));
    }
    Ok(e)
}

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Series(Series),
    Abel(AbelResult),
    Order(Ordering),
}

impl Value {
    /// The series carried by the value; for Abel results the Abel function.
    pub fn into_series(self) -> Result<Series> {
        match self {
            Value::Series(s) => Ok(s),
            Value::Abel(a) => Ok(a.v),
            Value::Order(_) => Err(Error::Precondition("a comparison is not a series".into())),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Series(s) => write!(f, "{s}"),
            Value::Abel(a) => write!(f, "{}", a.v),
            Value::Order(o) => f.write_str(match o {
                Ordering::Less => "<",
                Ordering::Equal => "=",
                Ordering::Greater => ">",
            }),
        }
    }
}

fn decimal(digits: &str) -> Option<BigRational> {
    let (mant, exp) = match digits.find(['e', 'E']) {
        Some(i) => (&digits[..i], digits[i + 1..].parse::<i32>().ok()?),
        None => (digits, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let all = format!("{int}{frac}");
    let n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        BigRational::from_integer(n * Pow::pow(&ten, shift as u32))
    } else {
        BigRational::new(n, Pow::pow(&ten, (-shift) as u32))
    })
}

fn number(n: &Number, ctx: &Context) -> Result<Coeff> {
    let bad = || Error::Syntax { pos: 0, msg: format!("malformed number `{}`", n.digits) };
    let exact = !n.digits.contains(['.', 'e', 'E']);
    match (n.precision, ctx.scalar_mode) {
        (Some(p), _) => Coeff::parse_float(&n.digits, p).ok_or_else(bad),
        (None, ScalarMode::Float { precision }) if !exact => Coeff::parse_float(&n.digits, precision).ok_or_else(bad),
        _ => decimal(&n.digits).map(Coeff::Rational).ok_or_else(bad),
    }
}

fn constant(s: &Series, what: &str) -> Result<Coeff> {
    if s.is_zero() {
        return Ok(Coeff::zero());
    }
    match s.single_term() {
        Some(t) if t.mono.is_one() && s.is_exact() => Ok(t.coeff.clone()),
        _ => Err(Error::Precondition(format!("{what} must be a constant, got {s}"))),
    }
}

const MAX_INT_EXPONENT: i64 = 100_000;

fn eval_series(e: &Expr, ctx: &Context) -> Result<Series> {
    eval(e, ctx)?.into_series()
}

pub fn eval(e: &Expr, ctx: &Context) -> Result<Value> {
    let s = |e: &Expr| eval_series(e, ctx);
    let v = match e {
        Expr::X => Series::x(),
        Expr::Num(n) => Series::constant(number(n, ctx)?),
        Expr::Neg(a) => s(a)?.neg(),
        Expr::Add(a, b) => s(a)?.add(&s(b)?, ctx),
        Expr::Sub(a, b) => s(a)?.sub(&s(b)?, ctx),
        Expr::Mul(a, b) => s(a)?.mul(&s(b)?, ctx)?,
        Expr::Div(a, b) => s(a)?.div(&s(b)?, ctx)?,
        Expr::Pow(a, b) => {
            let r = constant(&s(b)?, "an exponent")?;
            let base = s(a)?;
            match r.as_i64() {
                Some(n) if n.abs() > MAX_INT_EXPONENT => {
                    return Err(Error::Precondition(format!("exponent {n} is too large")))
                }
                Some(n) => base.powi(n, ctx)?,
                None => pow_s(&base, &r, ctx)?,
            }
        }
        Expr::Compose(a, b) => compose(&s(a)?, &s(b)?, ctx)?,
        Expr::Log(k, a) => {
            let mut v = s(a)?;
            for _ in 0..*k {
                v = log_s(&v, ctx)?;
            }
            v
        }
        Expr::Call(name, args) => match (name.as_str(), args.as_slice()) {
            ("exp", [a]) => exp_s(&s(a)?, ctx)?,
            ("inv", [a]) => comp_inverse(&s(a)?, ctx)?,
            ("abel", [a]) => return Ok(Value::Abel(abel(&s(a)?, ctx)?)),
            ("O", [a]) => {
                let m = s(a)?;
                match m.single_term() {
                    Some(t) if t.coeff.is_one() && m.is_exact() => Series::big_o(t.mono.clone()),
                    _ => return Err(Error::Precondition(format!("O(·) expects a monomial, got {m}"))),
                }
            }
            ("iter", [f, r]) => iterate(&s(f)?, &constant(&s(r)?, "an iteration count")?, ctx)?,
            ("conj", [f, g]) => conjugator(&s(f)?, &s(g)?, ctx)?,
            ("cmp", [f, g]) => return Ok(Value::Order(s(f)?.compare(&s(g)?, ctx)?)),
            _ => return Err(Error::UnknownFunction(name.clone())),
        },
    };
    Ok(Value::Series(v))
}

/// Parses and evaluates `text`.
pub fn evaluate(text: &str, ctx: &Context) -> Result<Value> {
    eval(&parse(text)?, ctx)
}

/// Parses and evaluates `text` to a series.
pub fn evaluate_series(text: &str, ctx: &Context) -> Result<Series> {
    evaluate(text, ctx)?.into_series()
}
