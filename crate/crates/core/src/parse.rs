//! Text grammar shared by scalars, exponents and rational functions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/' | <juxtaposition>) unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exp)?
//! exp    := ['-'] INT | '(' expr ')'        -- must fold to a rational
//! atom   := INT | 'q' | "q'" | 'z' | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers other than `q`, `q'` and `z` are basis symbols of real
//! exponents. Printers in this crate emit text this grammar reads back.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ratfun::{FactoredRat, ZRatFun};
use crate::scalars::{Exponent, ExponentVector, Monomial, QScalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Q,
    QPrime,
    Z,
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, BigRational),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    QPrime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn parse_error(pos: Pos, expected: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line,
        column: pos.column,
        expected: expected.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, column: col };
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            if s == "q" && i < chars.len() && chars[i] == '\'' {
                i += 1;
                col += 1;
                out.push((Tok::QPrime, pos));
            } else {
                out.push((Tok::Ident(s), pos));
            }
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(parse_error(
                    pos,
                    format!("a number, symbol or operator, found `{ch}`"),
                ))
            }
        };
        out.push((tok, pos));
        i += 1;
        col += 1;
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(parse_error(self.pos(), what))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::QPrime | Tok::LParen => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = match self.bump() {
            Tok::Int(n) => BigRational::from_integer(n),
            Tok::Minus => match self.bump() {
                Tok::Int(n) => BigRational::from_integer(-n),
                _ => return Err(parse_error(pos, "an integer exponent")),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)` closing the exponent")?;
                fold_rational(&inner).map_err(|msg| parse_error(pos, msg))?
            }
            _ => return Err(parse_error(pos, "an exponent: integer or `(p/r)`")),
        };
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Num(BigRational::from_integer(n))),
            Tok::QPrime => Ok(Expr::QPrime),
            Tok::Ident(s) => Ok(match s.as_str() {
                "q" => Expr::Q,
                "z" => Expr::Z,
                _ => Expr::Sym(s),
            }),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(parse_error(
                pos,
                "a number, `q`, `q'`, `z`, a symbol or `(`",
            )),
        }
    }
}

fn fold_rational(e: &Expr) -> std::result::Result<BigRational, String> {
    Ok(match e {
        Expr::Num(n) => n.clone(),
        Expr::Neg(a) => -fold_rational(a)?,
        Expr::Add(a, b) => fold_rational(a)? + fold_rational(b)?,
        Expr::Sub(a, b) => fold_rational(a)? - fold_rational(b)?,
        Expr::Mul(a, b) => fold_rational(a)? * fold_rational(b)?,
        Expr::Div(a, b) => {
            let d = fold_rational(b)?;
            if d.is_zero() {
                return Err("a nonzero denominator in the exponent".into());
            }
            fold_rational(a)? / d
        }
        Expr::Pow(a, k) => {
            let base = fold_rational(a)?;
            let k = int_exponent(k).ok_or("an integer power inside a rational exponent")?;
            if k < 0 && base.is_zero() {
                return Err("a nonzero base for a negative power".into());
            }
            if k >= 0 {
                num::pow(base, k as usize)
            } else {
                num::pow(base.recip(), k.unsigned_abs() as usize)
            }
        }
        _ => return Err("a rational number in the exponent".into()),
    })
}

fn int_exponent(k: &BigRational) -> Option<i64> {
    if k.is_integer() {
        k.numer().to_i64()
    } else {
        None
    }
}

/// Parses text into an expression tree.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
    };
    if *p.peek() == Tok::End {
        return Err(parse_error(p.pos(), "an expression"));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(parse_error(p.pos(), "an operator or end of input"));
    }
    Ok(e)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

/// Evaluates an expression with no `z` and no basis symbols.
pub fn eval_qscalar(e: &Expr) -> Result<QScalar> {
    Ok(match e {
        Expr::Num(n) => QScalar::from_rational(n.clone()),
        Expr::Q => QScalar::q_pow(Exponent::from_int(1)),
        Expr::QPrime => QScalar::qp_pow(Exponent::from_int(1)),
        Expr::Z => return Err(invalid("`z` is not allowed in a scalar")),
        Expr::Sym(s) => return Err(invalid(format!("symbol `{s}` is not allowed in a scalar"))),
        Expr::Neg(a) => eval_qscalar(a)?.neg(),
        Expr::Add(a, b) => eval_qscalar(a)?.add(&eval_qscalar(b)?),
        Expr::Sub(a, b) => eval_qscalar(a)?.sub(&eval_qscalar(b)?),
        Expr::Mul(a, b) => eval_qscalar(a)?.mul(&eval_qscalar(b)?),
        Expr::Div(a, b) => eval_qscalar(a)?.checked_div(&eval_qscalar(b)?)?,
        Expr::Pow(a, k) => {
            let base = eval_qscalar(a)?;
            match int_exponent(k) {
                Some(k) => base.pow(k)?,
                None => {
                    let m = base
                        .as_monomial()
                        .ok_or_else(|| invalid("fractional powers apply only to monomials"))?;
                    monomial_rational_pow(&m, k)?
                }
            }
        }
    })
}

/// `m^k` for rational `k`, defined when `m` has a rational coefficient root.
pub fn monomial_rational_pow(m: &Monomial, k: &BigRational) -> Result<QScalar> {
    let den = k
        .denom()
        .to_u32()
        .ok_or_else(|| invalid("exponent denominator too large"))?;
    let root = m
        .root(den)
        .ok_or_else(|| invalid(format!("`{m}` has no exact root of order {den}")))?;
    let n = k
        .numer()
        .to_i64()
        .ok_or_else(|| invalid("exponent numerator too large"))?;
    Ok(QScalar::from_monomial(&root.pow(n)))
}

/// Evaluates an affine combination of basis symbols.
pub fn eval_expvec(e: &Expr) -> Result<ExponentVector> {
    Ok(match e {
        Expr::Num(n) => ExponentVector::rational(n.clone()),
        Expr::Sym(s) => ExponentVector::symbol(s),
        Expr::Q | Expr::QPrime | Expr::Z => {
            return Err(invalid(
                "exponents may contain only rationals and basis symbols",
            ))
        }
        Expr::Neg(a) => eval_expvec(a)?.scale(&-BigRational::one()),
        Expr::Add(a, b) => eval_expvec(a)?.add(&eval_expvec(b)?),
        Expr::Sub(a, b) => eval_expvec(a)?.sub(&eval_expvec(b)?),
        Expr::Mul(a, b) => {
            let (x, y) = (eval_expvec(a)?, eval_expvec(b)?);
            match (x.as_rational(), y.as_rational()) {
                (Some(k), _) => y.scale(k),
                (_, Some(k)) => x.scale(k),
                _ => return Err(invalid("products of basis symbols are not linear")),
            }
        }
        Expr::Div(a, b) => {
            let y = eval_expvec(b)?;
            let k = y
                .as_rational()
                .ok_or_else(|| invalid("division by a basis symbol"))?;
            if k.is_zero() {
                return Err(Error::DivisionByZero);
            }
            eval_expvec(a)?.scale(&k.recip())
        }
        Expr::Pow(a, k) => {
            let x = eval_expvec(a)?;
            let base = x
                .as_rational()
                .ok_or_else(|| invalid("powers of basis symbols are not linear"))?;
            let k = int_exponent(k)
                .ok_or_else(|| invalid("fractional power of a rational exponent"))?;
            if k < 0 && base.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let v = if k >= 0 {
                num::pow(base.clone(), k as usize)
            } else {
                num::pow(base.recip(), k.unsigned_abs() as usize)
            };
            ExponentVector::rational(v)
        }
    })
}

/// Evaluates an expression in `z` to an expanded rational function.
pub fn eval_zratfun(e: &Expr) -> Result<ZRatFun> {
    Ok(match e {
        Expr::Z => ZRatFun::z(),
        Expr::Sym(s) => {
            return Err(invalid(format!(
                "symbol `{s}` is not allowed in a rational function"
            )))
        }
        Expr::Num(_) | Expr::Q | Expr::QPrime => ZRatFun::constant(eval_qscalar(e)?),
        Expr::Neg(a) => eval_zratfun(a)?.neg(),
        Expr::Add(a, b) => eval_zratfun(a)?.add(&eval_zratfun(b)?),
        Expr::Sub(a, b) => eval_zratfun(a)?.sub(&eval_zratfun(b)?),
        Expr::Mul(a, b) => eval_zratfun(a)?.mul(&eval_zratfun(b)?),
        Expr::Div(a, b) => eval_zratfun(a)?.checked_div(&eval_zratfun(b)?)?,
        Expr::Pow(a, k) => {
            let base = eval_zratfun(a)?;
            match int_exponent(k) {
                Some(k) => base.pow(k)?,
                None => match base.as_constant() {
                    Some(c) => ZRatFun::constant(eval_qscalar(&Expr::Pow(
                        Box::new(scalar_expr(&c)?),
                        k.clone(),
                    ))?),
                    None => {
                        return Err(invalid("fractional powers of z are not rational functions"))
                    }
                },
            }
        }
    })
}

fn scalar_expr(c: &QScalar) -> Result<Expr> {
    parse_expr(&c.to_string())
}

/// Evaluates an expression to factored form. Sums must be affine in `z`
/// with monomial coefficients, so every factor is `a*z + b`.
pub fn eval_factored(e: &Expr) -> Result<FactoredRat> {
    Ok(match e {
        Expr::Z => FactoredRat::z_pow(1),
        Expr::Num(_) | Expr::Q | Expr::QPrime => {
            let c = eval_qscalar(e)?;
            let m = c
                .as_monomial()
                .ok_or_else(|| invalid(format!("constant `{c}` is not a nonzero monomial")))?;
            FactoredRat::unit(m)
        }
        Expr::Sym(s) => {
            return Err(invalid(format!(
                "symbol `{s}` is not allowed in a rational function"
            )))
        }
        Expr::Neg(a) => eval_factored(a)?.scale_unit(&Monomial::one().neg()),
        Expr::Mul(a, b) => eval_factored(a)?.mul(&eval_factored(b)?),
        Expr::Div(a, b) => eval_factored(a)?.div(&eval_factored(b)?),
        Expr::Pow(a, k) => {
            let base = eval_factored(a)?;
            match int_exponent(k) {
                Some(k) => base.pow(k),
                None if base.z_power() == 0 && base.roots().is_empty() => {
                    let c = monomial_rational_pow(base.unit_part(), k)?;
                    FactoredRat::unit(c.as_monomial().expect("monomial power"))
                }
                None => return Err(invalid("fractional powers of z are not rational functions")),
            }
        }
        Expr::Add(..) | Expr::Sub(..) => affine_factor(&eval_zratfun(e)?)?,
    })
}

fn affine_factor(f: &ZRatFun) -> Result<FactoredRat> {
    let not_affine = || {
        invalid(format!(
            "`{f}` is not a product of factors (a*z + b) with monomial a, b"
        ))
    };
    let p = f.as_poly().ok_or_else(not_affine)?;
    let mono = |k: u32| -> Result<Option<Monomial>> {
        let c = p.coeff(k);
        if c.is_zero() {
            return Ok(None);
        }
        c.as_monomial().map(Some).ok_or_else(not_affine)
    };
    match p.degree() {
        None => Err(Error::DivisionByZero),
        Some(0) => Ok(FactoredRat::unit(mono(0)?.unwrap())),
        Some(1) => {
            let a = mono(1)?.unwrap();
            Ok(match mono(0)? {
                None => FactoredRat::unit(a).mul(&FactoredRat::z_pow(1)),
                Some(b) => FactoredRat::unit(a.clone()).mul(&FactoredRat::linear(b.div(&a).neg())),
            })
        }
        Some(_) => Err(not_affine()),
    }
}

pub fn parse_zratfun(text: &str) -> Result<ZRatFun> {
    eval_zratfun(&parse_expr(text)?)
}

pub fn parse_factored(text: &str) -> Result<FactoredRat> {
    eval_factored(&parse_expr(text)?)
}

pub fn parse_qscalar(text: &str) -> Result<QScalar> {
    eval_qscalar(&parse_expr(text)?)
}

pub fn parse_expvec(text: &str) -> Result<ExponentVector> {
    eval_expvec(&parse_expr(text)?)
}

pub fn parse_monomial(text: &str) -> Result<Monomial> {
    parse_qscalar(text)?
        .as_monomial()
        .ok_or_else(|| invalid(format!("`{text}` is not a single monomial")))
}

/// Renders a signed rational the way the parser reads it back.
pub fn rational_text(x: &BigRational) -> String {
    let s = crate::scalars::fmt_rational(&x.abs());
    if x.is_negative() {
        format!("-{s}")
    } else {
        s
    }
}
