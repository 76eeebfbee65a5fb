//! Text form of polynomials: a small expression grammar and a printer
//! whose output parses back to the same element.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr     := ['-'] term ( ('+'|'-') term )*
//! term     := factor ( ('*'|'/') factor )*
//! factor   := ['-'] atom [ '^' exponent ]
//! atom     := integer | identifier | '(' expr ')'
//! exponent := integer | '(' integer [ '/' integer ] ')'
//! ```
//!
//! Identifiers resolve to ring variables, parameters, or the coefficient
//! field generator. Division requires a nonzero constant divisor.
//! Fractional exponents like `x^(3/2)` require a p-power denominator and a
//! single-term base.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exponent::{ppow, PExp};
use crate::monomial::Monomial;
use crate::param::{ParamFraction, ParamPoly};
use crate::poly::Polynomial;
use crate::ring::RingContext;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let mut val: u64 = 0;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    val = val
                        .checked_mul(10)
                        .and_then(|v| v.checked_add((self.src[self.pos] - b'0') as u64))
                        .ok_or_else(|| Error::Parse {
                            pos: start,
                            msg: "integer literal too large".into(),
                        })?;
                    self.pos += 1;
                }
                return Ok((Tok::Int(val), start));
            }
            c if c == b'_' || c.is_ascii_alphabetic() => {
                while self.pos < self.src.len()
                    && (self.src[self.pos] == b'_' || self.src[self.pos].is_ascii_alphanumeric())
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                return Ok((Tok::Ident(s), start));
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character {:?}", other as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
    ctx: &'a Arc<RingContext>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: &'a Arc<RingContext>) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_pos) = lexer.next()?;
        Ok(Parser { lexer, tok, tok_pos, ctx })
    }

    fn bump(&mut self) -> Result<()> {
        let (tok, pos) = self.lexer.next()?;
        self.tok = tok;
        self.tok_pos = pos;
        Ok(())
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.tok_pos, msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = if self.tok == Tok::Minus {
            self.bump()?;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    acc = acc.add(&self.term()?)?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    acc = acc.mul(&self.factor()?)?;
                }
                Tok::Slash => {
                    self.bump()?;
                    let pos = self.tok_pos;
                    let d = self.factor()?;
                    let c = match d.leading_term() {
                        Some((m, c)) if d.terms.len() == 1 && m.is_unit() => c.clone(),
                        Some(_) => {
                            return Err(Error::Parse {
                                pos,
                                msg: "division only by nonzero constants".into(),
                            })
                        }
                        None => {
                            return Err(Error::Parse { pos, msg: "division by zero".into() })
                        }
                    };
                    let inv = c.inv(&self.ctx.field, self.ctx.nparams()).map_err(|_| {
                        Error::Parse { pos, msg: "division by zero".into() }
                    })?;
                    acc = acc.mul_coef(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.bump()?;
        match self.tok.clone() {
            Tok::Int(n) => {
                self.bump()?;
                base.pow(n)
            }
            Tok::LParen => {
                self.bump()?;
                let pos = self.tok_pos;
                let num = match self.tok {
                    Tok::Int(n) => n,
                    _ => return self.err("expected integer exponent numerator"),
                };
                self.bump()?;
                let den = if self.tok == Tok::Slash {
                    self.bump()?;
                    match self.tok {
                        Tok::Int(n) if n > 0 => {
                            let d = n;
                            self.bump()?;
                            d
                        }
                        _ => return self.err("expected positive exponent denominator"),
                    }
                } else {
                    1
                };
                if self.tok != Tok::RParen {
                    return self.err("expected ')' after exponent");
                }
                self.bump()?;
                let e = PExp::from_fraction(self.ctx.p(), num, den)
                    .map_err(|err| Error::Parse { pos, msg: err.to_string() })?;
                apply_rational_exponent(&base, e).ok_or_else(|| Error::Parse {
                    pos,
                    msg: "fractional exponent requires a single-term base with unit coefficient"
                        .into(),
                })
            }
            _ => self.err("expected exponent"),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.tok.clone() {
            Tok::Int(n) => {
                self.bump()?;
                let c = self.ctx.field.from_int((n % self.ctx.p()) as i64);
                Ok(Polynomial::constant(
                    ParamFraction::from_scalar(c, &self.ctx.field, self.ctx.nparams()),
                    self.ctx,
                ))
            }
            Tok::Ident(name) => {
                let pos = self.tok_pos;
                self.bump()?;
                if let Some(i) = self.ctx.var_index(&name) {
                    Ok(Polynomial::var(i, self.ctx))
                } else if let Some(i) = self.ctx.param_index(&name) {
                    Ok(Polynomial::constant(
                        ParamFraction::from_poly(
                            ParamPoly::param(i, &self.ctx.field, self.ctx.nparams()),
                            &self.ctx.field,
                            self.ctx.nparams(),
                        ),
                        self.ctx,
                    ))
                } else if self.ctx.field.generator.as_deref() == Some(name.as_str()) {
                    Ok(Polynomial::constant(
                        ParamFraction::from_scalar(
                            self.ctx.field.gen_element(),
                            &self.ctx.field,
                            self.ctx.nparams(),
                        ),
                        self.ctx,
                    ))
                } else {
                    Err(Error::Parse { pos, msg: format!("unknown identifier {name:?}") })
                }
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump()?;
                Ok(inner)
            }
            _ => self.err("expected an integer, identifier, or '('"),
        }
    }
}

/// Raises a single-term, unit-coefficient polynomial to a rational p-power
/// exponent by scaling the monomial exponents. Integer exponents on any
/// base are delegated to [`Polynomial::pow`].
fn apply_rational_exponent(base: &Polynomial, e: PExp) -> Option<Polynomial> {
    if e.is_integer() {
        return base.pow(e.num).ok();
    }
    if base.terms.len() != 1 || !base.terms[0].1.is_one() {
        return None;
    }
    let p = base.ctx.p();
    let (m, c) = &base.terms[0];
    let exps = m
        .exps
        .iter()
        .map(|x| x.mul_int(p, e.num).div_ppow(p, e.dlog))
        .collect();
    Some(Polynomial {
        ctx: base.ctx.clone(),
        terms: vec![(Monomial { exps }, c.clone())],
    })
}

pub fn parse_poly(src: &str, ctx: &Arc<RingContext>) -> Result<Polynomial> {
    let mut parser = Parser::new(src, ctx)?;
    let poly = parser.expr()?;
    if parser.tok != Tok::End {
        return parser.err("trailing input after expression");
    }
    Ok(poly)
}

fn print_exponent(e: &PExp, p: u64) -> Option<String> {
    if e.is_zero() {
        return None;
    }
    if e.is_integer() {
        if e.num == 1 {
            Some(String::new())
        } else {
            Some(format!("^{}", e.num))
        }
    } else {
        Some(format!("^({}/{})", e.num, ppow(p, e.dlog)))
    }
}

fn print_monomial(m: &Monomial, ctx: &RingContext) -> Option<String> {
    let mut parts = Vec::new();
    for (i, e) in m.exps.iter().enumerate() {
        if let Some(suffix) = print_exponent(e, ctx.p()) {
            parts.push(format!("{}{}", ctx.vars[i], suffix));
        }
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("*"))
    }
}

fn print_param_poly(q: &ParamPoly, ctx: &RingContext) -> String {
    if q.terms.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = q
        .terms
        .iter()
        .map(|(exps, c)| {
            let mut factors = Vec::new();
            let coef = ctx.field.print(c);
            let has_params = exps.iter().any(|e| *e > 0);
            if !c.is_one() || !has_params {
                factors.push(coef);
            }
            for (i, e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(ctx.params[i].clone()),
                    e => factors.push(format!("{}^{}", ctx.params[i], e)),
                }
            }
            factors.join("*")
        })
        .collect();
    parts.join(" + ")
}

/// Prints a coefficient so that `<printed>*<monomial>` reparses to the same
/// term: sums get parenthesized, proper fractions always do.
fn print_fraction(c: &ParamFraction, ctx: &RingContext, in_product: bool) -> String {
    if c.den.is_one() {
        let s = print_param_poly(&c.num, ctx);
        if in_product && c.num.terms.len() > 1 {
            format!("({s})")
        } else {
            s
        }
    } else {
        format!(
            "({})/({})",
            print_param_poly(&c.num, ctx),
            print_param_poly(&c.den, ctx)
        )
    }
}

pub fn print_poly(f: &Polynomial) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let ctx = &f.ctx;
    let parts: Vec<String> = f
        .terms
        .iter()
        .map(|(m, c)| match print_monomial(m, ctx) {
            None => print_fraction(c, ctx, false),
            Some(ms) => {
                if c.is_one() {
                    ms
                } else {
                    format!("{}*{}", print_fraction(c, ctx, true), ms)
                }
            }
        })
        .collect();
    parts.join(" + ")
}

/// Prints a standalone coefficient (report output for certificates).
pub fn print_fraction_standalone(c: &ParamFraction, ctx: &RingContext) -> String {
    print_fraction(c, ctx, false)
}
