//! Polynomial expression parser: `+ - * / ^`, rational literals, `x`, `y`, parentheses.

use crate::poly::{Poly, Q};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at column {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse_poly(text: &str) -> Result<Poly, ParseError> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let v = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.i + 1, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.i += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.i += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-&self.term()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.term()
            }
            _ => self.term(),
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.i += 1;
                    let at = self.i;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(ParseError { pos: at + 1, msg: "division only by nonzero constants".into() });
                    }
                    acc = acc.scale(&d.constant_term().recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.ws();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            if start == self.i {
                return Err(self.err("expected nonnegative integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.i])
                .ok()
                .and_then(|t| t.parse().ok())
                .filter(|&e| e <= 4096)
                .ok_or_else(|| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'x') => {
                self.i += 1;
                Ok(Poly::x())
            }
            Some(b'y') => {
                self.i += 1;
                Ok(Poly::y())
            }
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let n = BigInt::from_str(std::str::from_utf8(&self.s[start..self.i]).unwrap()).unwrap();
                Ok(Poly::constant(Q::from_integer(n)))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a rational literal such as `-3/4` or `2`.
pub fn parse_rational(text: &str) -> Result<Q, ParseError> {
    let t = text.trim();
    let bad = || ParseError { pos: 1, msg: format!("invalid rational '{}'", text) };
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Parse a decimal or rational literal into a float.
pub fn parse_real(text: &str) -> Result<f64, ParseError> {
    let t = text.trim();
    if t.contains('/') {
        return parse_rational(t)?.to_f64().ok_or(ParseError { pos: 1, msg: "not representable".into() });
    }
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError { pos: 1, msg: format!("invalid number '{}'", text) })
}
