//! Text grammar for polynomials.
//!
//! ```text
//! poly   := [sign] term (sign term)*
//! term   := coef | coef '*' mono | mono
//! coef   := int | int '/' int
//! mono   := factor ('*' factor)*
//! factor := ident ['^' int]          (exponent >= 1)
//! ident  := [A-Za-z][A-Za-z0-9_']*
//! ```
//!
//! Whitespace is allowed between tokens.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Monomial, Poly, VarSet};
use crate::error::{Error, Result};

pub(crate) struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: Option<&'a VarSet>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, vars: Option<&'a VarSet>) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            vars,
        }
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    /// Next character without skipping whitespace.
    pub(crate) fn peek_raw(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.error(format!("expected `{c}`, found `{found}`")),
                None => self.error(format!("expected `{c}`, found end of input")),
            }
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.error(format!("unexpected `{c}`")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected integer");
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    pub(crate) fn identifier(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_raw() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return self.error("expected identifier"),
        }
        while self
            .peek_raw()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn variable(&mut self) -> Result<String> {
        let start = self.pos;
        let name = self.identifier()?;
        if let Some(vars) = self.vars {
            if !vars.contains(&name) {
                self.pos = start;
                return Err(Error::UnknownVariable(name));
            }
        }
        Ok(name)
    }

    fn monomial(&mut self) -> Result<Monomial> {
        let mut m = Monomial::one();
        loop {
            let v = self.variable()?;
            let e = if self.eat('^') {
                let e = self.integer()?;
                match e.to_u32() {
                    Some(e) if e >= 1 => e,
                    _ => return self.error("exponent must be a positive integer"),
                }
            } else {
                1
            };
            m = &m * &Monomial::var_pow(&v, e);
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                return Ok(m);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let coef = if self.eat('/') {
                    let den = self.integer()?;
                    if den.is_zero() {
                        return self.error("zero denominator");
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from_integer(num)
                };
                let m = if self.eat('*') {
                    self.monomial()?
                } else {
                    Monomial::one()
                };
                Ok(Poly::term(coef, m))
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(Poly::from(self.monomial()?)),
            Some(c) => self.error(format!("expected term, found `{c}`")),
            None => self.error("expected term, found end of input"),
        }
    }

    /// Parses one polynomial, stopping before any token that cannot continue it.
    pub(crate) fn poly(&mut self) -> Result<Poly> {
        let mut sign = BigRational::one();
        if self.eat('-') {
            sign = -sign;
        } else {
            self.eat('+');
        }
        let mut acc = self.term()?.scale(&sign);
        loop {
            let neg = match self.peek() {
                Some('+') => false,
                Some('-') => true,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
        }
    }

    /// Comma separated polynomials up to (not including) `close`.
    pub(crate) fn poly_list(&mut self, close: Option<char>) -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        if close.is_some() && self.peek() == close {
            return Ok(out);
        }
        loop {
            out.push(self.poly()?);
            if !self.eat(',') {
                return Ok(out);
            }
        }
    }
}

pub fn parse_poly(text: &str, vars: &VarSet) -> Result<Poly> {
    let mut p = Parser::new(text, Some(vars));
    let out = p.poly()?;
    p.finish()?;
    Ok(out)
}

/// Parses without restricting the variable names.
pub fn parse_poly_unchecked(text: &str) -> Result<Poly> {
    let mut p = Parser::new(text, None);
    let out = p.poly()?;
    p.finish()?;
    Ok(out)
}

/// Comma separated list of polynomials, e.g. `x, x, x*y, x*y*z`.
pub fn parse_poly_list(text: &str, vars: &VarSet) -> Result<Vec<Poly>> {
    let mut p = Parser::new(text, Some(vars));
    let out = p.poly_list(None)?;
    p.finish()?;
    Ok(out)
}

/// All identifier tokens in `text`, for inferring a variable set.
pub fn identifiers(text: &str) -> BTreeSet<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.insert(chars[start..i].iter().collect());
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    out
}
