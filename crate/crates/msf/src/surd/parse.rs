//! Text form of surd constants, e.g. `"(1+s7)/8"` or `"-2*s15/3"`.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
//! `unary := ('-'|'+') unary | atom`, `atom := int | 's' int | '(' expr ')'`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{SurdElem, SurdError};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> SurdError {
        SurdError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<BigInt, SurdError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn expr(&mut self) -> Result<SurdElem, SurdError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SurdElem, SurdError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = &acc * &d.inv()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<SurdElem, SurdError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<SurdElem, SurdError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b's') => {
                self.pos += 1;
                let n = self.integer()?;
                let n: u64 = n.try_into().map_err(|_| self.err("radicand too large"))?;
                Ok(SurdElem::sqrt_int(n))
            }
            Some(c) if c.is_ascii_digit() => Ok(SurdElem::rational(BigRational::from_integer(self.integer()?))),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse the surd text form.
pub fn parse_surd(text: &str) -> Result<SurdElem, SurdError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl std::str::FromStr for SurdElem {
    type Err = SurdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_surd(s)
    }
}
