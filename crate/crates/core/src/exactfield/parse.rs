//! Text parser for rational functions, the inverse of their `Display` form.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := product ('+' product)*
//! product := factor (('*' | '/') factor)*
//! factor  := '0' | '1' | 'T' ('^' '-'? digits)? | '(' expr ')'
//! ```

use super::{BinPoly, FieldError, RationalFn};

/// Largest accepted exponent; keeps hostile input from allocating huge polynomials.
pub const MAX_EXPONENT: i64 = 1 << 20;

/// Largest degree of a numerator or denominator built while parsing.
const MAX_DEGREE: usize = 1 << 22;

const MAX_DEPTH: usize = 64;

pub fn parse_rational(text: &str) -> Result<RationalFn, FieldError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, depth: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> FieldError {
        FieldError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn bounded(&self, q: RationalFn) -> Result<RationalFn, FieldError> {
        let deg = |p: &BinPoly| p.degree().unwrap_or(0);
        if deg(q.numer()).max(deg(q.denom())) > MAX_DEGREE {
            return Err(self.err("degree too large"));
        }
        Ok(q)
    }

    fn expr(&mut self) -> Result<RationalFn, FieldError> {
        let mut acc = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.product()?;
            acc = self.bounded(acc + rhs)?;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<RationalFn, FieldError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = self.bounded(acc * rhs)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = self.bounded(acc.div_ref(&rhs)?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFn, FieldError> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(RationalFn::zero())
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(RationalFn::one())
            }
            Some(b'T') => {
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let k = self.exponent()?;
                    Ok(RationalFn::tpow(k))
                } else {
                    Ok(RationalFn::tpow(1))
                }
            }
            Some(b'(') => {
                if self.depth >= MAX_DEPTH {
                    return Err(self.err("nesting too deep"));
                }
                self.pos += 1;
                self.depth += 1;
                let v = self.expr()?;
                self.depth -= 1;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected 0, 1, T or '('")),
        }
    }

    fn exponent(&mut self) -> Result<i64, FieldError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        let k: i64 = digits.parse().map_err(|_| self.err("bad exponent"))?;
        if k > MAX_EXPONENT {
            return Err(self.err("exponent too large"));
        }
        Ok(if neg { -k } else { k })
    }
}
