//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' uint)?
//! atom   := number | variable | '(' expr ')'
//! number := uint ('/' uint)? | uint '.' digits
//! variable := 't' | 'q'<k> | 'p'<k>     (k = 1..m for q, 0..m for p)
//! ```
//!
//! Decimal literals are converted exactly to rationals (`0.5` becomes `1/2`);
//! no rounding occurs. Exponents must be non-negative integer literals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coeff::{Coeff, Rat};
use crate::error::Error;
use crate::poly::{Polynomial, Var};

/// Parses `text` into a canonical polynomial over `(t, q^1..q^m, p_0..p_m)`.
pub fn poly_parse(text: &str, dim: usize) -> Result<Polynomial, Error> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim,
    };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, Error> {
        if self.eat(b'-') {
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let n = self.uint()?;
            let n: u32 = n
                .try_into()
                .map_err(|_| Error::Parse {
                    pos: at,
                    msg: "exponent too large".to_string(),
                })?;
            self.skip_ws();
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, Error> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            _ => Err(self.err("expected number, variable, or `(`")),
        }
    }

    fn uint(&mut self) -> Result<u64, Error> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a non-negative integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer too large".to_string(),
            })
    }

    fn digits(&mut self) -> Result<&'a str, Error> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn number(&mut self) -> Result<Polynomial, Error> {
        let int_part = self.digits()?;
        let mut value = Rat::new(int_part.parse::<BigInt>().unwrap(), BigInt::one());
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let frac = self.digits()?;
            // exact: 0.5 -> 5/10 -> 1/2
            let scale = BigInt::from(10u8).pow(frac.len() as u32);
            value = value + Rat::new(frac.parse::<BigInt>().unwrap(), scale);
        } else if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits()?.parse::<BigInt>().unwrap();
            if den.is_zero() {
                return Err(Error::Parse {
                    pos: at,
                    msg: "zero denominator".to_string(),
                });
            }
            value = value / Rat::new(den, BigInt::one());
        }
        self.skip_ws();
        Ok(Polynomial::constant(
            self.dim,
            Coeff::new(value, Rat::zero()),
        ))
    }

    fn variable(&mut self) -> Result<Polynomial, Error> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        self.skip_ws();
        let var = match name.split_at(1) {
            ("t", "") => Var::T,
            ("q", k) => {
                let k: usize = k.parse().map_err(|_| Error::UnknownVariable(name.into()))?;
                if k < 1 || k > self.dim {
                    return Err(Error::UnknownVariable(name.into()));
                }
                Var::Q(k)
            }
            ("p", k) => {
                let k: usize = k.parse().map_err(|_| Error::UnknownVariable(name.into()))?;
                if k > self.dim {
                    return Err(Error::UnknownVariable(name.into()));
                }
                if k == 0 {
                    Var::P0
                } else {
                    Var::P(k)
                }
            }
            _ => return Err(Error::UnknownVariable(name.into())),
        };
        Ok(Polynomial::var(self.dim, var))
    }
}
