//! Reading scalars back from their canonical text form.
//!
//! The grammar accepts what [`Field::write_text`] produces and a little
//! more: integers, the names of the tower's indeterminates, `+ - * /`,
//! non-negative integer powers `^k`, unary minus and parentheses.

use crate::error::{EngineError, Result};
use crate::field::{Field, Rational};

/// Parse `text` as an element of `F`, where `names[k]` is the indeterminate
/// at level `k` of the tower (outermost first).
pub fn parse_scalar<F: Field>(text: &str, names: &[&str]) -> Result<F> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, names };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, what: &str) -> EngineError {
        let text = String::from_utf8_lossy(self.src);
        EngineError::Parse(format!("{what} at offset {} in {text:?}", self.pos))
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr<F: Field>(&mut self) -> Result<F> {
        let mut acc: F = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<F: Field>(&mut self) -> Result<F> {
        let mut acc: F = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat(b'/') {
                let d: F = self.unary()?;
                acc = acc.div(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary<F: Field>(&mut self) -> Result<F> {
        if self.eat(b'-') {
            return Ok(self.unary::<F>()?.neg());
        }
        let base: F = self.primary()?;
        if self.eat(b'^') {
            let e = self.integer()?;
            let e: i64 = e.parse().map_err(|_| self.error("exponent out of range"))?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn primary<F: Field>(&mut self) -> Result<F> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.integer()?;
                Ok(F::from_rational(Rational::parse(&digits)?.inner()))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                let level = self.names.iter().position(|n| *n == name).ok_or_else(|| self.error(&format!("unknown name {name:?}")))?;
                F::generator(level).ok_or_else(|| self.error(&format!("{name:?} is not an indeterminate of this field")))
            }
            _ => Err(self.error("expected a number, a name or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Coeff;
    use crate::ratfunc::RatFunc;

    type Q = RatFunc<Rational>;
    type Qa = RatFunc<RatFunc<Rational>>;

    #[test]
    fn plain_rationals() {
        assert_eq!(parse_scalar::<Rational>("-3/4", &[]).unwrap(), Rational::new(-3, 4));
        assert_eq!(parse_scalar::<Rational>("2^3 - (1/2)", &[]).unwrap(), Rational::new(15, 2));
        assert!(parse_scalar::<Rational>("1/0", &[]).is_err());
        assert!(parse_scalar::<Rational>("q", &["q"]).is_err());
    }

    #[test]
    fn round_trip_one_level() {
        let q = Q::var();
        let x = q.mul(&q).sub(&Q::one()).div(&q.add(&Q::from_int(3))).unwrap();
        let text = x.to_text(&["q"]);
        assert_eq!(parse_scalar::<Q>(&text, &["q"]).unwrap(), x);
    }

    #[test]
    fn round_trip_two_levels() {
        let a = Qa::var();
        let q = Qa::constant(Q::var());
        let x = a.mul(&q).sub(&q.inv().unwrap()).div(&a.sub(&q.mul(&q))).unwrap();
        let text = x.to_text(&["a", "q"]);
        assert_eq!(parse_scalar::<Qa>(&text, &["a", "q"]).unwrap(), x);
    }

    #[test]
    fn errors_locate_the_problem() {
        match parse_scalar::<Q>("q + ", &["q"]) {
            Err(EngineError::Parse(m)) => assert!(m.contains("offset 4")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_scalar::<Q>("(q", &["q"]).is_err());
        assert!(parse_scalar::<Q>("z", &["q"]).is_err());
    }
}
