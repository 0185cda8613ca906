//! Text form of polynomials: a strict little expression grammar and the
//! canonical printer that inverts it.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' exponent)?
//! atom     := 't' | integer | '(' expr ')' | '-' atom
//! exponent := integer | '(' integer ')'
//! ```
//!
//! Multiplication is always explicit (`2*t`, never `2t`). Integer literals
//! are reduced mod q. The printer emits descending monomials with canonical
//! coefficients, e.g. `t^3+2*t+1`, which the parser round-trips.

use crate::error::{Error, Result};
use crate::poly::Poly;

const MAX_EXPONENT: u64 = 1_000_000;

pub fn parse_poly(input: &str, q: u64) -> Result<Poly> {
    let mut p = Parser { bytes: input.as_bytes(), pos: 0, q };
    p.skip_ws();
    if p.bytes.is_empty() || p.pos >= p.bytes.len() {
        return Err(Error::Parse { pos: 0, msg: "empty polynomial".into() });
    }
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    q: u64,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.peek().map(|b| b.is_ascii_whitespace()).unwrap_or(false) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            let e = self.exponent()?;
            Ok(base.pow(e as u32))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        self.skip_ws();
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                // reject identifiers like "tt" or "t2"
                if let Some(b) = self.peek() {
                    if b.is_ascii_alphanumeric() {
                        return Err(self.error("unexpected character after variable"));
                    }
                }
                Ok(Poly::var(self.q))
            }
            Some(b) if b.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Poly::constant(self.q, n % self.q))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            Some(_) => Err(self.error("expected 't', a digit, '(' or '-'")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn exponent(&mut self) -> Result<u64> {
        self.skip_ws();
        if self.eat(b'(') {
            let n = self.integer()?;
            self.skip_ws();
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            Ok(n)
        } else {
            self.integer()
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| self.error("integer literal too large"))?;
            if value > MAX_EXPONENT * MAX_EXPONENT {
                return Err(self.error("integer literal too large"));
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an integer"));
        }
        if value > MAX_EXPONENT {
            // only exponents are range-limited, but no sane input needs
            // coefficients this large either
            return Err(self.error("integer literal too large"));
        }
        Ok(value)
    }
}

/// Canonical text form: descending monomials, explicit '*', no spaces.
pub fn format_poly(p: &Poly, var: char) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for i in (0..=p.deg()).rev() {
        let c = p.coeff(i);
        if c == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('+');
        }
        match i {
            0 => out.push_str(&c.to_string()),
            _ => {
                if c != 1 {
                    out.push_str(&c.to_string());
                    out.push('*');
                }
                out.push(var);
                if i > 1 {
                    out.push('^');
                    out.push_str(&i.to_string());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_canonical_form() {
        let p = parse_poly("t^3+2*t+1", 3).unwrap();
        assert_eq!(p.coeffs(), &[1, 2, 0, 1]);
    }

    #[test]
    fn parses_minus_and_parens() {
        let p = parse_poly("t^3-t-1", 3).unwrap();
        assert_eq!(p.coeffs(), &[2, 2, 0, 1]);
        let r = parse_poly("(t+1)^2", 3).unwrap();
        assert_eq!(r.coeffs(), &[1, 2, 1]);
        let s = parse_poly("-t", 3).unwrap();
        assert_eq!(s.coeffs(), &[0, 2]);
    }

    #[test]
    fn requires_explicit_star() {
        let err = parse_poly("2t", 3).unwrap_err();
        match err {
            Error::Parse { pos, .. } => assert_eq!(pos, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_poly("t^", 3).is_err());
        assert!(parse_poly("", 3).is_err());
        assert!(parse_poly("t^3+", 3).is_err());
        assert!(parse_poly("x", 3).is_err());
    }

    #[test]
    fn reduces_literals() {
        let p = parse_poly("7*t+9", 5).unwrap();
        assert_eq!(p.coeffs(), &[4, 2]);
    }

    #[test]
    fn format_round_trip() {
        let cases: &[&[u64]] = &[&[1, 2, 0, 1], &[0, 1], &[2], &[], &[0, 0, 1, 1]];
        for &coeffs in cases {
            let p = Poly::from_coeffs(3, coeffs.iter().copied());
            let s = format_poly(&p, 't');
            assert_eq!(parse_poly(&s, 3).unwrap(), p, "round trip through {s}");
        }
        assert_eq!(format_poly(&Poly::zero(3), 't'), "0");
        assert_eq!(
            format_poly(&Poly::from_coeffs(3, [1, 2, 0, 1]), 't'),
            "t^3+2*t+1"
        );
    }
}
