//! Mini-grammar for exact ratio expressions.
//!
//! Accepted forms (whitespace ignored, optional leading `-`):
//!   `N`, `N/M`, `sqrt(D)`, `Q*sqrt(D)`, `sqrt(D)/R`,
//!   `(P+Q*sqrt(D))/R`, `(P-sqrt(D))/R`, `(P+sqrt(D))`

use super::surd::QuadraticReal;
use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::One;

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::RatioParse(format!(
                "expected '{}' at offset {}",
                c as char, self.pos
            )))
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::RatioParse(format!(
                "expected integer at offset {start}"
            )));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<BigInt>()
            .map_err(|e| Error::RatioParse(e.to_string()))
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = self.eat(b'-');
        let v = self.uint()?;
        Ok(if neg { -v } else { v })
    }

    fn keyword_sqrt(&mut self) -> bool {
        if self.src[self.pos..].starts_with(b"sqrt") {
            self.pos += 4;
            true
        } else {
            false
        }
    }
}

/// `sqrt(D)` after the keyword has been consumed.
fn radical(lex: &mut Lexer) -> Result<u64> {
    lex.expect(b'(')?;
    let d = lex.uint()?;
    lex.expect(b')')?;
    use num::ToPrimitive;
    d.to_u64()
        .ok_or_else(|| Error::RatioParse("radicand too large".into()))
}

/// `Q*sqrt(D)` or `sqrt(D)`, with `Q` already parsed by the caller when the
/// sign/coefficient came first.
fn sqrt_mult(lex: &mut Lexer, coeff: BigInt) -> Result<(BigInt, u64)> {
    if !lex.keyword_sqrt() {
        return Err(Error::RatioParse(format!(
            "expected sqrt at offset {}",
            lex.pos
        )));
    }
    let d = radical(lex)?;
    Ok((coeff, d))
}

/// Body inside parentheses: `P (+|-) [Q*]sqrt(D)` or `[Q*]sqrt(D)` or `P`.
fn inner(lex: &mut Lexer) -> Result<(BigInt, BigInt, u64)> {
    if lex.keyword_sqrt() {
        let d = radical(lex)?;
        return Ok((BigInt::from(0), BigInt::one(), d));
    }
    let first = lex.int()?;
    match lex.peek() {
        Some(b'*') => {
            lex.bump();
            let (q, d) = sqrt_mult(lex, first)?;
            Ok((BigInt::from(0), q, d))
        }
        Some(sign @ (b'+' | b'-')) => {
            lex.bump();
            let coeff = if lex.keyword_sqrt() {
                let d = radical(lex)?;
                let one = BigInt::one();
                let q = if sign == b'-' { -one } else { one };
                return Ok((first, q, d));
            } else {
                lex.uint()?
            };
            lex.expect(b'*')?;
            let (q, d) = sqrt_mult(lex, coeff)?;
            let q = if sign == b'-' { -q } else { q };
            Ok((first, q, d))
        }
        _ => Ok((first, BigInt::from(0), 0)),
    }
}

/// Parses a ratio expression into an exact quadratic real.
pub fn parse_ratio(text: &str) -> Result<QuadraticReal> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut lex = Lexer::new(&cleaned);
    let negate = lex.eat(b'-');

    let (p, q, d) = if lex.eat(b'(') {
        let v = inner(&mut lex)?;
        lex.expect(b')')?;
        v
    } else {
        inner(&mut lex)?
    };

    let r = if lex.eat(b'/') {
        lex.uint()?
    } else {
        BigInt::one()
    };

    if lex.peek().is_some() {
        return Err(Error::RatioParse(format!(
            "trailing input at offset {} in {cleaned:?}",
            lex.pos
        )));
    }

    let (p, q) = if negate { (-p, -q) } else { (p, q) };
    QuadraticReal::new(p, q, d, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(expr: &str) -> f64 {
        parse_ratio(expr).unwrap().to_f64()
    }

    #[test]
    fn parses_common_forms() {
        assert_eq!(f("7"), 7.0);
        assert_eq!(f("-3/7"), -3.0 / 7.0);
        assert!((f("sqrt(2)") - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((f("-sqrt(2)") + 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((f("2*sqrt(3)") - 2.0 * 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((f("sqrt(2)/2") - 2.0_f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((f("(1+sqrt(5))/2") - (1.0 + 5.0_f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((f("(3-2*sqrt(2))/4") - (3.0 - 2.0 * 2.0_f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((f(" ( 1 + 2*sqrt(3) ) / 5 ") - (1.0 + 2.0 * 3.0_f64.sqrt()) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn certification_of_parsed_values() {
        assert!(parse_ratio("sqrt(2)").unwrap().certified_irrational());
        // sqrt(4) is rational
        assert!(!parse_ratio("sqrt(4)").unwrap().certified_irrational());
        assert!(!parse_ratio("22/7").unwrap().certified_irrational());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_ratio("").is_err());
        assert!(parse_ratio("sqrt(2").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("foo").is_err());
        assert!(parse_ratio("1+2").is_err());
        assert!(parse_ratio("(1+sqrt(2))/2x").is_err());
    }
}
