//! Recursive-descent parser for rational-function expressions in `t`.
//!
//! Grammar (usual precedence, `^` binds tightest, unary minus below it):
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := base ('^' integer)*
//! base   := 't' | integer | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. Division by an expression that simplifies to the
//! zero function is a parse-time error, reported at the `/` position.

use super::{RatFunQ, RatFunError};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected character {found:?} at position {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("exponent at position {pos} does not fit in u32")]
    ExponentTooLarge { pos: usize },
    #[error("division by a zero denominator at position {pos}")]
    ZeroDenominator { pos: usize },
    #[error("trailing input at position {pos}")]
    TrailingInput { pos: usize },
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.text.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expr(&mut self) -> Result<RatFunQ, ParseError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunQ, ParseError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let op_pos = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                acc.mul(&rhs)
            } else {
                acc.div(&rhs)
                    .map_err(|RatFunError::ZeroDenominator| ParseError::ZeroDenominator {
                        pos: op_pos,
                    })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunQ, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunQ, ParseError> {
        let mut acc = self.base()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let exp_pos = self.pos;
            let n = self.integer()?;
            let e: u32 = n
                .try_into()
                .map_err(|_| ParseError::ExponentTooLarge { pos: exp_pos })?;
            acc = acc.pow(e);
        }
        Ok(acc)
    }

    fn base(&mut self) -> Result<RatFunQ, ParseError> {
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd),
            Some(b't') => {
                self.pos += 1;
                Ok(RatFunQ::var())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatFunQ::constant(n))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.bump() {
                    Some(b')') => Ok(inner),
                    Some(c) => Err(ParseError::UnexpectedChar {
                        pos: self.pos - 1,
                        found: c as char,
                    }),
                    None => Err(ParseError::UnexpectedEnd),
                }
            }
            Some(c) => Err(ParseError::UnexpectedChar {
                pos: self.pos,
                found: c as char,
            }),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.text.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return match self.text.get(self.pos) {
                Some(&c) => Err(ParseError::UnexpectedChar {
                    pos: self.pos,
                    found: c as char,
                }),
                None => Err(ParseError::UnexpectedEnd),
            };
        }
        let digits = std::str::from_utf8(&self.text[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }
}

/// Parse an expression into a reduced rational function over Q.
pub fn parse_ratfun(text: &str) -> Result<RatFunQ, ParseError> {
    let mut parser = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let f = parser.expr()?;
    if parser.peek().is_some() {
        return Err(ParseError::TrailingInput { pos: parser.pos });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_ratfun("1+2*t").unwrap(), parse_ratfun("2*t+1").unwrap());
        assert_eq!(parse_ratfun("-t^2").unwrap(), parse_ratfun("0-t^2").unwrap());
        assert_eq!(parse_ratfun("(-t)^2").unwrap(), parse_ratfun("t^2").unwrap());
        assert_eq!(parse_ratfun("6/2/3").unwrap(), parse_ratfun("1").unwrap());
        // `^` is left-associative: t^2^3 = (t^2)^3.
        assert_eq!(parse_ratfun("t^2^3").unwrap(), parse_ratfun("t^6").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_ratfun("t + x"),
            Err(ParseError::UnexpectedChar { pos: 4, found: 'x' })
        );
        assert_eq!(parse_ratfun("t+"), Err(ParseError::UnexpectedEnd));
        assert_eq!(
            parse_ratfun("1/(t-t)"),
            Err(ParseError::ZeroDenominator { pos: 1 })
        );
        assert_eq!(
            parse_ratfun("t) "),
            Err(ParseError::TrailingInput { pos: 1 })
        );
    }

    #[test]
    fn whitespace_ignored() {
        assert_eq!(
            parse_ratfun(" t ^ 2 / ( t - 1 ) ").unwrap(),
            parse_ratfun("t^2/(t-1)").unwrap()
        );
    }
}
