//! Polynomial input: JSON coefficient arrays or human-readable expressions.
//!
//! The expression grammar covers the output of `Display` for [`RatPoly`] and
//! a little more:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' integer)?
//! atom  := integer | 'x' | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants.

use num_bigint::BigInt;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json::poly_from_strings;
use crate::ratpoly::{RatPoly, Rational};

/// Parses either a JSON array of coefficient strings (ascending degree) or an
/// expression in `x` such as `4/4225*x^2 + 1/4225*x + 4/4225`.
pub fn parse_poly(text: &str) -> Result<RatPoly> {
    let t = text.trim();
    if t.starts_with('[') {
        return parse_json_array(t);
    }
    let mut p = Parser {
        chars: text.char_indices().collect(),
        i: 0,
        len: text.len(),
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.i < p.chars.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(out)
}

fn parse_json_array(t: &str) -> Result<RatPoly> {
    let v: Value = serde_json::from_str(t).map_err(|e| Error::Parse {
        pos: e.column().saturating_sub(1),
        msg: format!("invalid JSON: {e}"),
    })?;
    let Value::Array(items) = v else {
        return Err(Error::Parse {
            pos: 0,
            msg: "expected a JSON array".into(),
        });
    };
    let strings = items
        .iter()
        .enumerate()
        .map(|(k, item)| match item {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
            _ => Err(Error::Parse {
                pos: k,
                msg: "coefficients must be strings or integers".into(),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    poly_from_strings(&strings)
}

struct Parser {
    chars: Vec<(usize, char)>,
    i: usize,
    len: usize,
}

impl Parser {
    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.len, |&(p, _)| p)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos(),
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.i).is_some_and(|(_, c)| c.is_whitespace()) {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<RatPoly> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.i += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatPoly> {
        let mut acc = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.i += 1;
            let at = self.pos();
            let rhs = self.unary()?;
            acc = if c == '*' {
                &acc * &rhs
            } else {
                match rhs.degree() {
                    None => return Err(Error::ZeroDenominator),
                    Some(0) => acc.scale(&(Rational::from_integer(1.into()) / rhs.constant_term())),
                    _ => {
                        return Err(Error::Parse {
                            pos: at,
                            msg: "division by a non-constant polynomial".into(),
                        })
                    }
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatPoly> {
        match self.peek() {
            Some('-') => {
                self.i += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.i += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatPoly> {
        match self.peek() {
            Some('x') => {
                self.i += 1;
                Ok(RatPoly::x())
            }
            Some('(') => {
                self.i += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.i += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatPoly::constant(Rational::from_integer(n)))
            }
            Some(_) => Err(self.error("expected a number, 'x' or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.i;
        while self.chars.get(self.i).is_some_and(|(_, c)| c.is_ascii_digit()) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[start..self.i].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("digits"))
    }
}
