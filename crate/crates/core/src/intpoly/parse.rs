use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{IntPoly, PolyError};

pub(super) fn write_poly(p: &IntPoly, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    let mut first = true;
    for (i, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else if neg {
            f.write_str(" - ")?;
        } else {
            f.write_str(" + ")?;
        }
        first = false;
        let a = c.abs();
        match i {
            0 => write!(f, "{a}")?,
            _ => {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                f.write_str(var)?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
            }
        }
    }
    Ok(())
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn digits(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }
}

/// Parse `a_n*x^n + ... + a_0` (any single-letter variable, terms in any
/// order, implicit coefficient and exponent 1, optional `*`).
pub(super) fn parse_poly(s: &str) -> Result<IntPoly, PolyError> {
    let mut cur = Cursor {
        src: s.as_bytes(),
        pos: 0,
    };
    let mut var: Option<u8> = None;
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut first = true;
    loop {
        let sign = match cur.peek() {
            None if first => return Err(cur.err("empty polynomial")),
            None => break,
            Some(b'+') => {
                cur.bump();
                1
            }
            Some(b'-') => {
                cur.bump();
                -1
            }
            Some(_) if first => 1,
            Some(c) => return Err(cur.err(format!("expected '+' or '-', found '{}'", c as char))),
        };
        first = false;

        let coef = match cur.digits() {
            Some(d) => {
                let v: BigInt = d.parse().map_err(|_| cur.err("bad integer"))?;
                if cur.peek() == Some(b'*') {
                    cur.bump();
                    if !cur.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                        return Err(cur.err("expected variable after '*'"));
                    }
                }
                Some(v)
            }
            None => None,
        };

        let exp = match cur.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                cur.bump();
                match var {
                    None => var = Some(c),
                    Some(v) if v != c => {
                        return Err(cur.err(format!(
                            "mixed variables '{}' and '{}'",
                            v as char, c as char
                        )))
                    }
                    _ => {}
                }
                if cur.peek() == Some(b'^') {
                    cur.bump();
                    let parsed = cur.digits().map(|d| d.parse::<usize>());
                    match parsed {
                        Some(Ok(e)) => e,
                        Some(Err(_)) => return Err(cur.err("exponent too large")),
                        None => return Err(cur.err("expected exponent")),
                    }
                } else {
                    1
                }
            }
            _ if coef.is_some() => 0,
            Some(c) => return Err(cur.err(format!("unexpected '{}'", c as char))),
            None => return Err(cur.err("dangling sign")),
        };

        let c = coef.unwrap_or_else(BigInt::one) * sign;
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, BigInt::zero());
        }
        coeffs[exp] += c;
    }
    Ok(IntPoly::new(coeffs))
}
