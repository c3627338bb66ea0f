//! Text grammar for polynomials:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        divisor must be a nonzero constant
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' digits)?
//! atom   := number | name | '(' expr ')'
//! number := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
//! ```
//!
//! Decimal literals are read as exact rationals.

use rug::{Integer, Rational};

use super::Polynomial;
use crate::error::{Error, Result};

/// Parses `text` as a polynomial in the named variables (zero-based order).
pub fn parse_polynomial(text: &str, names: &[String]) -> Result<Polynomial> {
    let mut p = Parser {
        text,
        chars: text.char_indices().collect(),
        pos: 0,
        names,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim_start()),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = decimal(num.trim()).ok_or_else(|| bad_number(text))?;
        let den = decimal(den.trim()).ok_or_else(|| bad_number(text))?;
        if den == 0 {
            return Err(bad_number(text));
        }
        num / den
    } else {
        decimal(body).ok_or_else(|| bad_number(text))?
    };
    Ok(if neg { -value } else { value })
}

fn bad_number(text: &str) -> Error {
    Error::Parse {
        line: 1,
        column: 1,
        message: format!("invalid rational literal `{text}`"),
    }
}

/// Unsigned decimal with optional fraction and exponent.
fn decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n = Integer::from_str_radix(&digits, 10).ok()?;
    let shift = exp - frac_part.len() as i32;
    let scale = Integer::from(Integer::u_pow_u(10, shift.unsigned_abs()));
    Some(if shift >= 0 {
        Rational::from(n * scale)
    } else {
        Rational::from((n, scale))
    })
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        let offset = self.chars.get(self.pos).map_or(self.text.len(), |&(i, _)| i);
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?)?;
                }
                Some('/') => {
                    self.pos += 1;
                    let divisor = self.unary()?;
                    match divisor.as_constant() {
                        Some(c) if c != 0 => acc = acc.scale(&Rational::from(c.recip_ref())),
                        Some(_) => return Err(self.error("division by zero")),
                        None => return Err(self.error("division by a non-constant")),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("exponent must be a non-negative integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let k: u32 = digits
            .parse()
            .map_err(|_| self.error("exponent out of range"))?;
        Ok(base.pow(k))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.name(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if digits_start == self.pos {
                self.pos = save;
            }
        }
        let literal: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let Some(value) = decimal(&literal) else {
            self.pos = start;
            return Err(self.error("malformed number"));
        };
        Ok(Polynomial::constant(self.nvars(), value))
    }

    fn name(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        let ident: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        match self.names.iter().position(|n| *n == ident) {
            Some(i) => Ok(Polynomial::var(i, self.nvars())),
            None => {
                self.pos = start;
                Err(self.error(&format!("unknown variable `{ident}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn decimal_coefficient_is_exact() {
        let f = parse_polynomial("x^3 - 2.7*x - y^2 + 2", &names(&["x", "y"])).unwrap();
        let coeff = f
            .terms()
            .find(|(e, _)| *e == [1, 0])
            .map(|(_, c)| c.clone())
            .unwrap();
        assert_eq!(coeff, Rational::from((-27, 10)));
    }

    #[test]
    fn rational_coefficient_and_indexed_names() {
        let f = parse_polynomial("3/2*x1^2*x3 - x2 + 7", &names(&["x1", "x2", "x3"])).unwrap();
        let v = f
            .eval_rational(&[Rational::from(2), Rational::from(1), Rational::from(1)])
            .unwrap();
        assert_eq!(v, Rational::from(12));
    }

    #[test]
    fn negative_exponent_is_rejected() {
        let err = parse_polynomial("x^-1", &names(&["x"])).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_variable_reports_position() {
        let err = parse_polynomial("x +\n  w", &names(&["x"])).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 3, .. }), "{err:?}");
    }

    #[test]
    fn parentheses_and_powers() {
        let f = parse_polynomial("(x - 1)^2 - (x^2 - 2*x + 1)", &names(&["x"])).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("1/32").unwrap(), Rational::from((1, 32)));
        assert_eq!(parse_rational("-0.99").unwrap(), Rational::from((-99, 100)));
        assert_eq!(parse_rational("1e-3").unwrap(), Rational::from((1, 1000)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
