//! Recursive-descent parser for the term surface syntax.
//!
//! Grammar, loosest to tightest: additive `+ -`, multiplicative `* /`,
//! unary minus, power `^` (right-associative), atoms. Atoms are decimal
//! literals, `pi`, `euler`, variables (`x7`, `dx0`, `ddx0`, `d^3 x1`,
//! and `Dx0` / `D^2 x0` for difference variables), registered function
//! calls `name(arg, ...)`, and parenthesized expressions. Juxtaposition
//! is not multiplication. A power with a constant integer exponent maps
//! to the unary pow-const family; any other exponent is the binary
//! `pow` symbol.

use crate::error::{Error, Result};
use crate::registry::{neg, pow, powi, Registry};
use crate::term::{Term, Variable};

/// Parse with the standard registry.
pub fn parse(text: &str) -> Result<Term> {
    parse_with(text, crate::registry::standard_registry())
}

/// Parse against a custom registry.
pub fn parse_with(text: &str, registry: &Registry) -> Result<Term> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        registry,
    };
    p.skip_ws();
    let t = p.additive()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(t)
}

/// Classify a whole token as a variable, if it is one:
/// `x<digits>`, `d...dx<digits>`, or `D...Dx<digits>`.
pub(crate) fn variable_token(token: &str) -> Option<Variable> {
    let bytes = token.as_bytes();
    let order_char = *bytes.first()?;
    let (order, rest) = match order_char {
        b'd' | b'D' => {
            let count = bytes.iter().take_while(|&&b| b == order_char).count();
            (count as u32, &bytes[count..])
        }
        _ => (0, bytes),
    };
    let rest = rest.strip_prefix(b"x")?;
    if rest.is_empty() || !rest.iter().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let base: u32 = std::str::from_utf8(rest).ok()?.parse().ok()?;
    Some(match order_char {
        b'D' => Variable::difference(base, order),
        _ => Variable::new(base, order),
    })
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    registry: &'a Registry,
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn additive(&mut self) -> Result<Term> {
        let mut lhs = self.multiplicative()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.multiplicative()?;
                    lhs = crate::registry::add(lhs, rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.multiplicative()?;
                    lhs = crate::registry::sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn multiplicative(&mut self) -> Result<Term> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.unary()?;
                    lhs = crate::registry::mul(lhs, rhs);
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.unary()?;
                    lhs = crate::registry::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.eat(b'-') {
            self.skip_ws();
            let operand = self.unary()?;
            // Fold the sign into literals so `-2` is the constant -2.
            return Ok(match operand.as_const() {
                Some(c) => Term::constant(-c),
                None => neg(operand),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term> {
        let base = self.atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let exponent = self.unary()?;
            return Ok(match exponent.as_const() {
                Some(c) if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 => {
                    powi(base, c as i64)
                }
                _ => pow(base, exponent),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Term> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let t = self.additive()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(t)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.ident(),
            Some(b) => Err(self.syntax(format!("unexpected character `{}`", b as char))),
        }
    }

    fn number(&mut self) -> Result<Term> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'.') {
            self.pos += 1;
        }
        // Optional exponent part: e or E, optional sign, digits.
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Term::constant(v)),
            _ => Err(Error::Syntax {
                offset: start,
                message: format!("invalid numeric literal `{text}`"),
            }),
        }
    }

    fn ident(&mut self) -> Result<Term> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();

        match name {
            "pi" => return Ok(Term::constant(std::f64::consts::PI)),
            "euler" => return Ok(Term::constant(std::f64::consts::E)),
            _ => {}
        }
        if let Some(v) = variable_token(name) {
            return Ok(Term::var(v));
        }
        // Caret differential: `d^3 x1`, `D^2 x0` (also without the space).
        if (name == "d" || name == "D") && self.peek() == Some(b'^') {
            self.pos += 1;
            let digits_start = self.pos;
            while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == digits_start {
                return Err(self.syntax("expected a differential order after `^`"));
            }
            let order: u32 = std::str::from_utf8(&self.bytes[digits_start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Syntax {
                    offset: digits_start,
                    message: "differential order out of range".into(),
                })?;
            self.skip_ws();
            let var_start = self.pos;
            while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
                self.pos += 1;
            }
            let var_text = std::str::from_utf8(&self.bytes[var_start..self.pos]).unwrap();
            match variable_token(var_text) {
                Some(v) if v.order() == 0 => {
                    return Ok(Term::var(match name {
                        "D" => Variable::difference(v.base(), order),
                        _ => Variable::new(v.base(), order),
                    }));
                }
                _ => {
                    return Err(Error::Syntax {
                        offset: var_start,
                        message: format!("expected a base variable like `x0`, found `{var_text}`"),
                    })
                }
            }
        }

        // Function call.
        self.skip_ws();
        if !self.eat(b'(') {
            return Err(Error::UnknownSymbol {
                name: name.to_string(),
                offset: start,
            });
        }
        let symbol = self.registry.resolve(name).ok_or(Error::UnknownSymbol {
            name: name.to_string(),
            offset: start,
        })?;
        let mut args = Vec::new();
        self.skip_ws();
        if !self.eat(b')') {
            loop {
                args.push(self.additive()?);
                self.skip_ws();
                if self.eat(b',') {
                    continue;
                }
                if self.eat(b')') {
                    break;
                }
                return Err(self.syntax("expected `,` or `)` in argument list"));
            }
        }
        Term::app(symbol, args)
    }
}
