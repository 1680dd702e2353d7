use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{IndexForm, IndexVar, SeqExpr};
use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(
        "syntax error at byte {offset}: expected {}, found {found}",
        ExpectedList(expected)
    )]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("negative exponent at byte {offset}: exponents must be non-negative")]
    NegativeExponent { offset: usize },
    #[error("number too large at byte {offset}")]
    NumberTooLarge { offset: usize },
    #[error("zero denominator at byte {offset}")]
    ZeroDenominator { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::NegativeExponent { offset }
            | ParseError::NumberTooLarge { offset }
            | ParseError::ZeroDenominator { offset } => *offset,
        }
    }
}

struct ExpectedList<'a>(&'a [&'static str]);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            [] => f.write_str("nothing"),
            [one] => f.write_str(one),
            many => write!(f, "one of {}", many.join(", ")),
        }
    }
}

const ATOM_START: &[&str] = &["number", "'q'", "'['", "'('", "'-'"];
const INDEX_ATOM: &[&str] = &["integer", "'m'", "'n'", "'k'", "'('"];
const INDEX_TERM: &[&str] = &["integer", "'m'", "'n'", "'k'"];

/// Parse an expression in the sequence-expression grammar.
pub fn parse(text: &str) -> Result<SeqExpr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(&["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
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

    // An index form may still continue with another signed term.
    fn close_index_form(&mut self, c: u8, name: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&[name, "'+'", "'-'"]))
        }
    }

    fn syntax(&mut self, expected: &[&'static str]) -> ParseError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = std::str::from_utf8(&self.src[self.pos..]).unwrap_or("");
                match rest.chars().next() {
                    Some(c) => format!("'{c}'"),
                    None => "invalid UTF-8".to_string(),
                }
            }
        };
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.to_vec(),
            found,
        }
    }

    fn expr(&mut self) -> Result<SeqExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SeqExpr, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SeqExpr, ParseError> {
        if self.eat(b'-') {
            // `^` binds tighter than unary minus.
            return Ok(match self.factor()? {
                SeqExpr::Constant(c) => SeqExpr::Constant(-c),
                inner => -inner,
            });
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.exponent_u32()?;
            return Ok(SeqExpr::pow(base, exp));
        }
        Ok(base)
    }

    fn exponent_u32(&mut self) -> Result<u32, ParseError> {
        match self.peek() {
            Some(b'-') => Err(ParseError::NegativeExponent { offset: self.pos }),
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let digits = self.digits();
                digits
                    .parse()
                    .map_err(|_| ParseError::NumberTooLarge { offset: start })
            }
            _ => Err(self.syntax(&["non-negative integer"])),
        }
    }

    // Caller guarantees the current byte is a digit.
    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn atom(&mut self) -> Result<SeqExpr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(b'q') => {
                self.pos += 1;
                if !self.eat(b'^') {
                    return Ok(SeqExpr::Q);
                }
                match self.peek() {
                    Some(b'-') => Err(ParseError::NegativeExponent { offset: self.pos }),
                    Some(b'(') => {
                        self.pos += 1;
                        let form = self.index_form()?;
                        self.close_index_form(b')', "')'")?;
                        Ok(SeqExpr::QPow(form))
                    }
                    Some(c) if c.is_ascii_digit() => {
                        let start = self.pos;
                        let value: i64 = self
                            .digits()
                            .parse()
                            .map_err(|_| ParseError::NumberTooLarge { offset: start })?;
                        Ok(SeqExpr::QPow(IndexForm::constant(value)))
                    }
                    Some(c) => match IndexVar::from_char(c as char) {
                        Some(v) => {
                            self.pos += 1;
                            Ok(SeqExpr::QPow(IndexForm::var(v)))
                        }
                        None => Err(self.syntax(INDEX_ATOM)),
                    },
                    None => Err(self.syntax(INDEX_ATOM)),
                }
            }
            Some(b'[') => {
                self.pos += 1;
                let form = self.index_form()?;
                self.close_index_form(b']', "']'")?;
                Ok(SeqExpr::QInt(form))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax(&["')'", "'+'", "'-'", "'*'"]));
                }
                Ok(inner)
            }
            _ => Err(self.syntax(ATOM_START)),
        }
    }

    fn rational(&mut self) -> Result<SeqExpr, ParseError> {
        let start = self.pos;
        let num: BigInt = self.digits().parse().expect("digits parse as BigInt");
        // `/` is only meaningful as part of a literal, so `1/2` is one token.
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                return Err(self.syntax(&["integer"]));
            }
            let den: BigInt = self.digits().parse().expect("digits parse as BigInt");
            if den.is_zero() {
                return Err(ParseError::ZeroDenominator { offset: start });
            }
            return Ok(SeqExpr::Constant(Rational::new(num, den)));
        }
        Ok(SeqExpr::Constant(Rational::from_integer(num)))
    }

    fn index_form(&mut self) -> Result<IndexForm, ParseError> {
        let mut form = IndexForm::default();
        let mut sign = if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        };
        loop {
            form = self.index_term(form, sign)?;
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                return Ok(form);
            }
        }
    }

    fn index_term(&mut self, form: IndexForm, sign: i64) -> Result<IndexForm, ParseError> {
        let too_large = |offset| ParseError::NumberTooLarge { offset };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let value: i64 = self.digits().parse().map_err(|_| too_large(start))?;
                let starred = self.eat(b'*');
                match self.peek().and_then(|c| IndexVar::from_char(c as char)) {
                    Some(v) => {
                        self.pos += 1;
                        Ok(form.plus_var(v, sign * value))
                    }
                    None if starred => Err(self.syntax(&["'m'", "'n'", "'k'"])),
                    None => Ok(form.plus_const(sign * value)),
                }
            }
            Some(c) => match IndexVar::from_char(c as char) {
                Some(v) => {
                    self.pos += 1;
                    Ok(form.plus_var(v, sign))
                }
                None => Err(self.syntax(INDEX_TERM)),
            },
            None => Err(self.syntax(INDEX_TERM)),
        }
    }
}
