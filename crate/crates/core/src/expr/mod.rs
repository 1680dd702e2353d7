//! Polynomial-valued sequence expressions over the index variables `m`, `n`, `k`.
//!
//! An expression such as `q^m * (q - 1)` or `[m+1] - 2*[m]` denotes a
//! sequence of polynomials; [`SeqExpr::evaluate`] instantiates it at concrete
//! indices. Text syntax:
//!
//! ```text
//! expr      := term (('+' | '-') term)*
//! term      := factor ('*' factor)*
//! factor    := '-' factor | atom ('^' nonneg-int)?
//! atom      := rational | 'q' ('^' (index-atom | '(' indexform ')'))?
//!            | '[' indexform ']' | '(' expr ')'
//! indexform := ['+'|'-'] index-term (('+'|'-') index-term)*
//! index-term:= int | int? '*'? ('m' | 'n' | 'k')
//! ```

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::poly::{Poly, Rational};

pub use parse::{parse, ParseError};

/// One of the three index variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexVar {
    M,
    N,
    K,
}

impl IndexVar {
    pub const ALL: [IndexVar; 3] = [IndexVar::M, IndexVar::N, IndexVar::K];

    pub fn name(self) -> char {
        match self {
            IndexVar::M => 'm',
            IndexVar::N => 'n',
            IndexVar::K => 'k',
        }
    }

    pub fn from_char(c: char) -> Option<IndexVar> {
        match c {
            'm' => Some(IndexVar::M),
            'n' => Some(IndexVar::N),
            'k' => Some(IndexVar::K),
            _ => None,
        }
    }
}

impl fmt::Display for IndexVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound index variable `{0}`")]
    UnboundVariable(IndexVar),
    #[error("index form `{form}` evaluates to {value}, which is negative")]
    NegativeIndex { form: String, value: i64 },
    #[error("index arithmetic overflowed in `{0}`")]
    Overflow(String),
}

/// Integer linear combination of index variables plus a constant, e.g. `m + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexForm {
    // Invariant: no zero coefficients.
    coeffs: BTreeMap<IndexVar, i64>,
    constant: i64,
}

impl IndexForm {
    pub fn constant(c: i64) -> Self {
        IndexForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: IndexVar) -> Self {
        IndexForm::constant(0).plus_var(v, 1)
    }

    /// Add `coeff * v`.
    pub fn plus_var(mut self, v: IndexVar, coeff: i64) -> Self {
        let entry = self.coeffs.entry(v).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&v);
        }
        self
    }

    pub fn plus_const(mut self, c: i64) -> Self {
        self.constant += c;
        self
    }

    pub fn coeff(&self, v: IndexVar) -> i64 {
        self.coeffs.get(&v).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn vars(&self) -> impl Iterator<Item = IndexVar> + '_ {
        self.coeffs.keys().copied()
    }

    /// True when the form renders without parentheses after `q^`: a single
    /// variable with unit coefficient, or a non-negative constant.
    fn is_simple(&self) -> bool {
        match self.coeffs.len() {
            0 => self.constant >= 0,
            1 => self.constant == 0 && self.coeffs.values().all(|&c| c == 1),
            _ => false,
        }
    }

    pub fn evaluate(&self, b: &Binding) -> Result<i64, EvalError> {
        let overflow = || EvalError::Overflow(self.to_string());
        let mut acc = self.constant;
        for (&v, &c) in &self.coeffs {
            let value = b.get(v).ok_or(EvalError::UnboundVariable(v))?;
            let value = i64::try_from(value).map_err(|_| overflow())?;
            acc = c
                .checked_mul(value)
                .and_then(|t| acc.checked_add(t))
                .ok_or_else(overflow)?;
        }
        Ok(acc)
    }

    /// Evaluate and require a non-negative result.
    pub fn evaluate_index(&self, b: &Binding) -> Result<u64, EvalError> {
        let value = self.evaluate(b)?;
        u64::try_from(value).map_err(|_| EvalError::NegativeIndex {
            form: self.to_string(),
            value,
        })
    }
}

impl fmt::Display for IndexForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&v, &c) in &self.coeffs {
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            f.write_str(sign)?;
            match c.unsigned_abs() {
                1 => write!(f, "{v}")?,
                mag => write!(f, "{mag}*{v}")?,
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, "+{}", self.constant)
        } else if self.constant < 0 {
            write!(f, "{}", self.constant)
        } else {
            Ok(())
        }
    }
}

/// Concrete values for the index variables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Binding {
    values: [Option<u64>; 3],
}

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn m(m: u64) -> Self {
        Binding::new().with(IndexVar::M, m)
    }

    pub fn mnk(m: u64, n: u64, k: u64) -> Self {
        Binding::new()
            .with(IndexVar::M, m)
            .with(IndexVar::N, n)
            .with(IndexVar::K, k)
    }

    pub fn with(mut self, v: IndexVar, value: u64) -> Self {
        self.values[v as usize] = Some(value);
        self
    }

    pub fn get(&self, v: IndexVar) -> Option<u64> {
        self.values[v as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid binding `{text}`: {reason}")]
pub struct BindingError {
    pub text: String,
    pub reason: String,
}

/// Parses `m=3,n=2` style bindings. Empty input gives an empty binding.
impl FromStr for Binding {
    type Err = BindingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| BindingError {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let mut b = Binding::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| err("expected name=value"))?;
            let mut chars = name.trim().chars();
            let var = match (chars.next(), chars.next()) {
                (Some(c), None) => IndexVar::from_char(c),
                _ => None,
            }
            .ok_or_else(|| err("variable must be one of m, n, k"))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| err("value must be a non-negative integer"))?;
            b = b.with(var, value);
        }
        Ok(b)
    }
}

/// Expression tree for a polynomial-valued sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeqExpr {
    Constant(Rational),
    /// The indeterminate `q`.
    Q,
    /// `q^(form)`.
    QPow(IndexForm),
    /// The q-integer `[form]`.
    QInt(IndexForm),
    Add(Box<SeqExpr>, Box<SeqExpr>),
    Sub(Box<SeqExpr>, Box<SeqExpr>),
    Mul(Box<SeqExpr>, Box<SeqExpr>),
    Neg(Box<SeqExpr>),
    IntPow(Box<SeqExpr>, u32),
}

macro_rules! seq_binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl $tr for SeqExpr {
            type Output = SeqExpr;
            fn $method(self, rhs: SeqExpr) -> SeqExpr {
                SeqExpr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

seq_binop!(Add, add, Add);
seq_binop!(Sub, sub, Sub);
seq_binop!(Mul, mul, Mul);

impl Neg for SeqExpr {
    type Output = SeqExpr;
    fn neg(self) -> SeqExpr {
        SeqExpr::Neg(Box::new(self))
    }
}

impl SeqExpr {
    pub fn int(c: i64) -> SeqExpr {
        SeqExpr::Constant(crate::poly::integer(c))
    }

    pub fn pow(a: SeqExpr, e: u32) -> SeqExpr {
        SeqExpr::IntPow(Box::new(a), e)
    }

    /// Expression denoting a fixed polynomial, as a sum of `c * q^e` terms.
    pub fn from_poly(p: &Poly) -> SeqExpr {
        let mut acc: Option<SeqExpr> = None;
        for (e, c) in p.terms().rev() {
            let term = match e {
                0 => SeqExpr::Constant(c.clone()),
                _ => SeqExpr::mul(
                    SeqExpr::Constant(c.clone()),
                    SeqExpr::QPow(IndexForm::constant(e as i64)),
                ),
            };
            acc = Some(match acc {
                None => term,
                Some(a) => SeqExpr::add(a, term),
            });
        }
        acc.unwrap_or_else(|| SeqExpr::int(0))
    }

    pub fn evaluate(&self, b: &Binding) -> Result<Poly, EvalError> {
        Ok(match self {
            SeqExpr::Constant(c) => Poly::constant(c.clone()),
            SeqExpr::Q => Poly::q(),
            SeqExpr::QPow(f) => Poly::q_pow(f.evaluate_index(b)?),
            SeqExpr::QInt(f) => crate::poly::q_integer(f.evaluate_index(b)?),
            SeqExpr::Add(x, y) => x.evaluate(b)? + y.evaluate(b)?,
            SeqExpr::Sub(x, y) => x.evaluate(b)? - y.evaluate(b)?,
            SeqExpr::Mul(x, y) => x.evaluate(b)? * y.evaluate(b)?,
            SeqExpr::Neg(x) => -x.evaluate(b)?,
            SeqExpr::IntPow(x, e) => x.evaluate(b)?.pow(u64::from(*e)),
        })
    }

    /// Index variables referenced anywhere in the tree.
    pub fn variables(&self) -> Vec<IndexVar> {
        let mut seen = [false; 3];
        self.visit_forms(&mut |f| {
            for v in f.vars() {
                seen[v as usize] = true;
            }
        });
        IndexVar::ALL
            .into_iter()
            .filter(|v| seen[*v as usize])
            .collect()
    }

    fn visit_forms(&self, visit: &mut impl FnMut(&IndexForm)) {
        match self {
            SeqExpr::Constant(_) | SeqExpr::Q => {}
            SeqExpr::QPow(f) | SeqExpr::QInt(f) => visit(f),
            SeqExpr::Add(x, y) | SeqExpr::Sub(x, y) | SeqExpr::Mul(x, y) => {
                x.visit_forms(visit);
                y.visit_forms(visit);
            }
            SeqExpr::Neg(x) | SeqExpr::IntPow(x, _) => x.visit_forms(visit),
        }
    }

    /// Folds `Neg(Constant(c))` into `Constant(-c)`, the one rewrite the parser
    /// applies. `parse(render(e))` is structurally equal to `e.normalized()`.
    pub fn normalized(&self) -> SeqExpr {
        match self {
            SeqExpr::Constant(_) | SeqExpr::Q | SeqExpr::QPow(_) | SeqExpr::QInt(_) => self.clone(),
            SeqExpr::Add(x, y) => SeqExpr::add(x.normalized(), y.normalized()),
            SeqExpr::Sub(x, y) => SeqExpr::sub(x.normalized(), y.normalized()),
            SeqExpr::Mul(x, y) => SeqExpr::mul(x.normalized(), y.normalized()),
            SeqExpr::IntPow(x, e) => SeqExpr::pow(x.normalized(), *e),
            SeqExpr::Neg(x) => match x.normalized() {
                SeqExpr::Constant(c) => SeqExpr::Constant(-c),
                inner => SeqExpr::neg(inner),
            },
        }
    }

    /// Canonical text form, accepted by [`parse`].
    pub fn render(&self) -> String {
        self.to_string()
    }

    // Whether this node can stand as the base of `^` without parentheses. A
    // bare `q` cannot: `q^2` reads back as a q-power, not an integer power.
    fn is_pow_base(&self) -> bool {
        match self {
            SeqExpr::Constant(c) => c.is_integer() && !c.is_negative(),
            SeqExpr::QInt(_) | SeqExpr::Add(..) | SeqExpr::Sub(..) => true,
            _ => false,
        }
    }
}

impl fmt::Display for SeqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqExpr::Constant(c) => {
                if c.is_zero() {
                    f.write_str("0")
                } else {
                    write!(f, "{c}")
                }
            }
            SeqExpr::Q => f.write_str("q"),
            SeqExpr::QPow(form) if form.is_simple() => write!(f, "q^{form}"),
            SeqExpr::QPow(form) => write!(f, "q^({form})"),
            SeqExpr::QInt(form) => write!(f, "[{form}]"),
            SeqExpr::Add(x, y) => write!(f, "({x} + {y})"),
            SeqExpr::Sub(x, y) => write!(f, "({x} - {y})"),
            SeqExpr::Mul(x, y) => match **y {
                SeqExpr::Mul(..) => write!(f, "{x} * ({y})"),
                _ => write!(f, "{x} * {y}"),
            },
            SeqExpr::Neg(x) => match **x {
                SeqExpr::Mul(..) => write!(f, "-({x})"),
                _ => write!(f, "-{x}"),
            },
            SeqExpr::IntPow(x, e) if x.is_pow_base() => write!(f, "{x}^{e}"),
            SeqExpr::IntPow(x, e) => write!(f, "({x})^{e}"),
        }
    }
}

impl FromStr for SeqExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
