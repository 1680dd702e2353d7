//! Addition rules for q-integers.
//!
//! Builtin rules:
//!
//! * linear: `[m] (+)_l [n] = [m] + q^m [n]`
//! * quad1:  `[m] (+)_1 [n] = [m] + [n] + (q - 1)[m][n]`
//! * quad2:  `[m] (+)_2 [n] = q^n [m] + q^m [n] + (1 - q)[m][n]`
//! * mixed3: `[m] (+)_l ([n] (+)_1 [k]) = [m] + q^m [n] + q^m [k] + q^m (q - 1)[n][k]`
//!
//! A general three-argument rule is a [`RuleSpec`] with coefficient sequences
//! `s_m, t_m, u_m, v_m` combined as `s_m [m] + t_m [n] + u_m [k] + v_m [n][k]`.
//! It is a quadratic addition rule of the first kind when that combination
//! equals `[m+n+k]` for all positive `m, n, k`.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{self, Binding, EvalError, IndexVar, ParseError, SeqExpr};
use crate::poly::{q_integer, Degree, Poly, Rational};
use crate::report::{CheckedRange, Failure, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("index {name} must be positive, got {value}")]
    IndexNotPositive { name: &'static str, value: u64 },
    #[error("coefficient `{slot}` may only reference m, found `{var}`")]
    WrongVariable { slot: &'static str, var: IndexVar },
    #[error("coefficient `{slot}` at m = {m}: {source}")]
    Eval {
        slot: &'static str,
        m: u64,
        #[source]
        source: EvalError,
    },
    #[error("coefficient `{slot}`: {source}")]
    Parse {
        slot: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("s_m must be constant, but at m = {m} it is {value}")]
    NotConstant { m: u64, value: Poly },
    #[error("obstruction requires deg s_m > 2, but deg s_{m} = {degree}")]
    PreconditionViolated { m: u64, degree: Degree },
    #[error("witness search bound must be at least 2, got {0}")]
    SearchBoundTooSmall(u64),
    #[error("rule `{0}` takes two arguments")]
    TwoArgumentRule(BuiltinRule),
}

fn positive(name: &'static str, value: u64) -> Result<(), RuleError> {
    if value == 0 {
        Err(RuleError::IndexNotPositive { name, value })
    } else {
        Ok(())
    }
}

/// `(q - 1)`
fn q_minus_one() -> Poly {
    Poly::from_coeffs(&[-1, 1])
}

pub fn linear_rule(m: u64, n: u64) -> Result<Poly, RuleError> {
    positive("m", m)?;
    positive("n", n)?;
    Ok(q_integer(m) + q_integer(n).shift(m))
}

pub fn quad1_rule(m: u64, n: u64) -> Result<Poly, RuleError> {
    positive("m", m)?;
    positive("n", n)?;
    let (qm, qn) = (q_integer(m), q_integer(n));
    Ok(&qm + &qn + q_minus_one() * &qm * &qn)
}

pub fn quad2_rule(m: u64, n: u64) -> Result<Poly, RuleError> {
    positive("m", m)?;
    positive("n", n)?;
    let (qm, qn) = (q_integer(m), q_integer(n));
    Ok(qm.shift(n) + qn.shift(m) - q_minus_one() * &qm * &qn)
}

pub fn mixed3_rule(m: u64, n: u64, k: u64) -> Result<Poly, RuleError> {
    positive("m", m)?;
    positive("n", n)?;
    positive("k", k)?;
    let (qm, qn, qk) = (q_integer(m), q_integer(n), q_integer(k));
    let inner = &qn + &qk + q_minus_one() * &qn * &qk;
    Ok(qm + inner.shift(m))
}

/// The named builtin rules exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinRule {
    Linear,
    Quad1,
    Quad2,
    Mixed3,
}

impl BuiltinRule {
    pub const ALL: [BuiltinRule; 4] = [
        BuiltinRule::Linear,
        BuiltinRule::Quad1,
        BuiltinRule::Quad2,
        BuiltinRule::Mixed3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinRule::Linear => "linear",
            BuiltinRule::Quad1 => "quad1",
            BuiltinRule::Quad2 => "quad2",
            BuiltinRule::Mixed3 => "mixed3",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            BuiltinRule::Mixed3 => 3,
            _ => 2,
        }
    }

    /// Evaluate a two-argument builtin.
    pub fn apply2(self, m: u64, n: u64) -> Result<Poly, RuleError> {
        match self {
            BuiltinRule::Linear => linear_rule(m, n),
            BuiltinRule::Quad1 => quad1_rule(m, n),
            BuiltinRule::Quad2 => quad2_rule(m, n),
            BuiltinRule::Mixed3 => Err(RuleError::TwoArgumentRule(self)),
        }
    }

    /// Sweep the rule against `[m+n]` (or `[m+n+k]` for `mixed3`). `max_k` is
    /// ignored by the two-argument rules.
    pub fn verify(
        self,
        max_m: u64,
        max_n: u64,
        max_k: u64,
    ) -> Result<VerificationReport, RuleError> {
        if self == BuiltinRule::Mixed3 {
            return verify_rule(&RuleSpec::mixed3(), max_m, max_n, max_k);
        }
        positive("max_m", max_m)?;
        positive("max_n", max_n)?;
        let pairs: Vec<(u64, u64)> = (1..=max_m)
            .flat_map(|m| (1..=max_n).map(move |n| (m, n)))
            .collect();
        let failures = pairs
            .into_par_iter()
            .map(|(m, n)| {
                let residual = self.apply2(m, n)? - q_integer(m + n);
                Ok((!residual.is_zero()).then_some(Failure {
                    m,
                    n,
                    k: None,
                    residual,
                }))
            })
            .collect::<Result<Vec<_>, RuleError>>()?
            .into_iter()
            .flatten()
            .collect();
        Ok(VerificationReport::new(
            CheckedRange {
                m: max_m,
                n: max_n,
                k: None,
            },
            failures,
        ))
    }
}

impl fmt::Display for BuiltinRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}` (expected linear, quad1, quad2 or mixed3)"))
    }
}

/// Coefficient sequences `(s_m, t_m, u_m, v_m)` of a three-argument rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    s: SeqExpr,
    t: SeqExpr,
    u: SeqExpr,
    v: SeqExpr,
}

/// A rule's coefficients instantiated at one `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleCoefficients {
    pub s: Poly,
    pub t: Poly,
    pub u: Poly,
    pub v: Poly,
}

impl RuleCoefficients {
    /// `s [m] + t [n] + u [k] + v [n][k]`
    pub fn combine(&self, m: u64, n: u64, k: u64) -> Poly {
        let (qn, qk) = (q_integer(n), q_integer(k));
        &self.s * &q_integer(m) + &self.t * &qn + &self.u * &qk + &self.v * &qn * &qk
    }

    /// The coefficients forced by fixing `s_m`: `u = [m+1] - s [m]`, `t = u`,
    /// `v = q^(m+1) - u`. Any first-kind rule must have these values.
    pub fn forced_by(s: Poly, m: u64) -> RuleCoefficients {
        let u = q_integer(m + 1) - &s * &q_integer(m);
        let v = Poly::q_pow(m + 1) - &u;
        RuleCoefficients {
            s,
            t: u.clone(),
            u,
            v,
        }
    }
}

const SLOTS: [&str; 4] = ["s", "t", "u", "v"];

impl RuleSpec {
    pub fn new(s: SeqExpr, t: SeqExpr, u: SeqExpr, v: SeqExpr) -> Result<Self, RuleError> {
        let spec = RuleSpec { s, t, u, v };
        for (slot, e) in SLOTS.into_iter().zip(spec.exprs()) {
            if let Some(var) = e.variables().into_iter().find(|&v| v != IndexVar::M) {
                return Err(RuleError::WrongVariable { slot, var });
            }
        }
        Ok(spec)
    }

    pub fn parse(s: &str, t: &str, u: &str, v: &str) -> Result<Self, RuleError> {
        let mut parsed = Vec::with_capacity(4);
        for (slot, text) in SLOTS.into_iter().zip([s, t, u, v]) {
            parsed.push(expr::parse(text).map_err(|source| RuleError::Parse { slot, source })?);
        }
        let [s, t, u, v]: [SeqExpr; 4] = parsed.try_into().expect("four coefficients");
        RuleSpec::new(s, t, u, v)
    }

    /// `(1, q^m, q^m, q^m (q - 1))`, the mixed three-argument rule.
    pub fn mixed3() -> Self {
        RuleSpec::parse("1", "q^m", "q^m", "q^m * (q - 1)").expect("builtin rule parses")
    }

    pub fn exprs(&self) -> [&SeqExpr; 4] {
        [&self.s, &self.t, &self.u, &self.v]
    }

    pub fn s(&self) -> &SeqExpr {
        &self.s
    }

    pub fn coefficients(&self, m: u64) -> Result<RuleCoefficients, RuleError> {
        let b = Binding::m(m);
        let eval = |slot: &'static str, e: &SeqExpr| {
            e.evaluate(&b)
                .map_err(|source| RuleError::Eval { slot, m, source })
        };
        Ok(RuleCoefficients {
            s: eval("s", &self.s)?,
            t: eval("t", &self.t)?,
            u: eval("u", &self.u)?,
            v: eval("v", &self.v)?,
        })
    }
}

pub fn apply_rule(r: &RuleSpec, m: u64, n: u64, k: u64) -> Result<Poly, RuleError> {
    positive("m", m)?;
    positive("n", n)?;
    positive("k", k)?;
    Ok(r.coefficients(m)?.combine(m, n, k))
}

/// Check `apply_rule(r, m, n, k) = [m+n+k]` over the whole box and record
/// every failing triple.
pub fn verify_rule(
    r: &RuleSpec,
    max_m: u64,
    max_n: u64,
    max_k: u64,
) -> Result<VerificationReport, RuleError> {
    positive("max_m", max_m)?;
    positive("max_n", max_n)?;
    positive("max_k", max_k)?;
    let coeffs = (1..=max_m)
        .map(|m| r.coefficients(m))
        .collect::<Result<Vec<_>, _>>()?;
    let q_ints: Vec<Poly> = (0..=max_m + max_n + max_k).map(q_integer).collect();
    let triples: Vec<(u64, u64, u64)> = (1..=max_m)
        .flat_map(|m| (1..=max_n).flat_map(move |n| (1..=max_k).map(move |k| (m, n, k))))
        .collect();
    let failures = triples
        .into_par_iter()
        .filter_map(|(m, n, k)| {
            let c = &coeffs[(m - 1) as usize];
            let (qn, qk) = (&q_ints[n as usize], &q_ints[k as usize]);
            let value = &c.s * &q_ints[m as usize] + &c.t * qn + &c.u * qk + &c.v * qn * qk;
            let residual = value - &q_ints[(m + n + k) as usize];
            (!residual.is_zero()).then_some(Failure {
                m,
                n,
                k: Some(k),
                residual,
            })
        })
        .collect();
    Ok(VerificationReport::new(
        CheckedRange {
            m: max_m,
            n: max_n,
            k: Some(max_k),
        },
        failures,
    ))
}

/// Coefficients recovered from a constant `s_m = a_m` by the subtraction
/// steps: comparing `(m,n,1)` with `(m,1,n)` gives `t_m = u_m`, comparing
/// `(m,1,1)` with `(m,1,2)` gives `v_m = q^(m+1) - u_m`, and `(m,1,1)` alone
/// gives `u_m = q^m + (1 - a_m)[m]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstantSDerivation {
    pub m: u64,
    #[serde(serialize_with = "crate::poly::serialize_rational")]
    pub a: Rational,
    pub t: Poly,
    pub u: Poly,
    pub v: Poly,
}

impl ConstantSDerivation {
    /// What remains of the rule after substituting the recovered coefficients:
    /// `(a_m - 1)[m](1 - [n] - [k] + [n][k])`.
    pub fn residual(&self, n: u64, k: u64) -> Poly {
        let (qn, qk) = (q_integer(n), q_integer(k));
        let bracket = Poly::one() - &qn - &qk + &qn * &qk;
        (q_integer(self.m) * bracket).scale(&(&self.a - Rational::one()))
    }

    pub fn coefficients(&self) -> RuleCoefficients {
        RuleCoefficients {
            s: Poly::constant(self.a.clone()),
            t: self.t.clone(),
            u: self.u.clone(),
            v: self.v.clone(),
        }
    }
}

pub fn derive_from_constant_s(a: &SeqExpr, m: u64) -> Result<ConstantSDerivation, RuleError> {
    positive("m", m)?;
    let value = a
        .evaluate(&Binding::m(m))
        .map_err(|source| RuleError::Eval {
            slot: "s",
            m,
            source,
        })?;
    let a_m = value
        .as_constant()
        .ok_or(RuleError::NotConstant { m, value })?;
    let forced = RuleCoefficients::forced_by(Poly::constant(a_m.clone()), m);
    Ok(ConstantSDerivation {
        m,
        a: a_m,
        t: forced.t,
        u: forced.u,
        v: forced.v,
    })
}

/// A triple at which a rule provably disagrees with `[m+n+k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub lhs: Poly,
    pub rhs: Poly,
}

impl Witness {
    pub fn residual(&self) -> Poly {
        &self.lhs - &self.rhs
    }

    pub fn is_verified(&self) -> bool {
        !self.residual().is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Obstruction {
    Witness {
        coefficients: RuleCoefficients,
        witness: Witness,
    },
    NoWitness {
        coefficients: RuleCoefficients,
    },
}

impl Obstruction {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Obstruction::Witness { witness, .. } => Some(witness),
            Obstruction::NoWitness { .. } => None,
        }
    }
}

/// For `deg s_m > 2`, take the coefficients every first-kind rule would be
/// forced to have and search `n, k <= search_bound` with `m < n + k - 1` for a
/// triple where the rule misses `[m+n+k]`. The first such `(n, k)` in
/// lexicographic order is returned.
pub fn degree_obstruction(
    s: &SeqExpr,
    m: u64,
    search_bound: u64,
) -> Result<Obstruction, RuleError> {
    positive("m", m)?;
    if search_bound < 2 {
        return Err(RuleError::SearchBoundTooSmall(search_bound));
    }
    let s_m = s
        .evaluate(&Binding::m(m))
        .map_err(|source| RuleError::Eval {
            slot: "s",
            m,
            source,
        })?;
    let degree = s_m.degree();
    if degree <= Degree::Finite(2) {
        return Err(RuleError::PreconditionViolated { m, degree });
    }
    let coefficients = RuleCoefficients::forced_by(s_m, m);
    for n in 1..=search_bound {
        for k in 1..=search_bound {
            if m + 1 >= n + k {
                continue;
            }
            let lhs = coefficients.combine(m, n, k);
            let rhs = q_integer(m + n + k);
            if lhs != rhs {
                return Ok(Obstruction::Witness {
                    coefficients,
                    witness: Witness { m, n, k, lhs, rhs },
                });
            }
        }
    }
    Ok(Obstruction::NoWitness { coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    fn p(c: &[i64]) -> Poly {
        Poly::from_coeffs(c)
    }

    #[test]
    fn two_argument_examples() {
        assert_eq!(linear_rule(1, 1).unwrap(), q_integer(2));
        assert_eq!(linear_rule(2, 3).unwrap(), p(&[1, 1, 1, 1, 1]));
        assert_eq!(
            linear_rule(1, 0),
            Err(RuleError::IndexNotPositive {
                name: "n",
                value: 0
            })
        );
        assert_eq!(quad1_rule(1, 1).unwrap(), p(&[1, 1]));
        assert_eq!(quad2_rule(1, 1).unwrap(), p(&[1, 1]));
        assert_eq!(quad1_rule(2, 2).unwrap(), q_integer(4));
        assert!(quad2_rule(0, 1).is_err());
    }

    #[test]
    fn mixed3_examples() {
        assert_eq!(mixed3_rule(1, 1, 1).unwrap(), p(&[1, 1, 1]));
        assert_eq!(mixed3_rule(2, 1, 1).unwrap(), q_integer(4));
        assert_eq!(mixed3_rule(3, 2, 1).unwrap(), q_integer(6));
        assert!(mixed3_rule(1, 1, 0).is_err());
    }

    #[test]
    fn apply_rule_examples() {
        let mixed = RuleSpec::mixed3();
        assert_eq!(apply_rule(&mixed, 1, 1, 1).unwrap(), q_integer(3));
        assert_eq!(apply_rule(&mixed, 4, 3, 2).unwrap(), q_integer(9));
        let doubled = RuleSpec::parse("2", "q^m", "q^m", "q^m*(q-1)").unwrap();
        let value = apply_rule(&doubled, 1, 1, 1).unwrap();
        assert_eq!(value, q_integer(3) + q_integer(1));
    }

    #[test]
    fn spec_rejects_foreign_variables() {
        assert_eq!(
            RuleSpec::parse("1", "q^n", "q^m", "q^m"),
            Err(RuleError::WrongVariable {
                slot: "t",
                var: IndexVar::N
            })
        );
        assert!(matches!(
            RuleSpec::parse("1", "q^", "q^m", "q^m"),
            Err(RuleError::Parse { slot: "t", .. })
        ));
    }

    #[test]
    fn apply_rule_propagates_negative_index() {
        let spec = RuleSpec::parse("1", "q^(m-2)", "q^m", "q^m").unwrap();
        assert!(matches!(
            apply_rule(&spec, 1, 1, 1),
            Err(RuleError::Eval {
                slot: "t",
                m: 1,
                ..
            })
        ));
    }

    #[test]
    fn verify_rule_examples() {
        let report = verify_rule(&RuleSpec::mixed3(), 20, 20, 20).unwrap();
        assert!(report.passed);
        assert!(report.failures.is_empty());

        let wrong_v = RuleSpec::parse("1", "q^m", "q^m", "q^m").unwrap();
        let report = verify_rule(&wrong_v, 2, 2, 2).unwrap();
        assert!(!report.passed);
        assert!(report
            .failures
            .iter()
            .any(|f| (f.m, f.n, f.k) == (1, 1, Some(2))));
        // listed in lexicographic order, residuals nonzero
        let keys: Vec<_> = report.failures.iter().map(|f| (f.m, f.n, f.k)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);

        // 1 + (q + q^2) = [3] at (1,1,1) only
        let tuned = RuleSpec::parse("1", "0", "0", "q + q^2").unwrap();
        assert!(verify_rule(&tuned, 1, 1, 1).unwrap().passed);
        assert!(!verify_rule(&tuned, 1, 1, 2).unwrap().passed);
    }

    #[test]
    fn builtin_two_argument_sweeps() {
        for rule in [BuiltinRule::Linear, BuiltinRule::Quad1, BuiltinRule::Quad2] {
            let report = rule.verify(15, 15, 15).unwrap();
            assert!(report.passed, "{rule}");
            assert_eq!(report.range.k, None);
        }
        assert!(BuiltinRule::Mixed3.apply2(1, 1).is_err());
        assert_eq!("quad2".parse::<BuiltinRule>(), Ok(BuiltinRule::Quad2));
        assert!("quad3".parse::<BuiltinRule>().is_err());
    }

    #[test]
    fn derive_constant_one() {
        let d = derive_from_constant_s(&SeqExpr::int(1), 5).unwrap();
        assert_eq!(d.t, Poly::q_pow(5));
        assert_eq!(d.u, Poly::q_pow(5));
        assert_eq!(d.v, p(&[0, 0, 0, 0, 0, -1, 1]));
        for n in 1..6 {
            for k in 1..6 {
                assert!(d.residual(n, k).is_zero());
            }
        }
    }

    #[test]
    fn derive_constant_two() {
        let d = derive_from_constant_s(&SeqExpr::int(2), 1).unwrap();
        assert_eq!(d.u, p(&[-1, 1]));
        assert_eq!(d.residual(2, 2), Poly::q_pow(2));
        // residual agrees with substituting the recovered coefficients directly
        for n in 1..5 {
            for k in 1..5 {
                let direct = d.coefficients().combine(1, n, k) - q_integer(1 + n + k);
                assert_eq!(d.residual(n, k), direct);
            }
        }
    }

    #[test]
    fn derive_rejects_nonconstant() {
        let s: SeqExpr = "q^m".parse().unwrap();
        assert!(matches!(
            derive_from_constant_s(&s, 1),
            Err(RuleError::NotConstant { m: 1, .. })
        ));
        // constant-valued at m = 0 exponent is fine
        let s: SeqExpr = "1/2 * q^(m-3)".parse().unwrap();
        let d = derive_from_constant_s(&s, 3).unwrap();
        assert_eq!(d.a, rational(1, 2));
    }

    #[test]
    fn obstruction_examples() {
        let s: SeqExpr = "q^3".parse().unwrap();
        let o = degree_obstruction(&s, 1, 4).unwrap();
        let w = o.witness().expect("witness");
        assert!(w.is_verified());
        assert!(w.lhs.degree() > q_integer(1 + w.n + w.k).degree());
        assert!(1 < w.n + w.k - 1);

        let s: SeqExpr = "q^5".parse().unwrap();
        assert!(degree_obstruction(&s, 2, 4).unwrap().witness().is_some());

        assert_eq!(
            degree_obstruction(&SeqExpr::int(1), 1, 4),
            Err(RuleError::PreconditionViolated {
                m: 1,
                degree: Degree::Finite(0)
            })
        );
        assert_eq!(
            degree_obstruction(&SeqExpr::int(0), 1, 4),
            Err(RuleError::PreconditionViolated {
                m: 1,
                degree: Degree::NegInfinity
            })
        );
        assert_eq!(
            degree_obstruction(&s, 1, 1),
            Err(RuleError::SearchBoundTooSmall(1))
        );
    }

    #[test]
    fn obstruction_skips_cells_outside_case() {
        // m = 3 needs n + k > 4; cells with n = 1 or k = 1 agree, so (2, 3) is first
        let s: SeqExpr = "q^3".parse().unwrap();
        let w = degree_obstruction(&s, 3, 4)
            .unwrap()
            .witness()
            .unwrap()
            .clone();
        assert_eq!((w.n, w.k), (2, 3));
        // with bound 2 there is no admissible cell for m = 3
        assert!(degree_obstruction(&s, 3, 2).unwrap().witness().is_none());
    }
}
