//! Polynomial functional equations attached to the addition rules.
//!
//! The three-index equation
//!
//! ```text
//! f_{m+n+k} = f_m + q^m f_n + q^m f_k + q^m (q - 1) f_n f_k
//! ```
//!
//! determines `f_N` for `N >= 3` from `f_1, f_2`, but only when every
//! decomposition `N = m + n + k` gives the same value. [`extend_sequence`]
//! builds the sequence and records disagreements. The two-index equations
//! (linear, quad1, quad2) have closed-form solutions in terms of `f_1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{integer, q_integer, Poly, PolyError};
use crate::report::{CheckedRange, Failure, VerificationReport};
use crate::sample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FuncEqError {
    #[error("horizon must be at least 3, got {0}")]
    HorizonTooSmall(usize),
    #[error("index {name} must be positive, got 0")]
    IndexNotPositive { name: &'static str },
    #[error("sequence has {len} terms but the sweep needs {needed}")]
    SequenceTooShort { len: usize, needed: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("coefficient bound 0 leaves only the zero seed, which is trivial")]
    EmptySampleSpace,
    #[error("closed form for {kind} did not divide exactly: {source}")]
    InvariantViolation {
        kind: TwoVarEquation,
        #[source]
        source: PolyError,
    },
}

/// Right-hand side of the three-index equation.
pub fn quafe_step(fm: &Poly, fn_: &Poly, fk: &Poly, m: u64) -> Poly {
    debug_assert!(m >= 1);
    let q_minus_one = Poly::from_coeffs(&[-1, 1]);
    let tail = fn_ + fk + q_minus_one * fn_ * fk;
    fm + &tail.shift(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceSource {
    Iterated,
    ClosedForm,
    UserSupplied,
}

/// `f_1, f_2, ...` with where the values came from. `consistent_up_to` is the
/// largest `N` for which all decompositions agreed (for iterated sequences
/// this is the number of values).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FESequence {
    pub values: Vec<Poly>,
    pub source: SequenceSource,
    pub consistent_up_to: usize,
}

impl FESequence {
    pub fn user_supplied(values: Vec<Poly>) -> Self {
        FESequence {
            consistent_up_to: 0,
            values,
            source: SequenceSource::UserSupplied,
        }
    }

    /// `f_1, ..., f_len` from the closed-form solution of a two-index equation.
    pub fn closed_form(kind: TwoVarEquation, f1: &Poly, len: usize) -> Result<Self, FuncEqError> {
        let values = (1..=len as u64)
            .map(|n| kind.solve(f1, n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FESequence {
            consistent_up_to: values.len(),
            values,
            source: SequenceSource::ClosedForm,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f_n`, one-based.
    pub fn get(&self, n: usize) -> Option<&Poly> {
        n.checked_sub(1).and_then(|i| self.values.get(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrivialMatch {
    Zero,
    QInteger,
    None,
}

impl TrivialMatch {
    pub fn classify(f1: &Poly, f2: &Poly) -> Self {
        if f1.is_zero() && f2.is_zero() {
            TrivialMatch::Zero
        } else if *f1 == q_integer(1) && *f2 == q_integer(2) {
            TrivialMatch::QInteger
        } else {
            TrivialMatch::None
        }
    }
}

impl fmt::Display for TrivialMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrivialMatch::Zero => "zero",
            TrivialMatch::QInteger => "q-integer",
            TrivialMatch::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Seed {
    pub f1: Poly,
    pub f2: Poly,
}

/// Two decompositions of `n` that produced different values;
/// `residual = value(other) - value(reference)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub n: u64,
    pub reference: (u64, u64, u64),
    pub other: (u64, u64, u64),
    pub residual: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub seed: Seed,
    pub horizon: usize,
    pub violations: Vec<Violation>,
    pub trivial_match: TrivialMatch,
    pub sequence: FESequence,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All `(m, n, k)` with positive entries summing to `total`, lexicographic.
pub fn decompositions(total: u64) -> impl Iterator<Item = (u64, u64, u64)> {
    (1..total.saturating_sub(1)).flat_map(move |m| {
        (1..total - m).filter_map(move |n| {
            let k = total - m - n;
            (k >= 1).then_some((m, n, k))
        })
    })
}

/// Extend `(f_1, f_2)` through the three-index equation up to `horizon`,
/// stopping at the first index where decompositions disagree. The
/// lexicographically least decomposition is the reference value.
pub fn extend_sequence(
    f1: &Poly,
    f2: &Poly,
    horizon: usize,
) -> Result<ConsistencyReport, FuncEqError> {
    if horizon < 3 {
        return Err(FuncEqError::HorizonTooSmall(horizon));
    }
    let mut values = vec![f1.clone(), f2.clone()];
    let mut violations = Vec::new();
    for total in 3..=horizon as u64 {
        let mut decomps = decompositions(total);
        let (m, n, k) = decomps.next().expect("total >= 3 has a decomposition");
        let step = |m: u64, n: u64, k: u64| {
            quafe_step(
                &values[m as usize - 1],
                &values[n as usize - 1],
                &values[k as usize - 1],
                m,
            )
        };
        let reference = step(m, n, k);
        for (a, b, c) in decomps {
            let residual = step(a, b, c) - &reference;
            if !residual.is_zero() {
                violations.push(Violation {
                    n: total,
                    reference: (m, n, k),
                    other: (a, b, c),
                    residual,
                });
            }
        }
        if !violations.is_empty() {
            break;
        }
        values.push(reference);
    }
    let consistent_up_to = values.len();
    Ok(ConsistencyReport {
        seed: Seed {
            f1: f1.clone(),
            f2: f2.clone(),
        },
        horizon,
        violations,
        trivial_match: TrivialMatch::classify(f1, f2),
        sequence: FESequence {
            values,
            source: SequenceSource::Iterated,
            consistent_up_to,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifySummary {
    pub horizon: usize,
    pub trials: usize,
    pub max_degree: u64,
    pub coeff_bound: i64,
    pub rng_seed: u64,
    pub consistent: usize,
    pub inconsistent: usize,
    /// Consistent seeds other than the two trivial ones.
    pub counterexamples: Vec<Seed>,
}

/// Draw a seed `(f_1, f_2)` with integer coefficients in
/// `[-coeff_bound, coeff_bound]` and degree at most `max_degree`, redrawing
/// while it equals one of the trivial seeds.
pub fn sample_seed<R: Rng>(rng: &mut R, max_degree: u64, coeff_bound: i64) -> Seed {
    loop {
        let f1 = sample::random_poly(rng, max_degree, coeff_bound);
        let f2 = sample::random_poly(rng, max_degree, coeff_bound);
        if TrivialMatch::classify(&f1, &f2) == TrivialMatch::None {
            return Seed { f1, f2 };
        }
    }
}

/// Randomized search for non-trivial consistent seeds. Trial `i` draws from
/// [`sample::trial_rng`]`(rng_seed, i)`, so results do not depend on the
/// order in which trials run.
pub fn certify_trivial(
    horizon: usize,
    trials: usize,
    max_degree: u64,
    coeff_bound: i64,
    rng_seed: u64,
) -> Result<CertifySummary, FuncEqError> {
    if trials == 0 {
        return Err(FuncEqError::NoTrials);
    }
    if horizon < 3 {
        return Err(FuncEqError::HorizonTooSmall(horizon));
    }
    let coeff_bound = coeff_bound.abs();
    if coeff_bound == 0 {
        return Err(FuncEqError::EmptySampleSpace);
    }
    let outcomes: Vec<(Seed, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::trial_rng(rng_seed, i);
            let seed = sample_seed(&mut rng, max_degree, coeff_bound);
            let report = extend_sequence(&seed.f1, &seed.f2, horizon).expect("horizon checked");
            (seed, report.is_consistent())
        })
        .collect();
    let consistent = outcomes.iter().filter(|(_, ok)| *ok).count();
    Ok(CertifySummary {
        horizon,
        trials,
        max_degree,
        coeff_bound,
        rng_seed,
        consistent,
        inconsistent: trials - consistent,
        counterexamples: outcomes
            .into_iter()
            .filter_map(|(seed, ok)| ok.then_some(seed))
            .collect(),
    })
}

/// Substitute `f_n = h [n]` into the step `f_{n+2} = f_{n+1+1}` at `n = 1`
/// and strip the factor `q^n (q - 1)[1][1]`, leaving `h^2 - h`.
pub fn ansatz_check(h: &Poly) -> Poly {
    let f = |n: u64| h * &q_integer(n);
    let n = 1;
    let full = quafe_step(&f(n), &f(1), &f(1), n) - f(n + 2);
    let factor = Poly::q_pow(n) * Poly::from_coeffs(&[-1, 1]) * q_integer(1) * q_integer(1);
    full.exact_div(&factor)
        .expect("residual carries the factor q^n (q - 1)")
}

/// The two-index functional equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoVarEquation {
    /// `f_{m+n} = f_m + q^m f_n`
    Linear,
    /// `f_{m+n} = f_m + f_n + (q - 1) f_m f_n`
    Quad1,
    /// `f_{m+n} = q^n f_m + q^m f_n + (1 - q) f_m f_n`
    Quad2,
}

impl TwoVarEquation {
    pub const ALL: [TwoVarEquation; 3] = [
        TwoVarEquation::Linear,
        TwoVarEquation::Quad1,
        TwoVarEquation::Quad2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TwoVarEquation::Linear => "linear",
            TwoVarEquation::Quad1 => "quad1",
            TwoVarEquation::Quad2 => "quad2",
        }
    }

    /// Right-hand side at `(m, n)` given `f_m` and `f_n`.
    pub fn rhs(self, fm: &Poly, fn_: &Poly, m: u64, n: u64) -> Poly {
        let q_minus_one = Poly::from_coeffs(&[-1, 1]);
        match self {
            TwoVarEquation::Linear => fm + &fn_.shift(m),
            TwoVarEquation::Quad1 => fm + fn_ + q_minus_one * fm * fn_,
            TwoVarEquation::Quad2 => fm.shift(n) + fn_.shift(m) - q_minus_one * fm * fn_,
        }
    }

    /// Closed-form `f_n` from `f_1`.
    pub fn solve(self, f1: &Poly, n: u64) -> Result<Poly, FuncEqError> {
        match self {
            TwoVarEquation::Linear => Ok(solve_linear(f1, n)),
            TwoVarEquation::Quad1 => solve_quad1(f1, n),
            TwoVarEquation::Quad2 => solve_quad2(f1, n),
        }
    }
}

impl fmt::Display for TwoVarEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TwoVarEquation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TwoVarEquation::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown equation `{s}` (expected linear, quad1 or quad2)"))
    }
}

/// `f_n = [n] f_1`
pub fn solve_linear(f1: &Poly, n: u64) -> Poly {
    q_integer(n) * f1
}

fn one_minus_q() -> Poly {
    Poly::from_coeffs(&[1, -1])
}

/// `f_n = (1 - (1 + (q - 1) f_1)^n) / (1 - q)`
pub fn solve_quad1(f1: &Poly, n: u64) -> Result<Poly, FuncEqError> {
    let base = Poly::one() + Poly::from_coeffs(&[-1, 1]) * f1;
    let numerator = Poly::one() - base.pow(n);
    numerator
        .exact_div(&one_minus_q())
        .map_err(|source| FuncEqError::InvariantViolation {
            kind: TwoVarEquation::Quad1,
            source,
        })
}

/// `f_n = ((q + (1 - q) f_1)^n - q^n) / (1 - q)`
pub fn solve_quad2(f1: &Poly, n: u64) -> Result<Poly, FuncEqError> {
    let base = Poly::q() + one_minus_q() * f1;
    let numerator = base.pow(n) - Poly::q_pow(n);
    numerator
        .exact_div(&one_minus_q())
        .map_err(|source| FuncEqError::InvariantViolation {
            kind: TwoVarEquation::Quad2,
            source,
        })
}

/// Check the two-index equation for all `1 <= m <= max_m`, `1 <= n <= max_n`.
/// Residuals are `rhs - f_{m+n}`.
pub fn verify_two_var_fe(
    kind: TwoVarEquation,
    f: &FESequence,
    max_m: u64,
    max_n: u64,
) -> Result<VerificationReport, FuncEqError> {
    if max_m == 0 {
        return Err(FuncEqError::IndexNotPositive { name: "max_m" });
    }
    if max_n == 0 {
        return Err(FuncEqError::IndexNotPositive { name: "max_n" });
    }
    let needed = (max_m + max_n) as usize;
    if f.len() < needed {
        return Err(FuncEqError::SequenceTooShort {
            len: f.len(),
            needed,
        });
    }
    let value = |i: u64| &f.values[i as usize - 1];
    let mut failures = Vec::new();
    for m in 1..=max_m {
        for n in 1..=max_n {
            let residual = kind.rhs(value(m), value(n), m, n) - value(m + n);
            if !residual.is_zero() {
                failures.push(Failure {
                    m,
                    n,
                    k: None,
                    residual,
                });
            }
        }
    }
    Ok(VerificationReport::new(
        CheckedRange {
            m: max_m,
            n: max_n,
            k: None,
        },
        failures,
    ))
}

/// Perturb `f_index` by adding one; used to test that sweeps catch faults.
pub fn corrupt(f: &FESequence, index: usize) -> FESequence {
    let mut out = f.clone();
    out.values[index - 1] = &out.values[index - 1] + &Poly::constant(integer(1));
    out.source = SequenceSource::UserSupplied;
    out.consistent_up_to = 0;
    out
}
