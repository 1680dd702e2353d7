//! Quadratic zero identities for three q-integers.
//!
//! A zero identity is a family of sequences with
//!
//! ```text
//! r'_{n,k} [m] + u'_m s'_k [n] + v'_m t'_n [k] + w'_m [n][k] = 0
//! ```
//!
//! for all positive `m, n, k`. Every such family is determined by two
//! sequences `r_{1,k}`, `r_{n,1}` sharing `r = r_{1,1}`, two polynomials
//! `s`, `t` and two nonzero constants `u`, `v`:
//!
//! ```text
//! r'_{n,k} = r_{1,k} [n] + r_{n,1} [k] - r [n][k]
//! s'_k     = -(r_{1,k} - r [k] - u s [k]) / u
//! t'_n     = -(r_{n,1} - r [n] - v t [n]) / v
//! u'_m     = u [m]
//! v'_m     = v [m]
//! w'_m     = -(r + u s + v t) [m]
//! ```

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Binding, EvalError, IndexVar, SeqExpr};
use crate::poly::{q_integer, Poly, Rational};
use crate::report::{CheckedRange, Failure, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZeroIdentityError {
    #[error("constant `{0}` must be nonzero")]
    ZeroConstant(&'static str),
    #[error("r_(1,k) at k = 1 is {r1k} but r_(n,1) at n = 1 is {rn1}; they must agree")]
    InitialMismatch { r1k: Poly, rn1: Poly },
    #[error("`{slot}` may only reference {allowed}, found `{found}`")]
    WrongVariable {
        slot: &'static str,
        allowed: IndexVar,
        found: IndexVar,
    },
    #[error("evaluating `{slot}` at index {index}: {source}")]
    Eval {
        slot: &'static str,
        index: u64,
        #[source]
        source: EvalError,
    },
    #[error("index {name} must be positive, got 0")]
    IndexNotPositive { name: &'static str },
}

/// Free parameters of a zero-identity family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroIdentitySpec {
    r1k: SeqExpr,
    rn1: SeqExpr,
    s0: Poly,
    t0: Poly,
    u0: Rational,
    v0: Rational,
    r: Poly,
}

fn only_var(slot: &'static str, e: &SeqExpr, allowed: IndexVar) -> Result<(), ZeroIdentityError> {
    match e.variables().into_iter().find(|&v| v != allowed) {
        Some(found) => Err(ZeroIdentityError::WrongVariable {
            slot,
            allowed,
            found,
        }),
        None => Ok(()),
    }
}

fn eval_at(
    slot: &'static str,
    e: &SeqExpr,
    var: IndexVar,
    index: u64,
) -> Result<Poly, ZeroIdentityError> {
    e.evaluate(&Binding::new().with(var, index))
        .map_err(|source| ZeroIdentityError::Eval {
            slot,
            index,
            source,
        })
}

impl ZeroIdentitySpec {
    /// Checks that `r1k` uses only `k`, `rn1` only `n`, both constants are
    /// nonzero, and `r1k(1) = rn1(1)`.
    pub fn new(
        r1k: SeqExpr,
        rn1: SeqExpr,
        s0: Poly,
        t0: Poly,
        u0: Rational,
        v0: Rational,
    ) -> Result<Self, ZeroIdentityError> {
        if u0.is_zero() {
            return Err(ZeroIdentityError::ZeroConstant("u"));
        }
        if v0.is_zero() {
            return Err(ZeroIdentityError::ZeroConstant("v"));
        }
        only_var("r1k", &r1k, IndexVar::K)?;
        only_var("rn1", &rn1, IndexVar::N)?;
        let r = eval_at("r1k", &r1k, IndexVar::K, 1)?;
        let r_other = eval_at("rn1", &rn1, IndexVar::N, 1)?;
        if r != r_other {
            return Err(ZeroIdentityError::InitialMismatch {
                r1k: r,
                rn1: r_other,
            });
        }
        Ok(ZeroIdentitySpec {
            r1k,
            rn1,
            s0,
            t0,
            u0,
            v0,
            r,
        })
    }

    pub fn r1k(&self) -> &SeqExpr {
        &self.r1k
    }

    pub fn rn1(&self) -> &SeqExpr {
        &self.rn1
    }

    /// The common initial polynomial `r = r_{1,1}`.
    pub fn r(&self) -> &Poly {
        &self.r
    }

    pub fn s0(&self) -> &Poly {
        &self.s0
    }

    pub fn t0(&self) -> &Poly {
        &self.t0
    }

    pub fn u0(&self) -> &Rational {
        &self.u0
    }

    pub fn v0(&self) -> &Rational {
        &self.v0
    }

    /// `r_{1,k}` at a concrete `k`.
    pub fn r1k_at(&self, k: u64) -> Result<Poly, ZeroIdentityError> {
        eval_at("r1k", &self.r1k, IndexVar::K, k)
    }

    /// `r_{n,1}` at a concrete `n`.
    pub fn rn1_at(&self, n: u64) -> Result<Poly, ZeroIdentityError> {
        eval_at("rn1", &self.rn1, IndexVar::N, n)
    }
}

/// The six sequences built from a [`ZeroIdentitySpec`].
///
/// `w'_m` is stored through its coefficient `w = w'_1`, so `w'_m = w [m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedFamily {
    spec: ZeroIdentitySpec,
    w: Poly,
}

pub fn build_family(spec: &ZeroIdentitySpec) -> DerivedFamily {
    let w = -(spec.r() + &spec.s0.scale(&spec.u0) + spec.t0.scale(&spec.v0));
    DerivedFamily {
        spec: spec.clone(),
        w,
    }
}

/// A family together with the values of its sequences at one point, for
/// reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySample {
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub rprime: Poly,
    pub sprime: Poly,
    pub tprime: Poly,
    pub uprime: Poly,
    pub vprime: Poly,
    pub wprime: Poly,
}

impl DerivedFamily {
    pub fn spec(&self) -> &ZeroIdentitySpec {
        &self.spec
    }

    /// `w = w'_1 = -(r + u s + v t)`.
    pub fn w_coefficient(&self) -> &Poly {
        &self.w
    }

    /// Replace `w` with an arbitrary polynomial, e.g. to inject a fault.
    pub fn with_w_coefficient(mut self, w: Poly) -> Self {
        self.w = w;
        self
    }

    pub fn rprime(&self, n: u64, k: u64) -> Result<Poly, ZeroIdentityError> {
        let (qn, qk) = (q_integer(n), q_integer(k));
        Ok(self.spec.r1k_at(k)? * &qn + self.spec.rn1_at(n)? * &qk - self.spec.r() * &qn * &qk)
    }

    pub fn sprime(&self, k: u64) -> Result<Poly, ZeroIdentityError> {
        Ok(self.sprime_from(&self.spec.r1k_at(k)?, k))
    }

    pub fn tprime(&self, n: u64) -> Result<Poly, ZeroIdentityError> {
        Ok(self.tprime_from(&self.spec.rn1_at(n)?, n))
    }

    pub fn uprime(&self, m: u64) -> Poly {
        q_integer(m).scale(&self.spec.u0)
    }

    pub fn vprime(&self, m: u64) -> Poly {
        q_integer(m).scale(&self.spec.v0)
    }

    pub fn wprime(&self, m: u64) -> Poly {
        &self.w * &q_integer(m)
    }

    fn sprime_from(&self, r1k: &Poly, k: u64) -> Poly {
        let spec = &self.spec;
        let qk = q_integer(k);
        let inner = r1k - &(spec.r() * &qk) - spec.s0.scale(&spec.u0) * &qk;
        inner.scale(&-(Rational::one() / &spec.u0))
    }

    fn tprime_from(&self, rn1: &Poly, n: u64) -> Poly {
        let spec = &self.spec;
        let qn = q_integer(n);
        let inner = rn1 - &(spec.r() * &qn) - spec.t0.scale(&spec.v0) * &qn;
        inner.scale(&-(Rational::one() / &spec.v0))
    }

    pub fn sample(&self, m: u64, n: u64, k: u64) -> Result<FamilySample, ZeroIdentityError> {
        Ok(FamilySample {
            m,
            n,
            k,
            rprime: self.rprime(n, k)?,
            sprime: self.sprime(k)?,
            tprime: self.tprime(n)?,
            uprime: self.uprime(m),
            vprime: self.vprime(m),
            wprime: self.wprime(m),
        })
    }
}

/// `r'_{n,k}[m] + u'_m s'_k [n] + v'_m t'_n [k] + w'_m [n][k]`.
pub fn evaluate_identity(
    f: &DerivedFamily,
    m: u64,
    n: u64,
    k: u64,
) -> Result<Poly, ZeroIdentityError> {
    for (name, v) in [("m", m), ("n", n), ("k", k)] {
        if v == 0 {
            return Err(ZeroIdentityError::IndexNotPositive { name });
        }
    }
    let (qm, qn, qk) = (q_integer(m), q_integer(n), q_integer(k));
    let us = f.uprime(m) * f.sprime(k)?;
    let vt = f.vprime(m) * f.tprime(n)?;
    Ok(f.rprime(n, k)? * &qm + us * &qn + vt * &qk + f.wprime(m) * &qn * &qk)
}

/// Sweep a (possibly modified) family over the box, expecting zero everywhere.
pub fn verify_derived(
    f: &DerivedFamily,
    max_m: u64,
    max_n: u64,
    max_k: u64,
) -> Result<VerificationReport, ZeroIdentityError> {
    for (name, v) in [("max_m", max_m), ("max_n", max_n), ("max_k", max_k)] {
        if v == 0 {
            return Err(ZeroIdentityError::IndexNotPositive { name });
        }
    }
    let r1k = (1..=max_k)
        .map(|k| f.spec.r1k_at(k))
        .collect::<Result<Vec<_>, _>>()?;
    let rn1 = (1..=max_n)
        .map(|n| f.spec.rn1_at(n))
        .collect::<Result<Vec<_>, _>>()?;
    let sprime: Vec<Poly> = (1..=max_k)
        .map(|k| f.sprime_from(&r1k[k as usize - 1], k))
        .collect();
    let tprime: Vec<Poly> = (1..=max_n)
        .map(|n| f.tprime_from(&rn1[n as usize - 1], n))
        .collect();
    let r = f.spec.r();

    let triples: Vec<(u64, u64, u64)> = (1..=max_m)
        .flat_map(|m| (1..=max_n).flat_map(move |n| (1..=max_k).map(move |k| (m, n, k))))
        .collect();
    let failures = triples
        .into_par_iter()
        .filter_map(|(m, n, k)| {
            // every product here is by a q-integer, which has a linear-time path
            let rprime = r1k[k as usize - 1].mul_q_integer(n)
                + rn1[n as usize - 1].mul_q_integer(k)
                - r.mul_q_integer(n).mul_q_integer(k);
            let us = sprime[k as usize - 1].mul_q_integer(m).scale(&f.spec.u0);
            let vt = tprime[n as usize - 1].mul_q_integer(m).scale(&f.spec.v0);
            let w = f.w.mul_q_integer(m).mul_q_integer(n).mul_q_integer(k);
            let residual = rprime.mul_q_integer(m) + us.mul_q_integer(n) + vt.mul_q_integer(k) + w;
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

pub fn verify_family(
    spec: &ZeroIdentitySpec,
    max_m: u64,
    max_n: u64,
    max_k: u64,
) -> Result<VerificationReport, ZeroIdentityError> {
    verify_derived(&build_family(spec), max_m, max_n, max_k)
}
