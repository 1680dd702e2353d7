use serde::Serialize;

use crate::poly::Poly;

/// Box of indices a sweep covered. `k` is absent for two-index sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckedRange {
    pub m: u64,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
}

/// An index point where an identity failed, with `residual = lhs - rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub m: u64,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub residual: Poly,
}

/// Outcome of an exhaustive identity sweep. Failures are listed in
/// lexicographic index order; `passed` holds exactly when there are none.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub range: CheckedRange,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn new(range: CheckedRange, failures: Vec<Failure>) -> Self {
        debug_assert!(failures.iter().all(|f| !f.residual.is_zero()));
        VerificationReport {
            passed: failures.is_empty(),
            range,
            failures,
        }
    }
}
