//! Exact q-integer addition rules, quadratic zero identities, and the
//! polynomial functional equations attached to them.
//!
//! Everything lives in `Q[q]`: [`poly::Poly`] is a sparse polynomial with
//! arbitrary-precision rational coefficients, and [`expr::SeqExpr`] describes
//! polynomial-valued sequences in the index variables `m`, `n`, `k`.
//!
//! - [`rules`]: builtin addition rules, the general three-argument rule, and
//!   the recovery and obstruction procedures for its coefficients
//! - [`zero_identity`]: the six-sequence zero-identity family
//! - [`funceq`]: recurrence extension, triviality search, and closed-form
//!   solutions of the two-index equations
//! - [`cli`]: the `qrules` command-line front end

pub mod cli;
pub mod expr;
pub mod funceq;
pub mod poly;
pub mod report;
pub mod rules;
pub mod sample;
pub mod zero_identity;

pub use expr::{parse, Binding, IndexForm, IndexVar, SeqExpr};
pub use poly::{q_integer, Degree, Poly, Rational};
pub use report::{CheckedRange, Failure, VerificationReport};
