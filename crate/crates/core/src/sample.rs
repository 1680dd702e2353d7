//! Deterministic random generators for polynomials, expressions and
//! zero-identity specs.
//!
//! Every random draw is keyed by `(seed, index)`: the generator for item
//! `index` is ChaCha20 seeded with `seed_from_u64(seed)` and switched to
//! stream `index`. Items can therefore be produced in any order, or in
//! parallel, and come out the same on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::expr::{Binding, IndexForm, IndexVar, SeqExpr};
use crate::poly::{integer, rational, Poly, Rational};
use crate::zero_identity::ZeroIdentitySpec;

pub fn trial_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Polynomial of degree at most `max_degree` with integer coefficients in
/// `[-coeff_bound, coeff_bound]`, drawn uniformly coefficient by coefficient.
pub fn random_poly<R: Rng>(rng: &mut R, max_degree: u64, coeff_bound: i64) -> Poly {
    let b = coeff_bound.abs();
    Poly::from_terms((0..=max_degree).map(|e| (e, integer(rng.gen_range(-b..=b)))))
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let num = rng.gen_range(-6..=6);
    let den = *[1, 1, 1, 2, 3].choose(rng).expect("nonempty");
    rational(num, den)
}

/// Index form over `vars` with coefficients in `0..=2` and constant in
/// `0..=3`, so it is non-negative under every binding.
fn random_form<R: Rng>(rng: &mut R, vars: &[IndexVar]) -> IndexForm {
    let mut form = IndexForm::constant(rng.gen_range(0..=3));
    for &v in vars {
        if rng.gen_bool(0.6) {
            form = form.plus_var(v, rng.gen_range(1..=2));
        }
    }
    form
}

/// Random expression tree of depth at most `depth` whose index forms use only
/// `vars`. Powers are capped at 2 and never nest, keeping evaluated degrees
/// modest.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32, vars: &[IndexVar]) -> SeqExpr {
    random_expr_inner(rng, depth, vars, true)
}

fn random_expr_inner<R: Rng>(
    rng: &mut R,
    depth: u32,
    vars: &[IndexVar],
    allow_pow: bool,
) -> SeqExpr {
    let leaf = depth <= 1 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => SeqExpr::Constant(random_rational(rng)),
            1 => SeqExpr::Q,
            2 => SeqExpr::QPow(random_form(rng, vars)),
            _ => SeqExpr::QInt(random_form(rng, vars)),
        };
    }
    let sub = |rng: &mut R, allow_pow| Box::new(random_expr_inner(rng, depth - 1, vars, allow_pow));
    match rng.gen_range(0..if allow_pow { 6 } else { 5 }) {
        0 => SeqExpr::Add(sub(rng, allow_pow), sub(rng, allow_pow)),
        1 => SeqExpr::Sub(sub(rng, allow_pow), sub(rng, allow_pow)),
        2 | 3 => SeqExpr::Mul(sub(rng, allow_pow), sub(rng, allow_pow)),
        4 => SeqExpr::Neg(sub(rng, allow_pow)),
        _ => SeqExpr::IntPow(sub(rng, false), rng.gen_range(0..=2)),
    }
}

/// Binding with every variable in `0..=max`.
pub fn random_binding<R: Rng>(rng: &mut R, max: u64) -> Binding {
    IndexVar::ALL
        .into_iter()
        .fold(Binding::new(), |b, v| b.with(v, rng.gen_range(0..=max)))
}

/// Random zero-identity parameters.
///
/// * `r_{1,k}`: random tree of depth at most 4 in `k`.
/// * `r_{n,1}`: random tree of depth at most 4 in `n`, plus the constant
///   polynomial `r_{1,1} - (tree at n = 1)` so both sequences start at `r`.
/// * `s`, `t`: degree at most 3, integer coefficients in `[-5, 5]`.
/// * `u`, `v`: nonzero `a/b` with `a` in `[-6, 6]`, `b` in `{1, 2, 3}`.
///
/// Draws are repeated until `r`, `s`, `t` and `r + u s + v t` are all
/// nonzero, so every part of `w'` is exercised.
pub fn random_zero_identity_spec<R: Rng>(rng: &mut R) -> ZeroIdentitySpec {
    loop {
        let r1k = random_expr(rng, 4, &[IndexVar::K]);
        let raw_rn1 = random_expr(rng, 4, &[IndexVar::N]);
        let r = r1k
            .evaluate(&Binding::new().with(IndexVar::K, 1))
            .expect("generated forms are non-negative");
        let raw_at_one = raw_rn1
            .evaluate(&Binding::new().with(IndexVar::N, 1))
            .expect("generated forms are non-negative");
        let rn1 = raw_rn1 + SeqExpr::from_poly(&(&r - &raw_at_one));
        let s0 = random_poly(rng, 3, 5);
        let t0 = random_poly(rng, 3, 5);
        let u0 = nonzero_rational(rng);
        let v0 = nonzero_rational(rng);
        let sum = &r + &s0.scale(&u0) + t0.scale(&v0);
        if r.is_zero() || s0.is_zero() || t0.is_zero() || sum.is_zero() {
            continue;
        }
        return ZeroIdentitySpec::new(r1k, rn1, s0, t0, u0, v0).expect("generated spec is valid");
    }
}

fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let c = random_rational(rng);
        if c != integer(0) {
            return c;
        }
    }
}
