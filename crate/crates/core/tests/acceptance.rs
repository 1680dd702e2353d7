//! Acceptance criteria, one line per criterion. Every check is exact symbolic
//! equality; there are no tolerances to tune.

use std::process::{Command, ExitCode};
use std::time::Instant;

use qrules::expr::{parse, ParseError, SeqExpr};
use qrules::funceq::{self, FESequence, TrivialMatch, TwoVarEquation};
use qrules::poly::{integer, q_integer, rational, Poly};
use qrules::rules::{self, RuleSpec};
use qrules::sample::{self, trial_rng};
use qrules::zero_identity::{self, evaluate_identity};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rule_sweeps() -> Check {
    for m in 1..=25 {
        for n in 1..=25 {
            let target = q_integer(m + n);
            ensure(rules::linear_rule(m, n).unwrap() == target, || {
                format!("linear ({m},{n})")
            })?;
            ensure(rules::quad1_rule(m, n).unwrap() == target, || {
                format!("quad1 ({m},{n})")
            })?;
            ensure(rules::quad2_rule(m, n).unwrap() == target, || {
                format!("quad2 ({m},{n})")
            })?;
        }
    }
    for m in 1..=20 {
        for n in 1..=20 {
            for k in 1..=20 {
                ensure(
                    rules::mixed3_rule(m, n, k).unwrap() == q_integer(m + n + k),
                    || format!("mixed3 ({m},{n},{k})"),
                )?;
            }
        }
    }
    let report = rules::verify_rule(&RuleSpec::mixed3(), 20, 20, 20).map_err(|e| e.to_string())?;
    ensure(report.passed, || "mixed3 RuleSpec sweep failed".into())?;
    Ok("3 x 625 two-argument cells, 8000 mixed3 cells, zero residual".into())
}

fn constant_s_recovery() -> Check {
    let one = SeqExpr::int(1);
    for m in 1..=25 {
        let d = rules::derive_from_constant_s(&one, m).map_err(|e| e.to_string())?;
        let qm = Poly::q_pow(m);
        ensure(d.t == qm && d.u == qm, || format!("t/u at m = {m}"))?;
        ensure(d.v == &Poly::q_pow(m + 1) - &qm, || format!("v at m = {m}"))?;
    }
    let constants = [integer(0), integer(2), integer(-1), rational(1, 2)];
    for a in &constants {
        let expr = SeqExpr::Constant(a.clone());
        for m in 1..=10 {
            let d = rules::derive_from_constant_s(&expr, m).map_err(|e| e.to_string())?;
            let residual = d.residual(2, 2);
            ensure(!residual.is_zero(), || {
                format!("a = {a}, m = {m}: zero residual")
            })?;
            // the residual is what the recovered rule actually misses by
            let direct = d.coefficients().combine(m, 2, 2) - q_integer(m + 4);
            ensure(residual == direct, || {
                format!("a = {a}, m = {m}: residual mismatch")
            })?;
        }
    }
    Ok("a = 1 recovers (q^m, q^m, q^m (q-1)) for m <= 25; a in {0, 2, -1, 1/2} leave nonzero residual for m <= 10".into())
}

fn degree_obstruction() -> Check {
    let mut found = 0;
    for s in ["q^3", "q^4", "2*q^3", "q^3 + q"] {
        let expr = parse(s).unwrap();
        for m in 1..=3 {
            let o = rules::degree_obstruction(&expr, m, 4).map_err(|e| e.to_string())?;
            let w = o
                .witness()
                .ok_or_else(|| format!("{s}, m = {m}: no witness"))?;
            let rhs = q_integer(m + w.n + w.k);
            ensure(w.rhs == rhs && !(&w.lhs - &rhs).is_zero(), || {
                format!("{s}, m = {m}: witness does not check")
            })?;
            ensure(m + 1 < w.n + w.k, || {
                format!("{s}, m = {m}: witness outside m < n+k-1")
            })?;
            found += 1;
        }
    }
    Ok(format!("{found}/12 witnesses verified by subtraction"))
}

fn zero_identity_family() -> Check {
    const SEED: u64 = 20240601;
    for i in 0..50 {
        let spec = sample::random_zero_identity_spec(&mut trial_rng(SEED, i));
        let report = zero_identity::verify_family(&spec, 12, 12, 12).map_err(|e| e.to_string())?;
        ensure(report.passed, || {
            format!("spec {i}: {} failures", report.failures.len())
        })?;

        let family = zero_identity::build_family(&spec);
        let r = spec.r().clone();
        let us = spec.s0().scale(spec.u0());
        let vt = spec.t0().scale(spec.v0());
        // full sign flip of w', then a flip of each of its three summands
        let corruptions = [
            -family.w_coefficient(),
            r.clone() - &us - &vt,
            -r.clone() + &us - &vt,
            -r.clone() - &us + &vt,
        ];
        for (j, w) in corruptions.into_iter().enumerate() {
            let bad = family.clone().with_w_coefficient(w);
            let at_origin = evaluate_identity(&bad, 1, 1, 1).map_err(|e| e.to_string())?;
            ensure(!at_origin.is_zero(), || {
                format!("spec {i}: corruption {j} vanishes at (1,1,1)")
            })?;
        }
    }
    Ok("50 generated specs pass on the 12^3 box; all 200 sign corruptions fail at (1,1,1)".into())
}

fn triviality() -> Check {
    let zero = funceq::extend_sequence(&Poly::zero(), &Poly::zero(), 12).unwrap();
    ensure(zero.is_consistent() && zero.sequence.len() == 12, || {
        "zero seed".into()
    })?;
    ensure(zero.sequence.values.iter().all(Poly::is_zero), || {
        "zero seed values".into()
    })?;
    ensure(zero.trivial_match == TrivialMatch::Zero, || {
        "zero classification".into()
    })?;

    let qint = funceq::extend_sequence(&q_integer(1), &q_integer(2), 12).unwrap();
    ensure(qint.is_consistent() && qint.sequence.len() == 12, || {
        "q-integer seed".into()
    })?;
    for n in 1..=12 {
        ensure(
            qint.sequence.get(n).unwrap() == &q_integer(n as u64),
            || format!("f_{n} != [{n}]"),
        )?;
    }
    ensure(qint.trivial_match == TrivialMatch::QInteger, || {
        "q-integer classification".into()
    })?;

    let summary = funceq::certify_trivial(10, 200, 4, 5, 42).map_err(|e| e.to_string())?;
    ensure(summary.counterexamples.is_empty(), || {
        format!(
            "{} consistent non-trivial seeds",
            summary.counterexamples.len()
        )
    })?;

    for c in -2..=2 {
        for d in 0..=3 {
            let h = Poly::monomial(integer(c), d);
            let residual = funceq::ansatz_check(&h);
            let trivial = h.is_zero() || h.is_one();
            ensure(residual.is_zero() == trivial, || format!("ansatz h = {h}"))?;
            ensure(residual == &h * &h - &h, || {
                format!("ansatz h = {h}: residual != h^2 - h")
            })?;
        }
    }
    Ok(format!(
        "trivial seeds reach 12; {} / 200 random seeds inconsistent; ansatz zero only at h in {{0, 1}}",
        summary.inconsistent
    ))
}

fn closed_forms() -> Check {
    const SEED: u64 = 7;
    for i in 0..50 {
        let f1 = sample::random_poly(&mut trial_rng(SEED, i), 5, 5);
        for kind in [TwoVarEquation::Quad1, TwoVarEquation::Quad2] {
            let f =
                FESequence::closed_form(kind, &f1, 12).map_err(|e| format!("f1 = {f1}: {e}"))?;
            let report = funceq::verify_two_var_fe(kind, &f, 6, 6).unwrap();
            ensure(report.passed, || format!("{kind}, f1 = {f1}"))?;
        }
    }
    for n in 1..=12 {
        let one = Poly::one();
        ensure(
            funceq::solve_quad1(&one, n).unwrap() == q_integer(n),
            || format!("quad1 n = {n}"),
        )?;
        ensure(
            funceq::solve_quad2(&one, n).unwrap() == q_integer(n),
            || format!("quad2 n = {n}"),
        )?;
    }
    Ok("100 closed-form sequences divide exactly and satisfy their equations on 6 x 6".into())
}

fn parser() -> Check {
    const SEED: u64 = 99;
    for i in 0..500 {
        let mut rng = trial_rng(SEED, i);
        let e = sample::random_expr(&mut rng, 6, &qrules::IndexVar::ALL);
        let text = e.render();
        let back = parse(&text).map_err(|err| format!("{text:?}: {err}"))?;
        ensure(back == e.normalized(), || {
            format!("structural mismatch for {text:?}")
        })?;
        for _ in 0..10 {
            let b = sample::random_binding(&mut rng, 6);
            ensure(back.evaluate(&b) == e.evaluate(&b), || {
                format!("{text:?} at {b:?}")
            })?;
        }
    }
    let fixtures = include_str!("fixtures/malformed.tsv");
    let mut count = 0;
    for line in fixtures
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
    {
        let mut parts = line.splitn(3, '\t');
        let (kind, offset, input) = (
            parts.next().unwrap(),
            parts.next().unwrap(),
            parts.next().unwrap_or(""),
        );
        let offset: usize = offset.parse().unwrap();
        let err = parse(input)
            .err()
            .ok_or_else(|| format!("{input:?} parsed"))?;
        let kind_ok = match kind {
            "syntax" => matches!(err, ParseError::Syntax { .. }),
            "negative-exponent" => matches!(err, ParseError::NegativeExponent { .. }),
            other => return Err(format!("unknown fixture kind {other}")),
        };
        ensure(kind_ok && err.offset() == offset, || {
            format!("{input:?}: expected {kind} at {offset}, got {err}")
        })?;
        count += 1;
    }
    Ok(format!("500 trees round-trip over 5000 bindings; {count} malformed fixtures rejected at the right byte"))
}

fn cli_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_qrules");
    let golden_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let cases = include_str!("golden/cases.txt");
    let mut count = 0;
    for line in cases.lines().filter(|l| !l.trim().is_empty()) {
        let (name, args) = line.split_once(':').unwrap();
        let args: Vec<&str> = args.split('|').map(str::trim).collect();
        let run = || {
            Command::new(bin)
                .args(["--format", "json"])
                .args(&args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(a.stdout == b.stdout, || format!("{name}: runs differ"))?;
        let expected = std::fs::read(format!("{golden_dir}/{name}.json"))
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(a.stdout == expected, || {
            format!("{name}: output differs from golden file")
        })?;
        count += 1;
    }
    ensure(count == 8, || {
        format!("expected 8 subcommands, found {count}")
    })?;
    Ok(format!(
        "{count} subcommands byte-identical across runs and to golden files"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1 rule correctness sweep", rule_sweeps),
        ("AC2 constant-s recovery", constant_s_recovery),
        ("AC3 degree obstruction", degree_obstruction),
        ("AC4 zero-identity family", zero_identity_family),
        ("AC5 functional-equation triviality", triviality),
        ("AC6 closed-form solutions", closed_forms),
        ("AC7 parser round trip", parser),
        ("AC8 CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name:<36} {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<36} {detail} ({secs:.1}s)");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
