//! The `qrules` command-line front end.
//!
//! Every subcommand produces a [`Report`] whose status maps onto the exit
//! code: `pass`/`info` exit 0, `fail` exits 1, and usage or expression errors
//! exit 2. Reports go to stdout, diagnostics to stderr.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::expr::{self, Binding, ParseError, SeqExpr};
use crate::funceq::{self, FESequence, TwoVarEquation};
use crate::poly::{Poly, Rational};
use crate::report::VerificationReport;
use crate::rules::{self, BuiltinRule, RuleSpec};
use crate::zero_identity::{self, ZeroIdentitySpec};

#[derive(Debug, Parser)]
#[command(
    name = "qrules",
    version,
    about = "Exact q-integer addition rules and identities"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct Bounds {
    /// Bound applied to every index unless overridden.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub max: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_m: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_k: Option<u64>,
}

impl Bounds {
    fn resolve(&self) -> (u64, u64, u64) {
        (
            self.max_m.unwrap_or(self.max),
            self.max_n.unwrap_or(self.max),
            self.max_k.unwrap_or(self.max),
        )
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an expression at concrete indices, e.g. `eval "[m]*(q-1)+1" m=3`.
    Eval {
        expr: String,
        /// Bindings such as `m=3,n=2` (may be split across arguments).
        bindings: Vec<String>,
    },
    /// Sweep an addition rule against the q-integer of the summed indices.
    VerifyRule {
        /// Builtin rule: linear, quad1, quad2 or mixed3.
        #[arg(long, conflicts_with_all = ["s", "t", "u", "v"])]
        rule: Option<String>,
        #[arg(long, requires_all = ["t", "u", "v"])]
        s: Option<String>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Recover t_m, u_m, v_m from a constant s_m = a and report the leftover residual.
    Derive {
        #[arg(long)]
        a: String,
        /// Largest m to tabulate.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
    },
    /// Search for a failing triple when deg s_m > 2.
    Obstruction {
        #[arg(long)]
        s: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, default_value_t = 4)]
        bound: u64,
    },
    /// Build a zero-identity family and sweep it.
    ZeroIdentity {
        /// r_(1,k) as an expression in k.
        #[arg(long)]
        r1k: String,
        /// r_(n,1) as an expression in n.
        #[arg(long)]
        rn1: String,
        /// s(q), an expression in q only.
        #[arg(long, default_value = "0")]
        s0: String,
        /// t(q), an expression in q only.
        #[arg(long, default_value = "0")]
        t0: String,
        /// Nonzero rational u.
        #[arg(long, default_value = "1")]
        u0: String,
        /// Nonzero rational v.
        #[arg(long, default_value = "1")]
        v0: String,
        /// Negate w'_m before sweeping (fault injection).
        #[arg(long)]
        flip_w: bool,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Closed-form solution of a functional equation at index n.
    SolveFe {
        /// linear, quad1, quad2, or quafe (three-index recurrence, needs --f2).
        #[arg(long)]
        eq: String,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Extend (f_1, f_2) through the three-index recurrence and check consistency.
    Extend {
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(3..))]
        horizon: u64,
    },
    /// Random search for non-trivial consistent seeds of the three-index recurrence.
    CertifyTrivial {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(3..))]
        horizon: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 4)]
        max_degree: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(i64).range(1..))]
        coeff_bound: i64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Info => 0,
            Status::Fail => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub payload: Value,
    #[serde(skip)]
    text: String,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
        }
    }
}

/// A usage-level failure: bad expression, binding, or precondition. Exit 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(e: impl std::fmt::Display) -> UsageError {
    UsageError(e.to_string())
}

/// Result of running the CLI without touching the process streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), rendered)
            } else {
                (rendered, String::new())
            };
            return Outcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    match execute(&cli.command) {
        Ok(report) => Outcome {
            code: report.exit_code(),
            stdout: report.render(cli.format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

fn parse_arg(flag: &str, text: &str) -> Result<SeqExpr, UsageError> {
    expr::parse(text).map_err(|e| parse_diagnostic(flag, text, &e))
}

fn parse_diagnostic(flag: &str, text: &str, e: &ParseError) -> UsageError {
    UsageError(format!(
        "{flag}: {e}\n  {text}\n  {caret:>width$}",
        caret = "^",
        width = e.offset() + 1
    ))
}

/// An expression with no index variables, e.g. a seed polynomial.
fn parse_poly(flag: &str, text: &str) -> Result<Poly, UsageError> {
    let e = parse_arg(flag, text)?;
    e.evaluate(&Binding::new())
        .map_err(|err| UsageError(format!("{flag}: must be a polynomial in q only ({err})")))
}

fn parse_rational(flag: &str, text: &str) -> Result<Rational, UsageError> {
    let p = parse_poly(flag, text)?;
    p.as_constant()
        .ok_or_else(|| UsageError(format!("{flag}: expected a rational constant, got {p}")))
}

/// `"[5] = q^4 + ... + 1"` when the polynomial is a q-integer, else the polynomial.
fn describe(p: &Poly) -> String {
    match p.as_q_integer() {
        Some(n) if n >= 1 => format!("[{n}] = {p}"),
        _ => p.to_string(),
    }
}

pub fn execute(cmd: &Command) -> Result<Report, UsageError> {
    match cmd {
        Command::Eval { expr, bindings } => cmd_eval(expr, &bindings.join(",")),
        Command::VerifyRule {
            rule,
            s,
            t,
            u,
            v,
            bounds,
        } => {
            let source = match (rule, s, t, u, v) {
                (Some(name), ..) => RuleSource::Builtin(name.parse().map_err(UsageError)?),
                (None, Some(s), Some(t), Some(u), Some(v)) => RuleSource::Custom {
                    s: s.clone(),
                    t: t.clone(),
                    u: u.clone(),
                    v: v.clone(),
                },
                _ => return Err(usage("give either --rule NAME or all of --s --t --u --v")),
            };
            cmd_verify_rule(&source, bounds.resolve())
        }
        Command::Derive { a, max } => cmd_derive(a, *max),
        Command::Obstruction { s, m, bound } => cmd_obstruction(s, *m, *bound),
        Command::ZeroIdentity {
            r1k,
            rn1,
            s0,
            t0,
            u0,
            v0,
            flip_w,
            bounds,
        } => {
            let spec = ZeroIdentitySpec::new(
                parse_arg("--r1k", r1k)?,
                parse_arg("--rn1", rn1)?,
                parse_poly("--s0", s0)?,
                parse_poly("--t0", t0)?,
                parse_rational("--u0", u0)?,
                parse_rational("--v0", v0)?,
            )
            .map_err(usage)?;
            cmd_zero_identity(&spec, *flip_w, bounds.resolve())
        }
        Command::SolveFe { eq, f1, f2, n } => cmd_solve_fe(eq, f1, f2.as_deref(), *n),
        Command::Extend { f1, f2, horizon } => cmd_extend(f1, f2, *horizon as usize),
        Command::CertifyTrivial {
            horizon,
            trials,
            max_degree,
            coeff_bound,
            seed,
        } => cmd_certify_trivial(
            *horizon as usize,
            *trials as usize,
            *max_degree,
            *coeff_bound,
            *seed,
        ),
    }
}

pub fn cmd_eval(expr_text: &str, bindings: &str) -> Result<Report, UsageError> {
    let e = parse_arg("expression", expr_text)?;
    let b: Binding = bindings.parse().map_err(usage)?;
    let p = e.evaluate(&b).map_err(usage)?;
    Ok(Report {
        command: "eval",
        status: Status::Info,
        payload: json!({ "expr": e.render(), "poly": p }),
        text: format!("{p}\n"),
    })
}

#[derive(Debug, Clone)]
pub enum RuleSource {
    Builtin(BuiltinRule),
    Custom {
        s: String,
        t: String,
        u: String,
        v: String,
    },
}

fn verification_text(title: &str, report: &VerificationReport) -> String {
    let status = if report.passed { "PASS" } else { "FAIL" };
    let r = &report.range;
    let mut out = format!("{title}: {status}\n");
    match r.k {
        Some(k) => writeln!(out, "  range     m <= {}, n <= {}, k <= {k}", r.m, r.n),
        None => writeln!(out, "  range     m <= {}, n <= {}", r.m, r.n),
    }
    .unwrap();
    writeln!(out, "  failures  {}", report.failures.len()).unwrap();
    for f in &report.failures {
        let idx = match f.k {
            Some(k) => format!("({}, {}, {k})", f.m, f.n),
            None => format!("({}, {})", f.m, f.n),
        };
        writeln!(out, "  {idx:<14} residual {}", f.residual).unwrap();
    }
    out
}

fn verification_status(report: &VerificationReport) -> Status {
    if report.passed {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn cmd_verify_rule(
    source: &RuleSource,
    (max_m, max_n, max_k): (u64, u64, u64),
) -> Result<Report, UsageError> {
    let (label, report) = match source {
        RuleSource::Builtin(rule) => (
            rule.name().to_string(),
            rule.verify(max_m, max_n, max_k).map_err(usage)?,
        ),
        RuleSource::Custom { s, t, u, v } => {
            let spec = RuleSpec::new(
                parse_arg("--s", s)?,
                parse_arg("--t", t)?,
                parse_arg("--u", u)?,
                parse_arg("--v", v)?,
            )
            .map_err(usage)?;
            let label = format!(
                "s = {}, t = {}, u = {}, v = {}",
                spec.exprs()[0],
                spec.exprs()[1],
                spec.exprs()[2],
                spec.exprs()[3]
            );
            (
                label,
                rules::verify_rule(&spec, max_m, max_n, max_k).map_err(usage)?,
            )
        }
    };
    Ok(Report {
        command: "verify-rule",
        status: verification_status(&report),
        text: verification_text(&format!("verify-rule {label}"), &report),
        payload: json!({ "rule": label, "report": report }),
    })
}

pub fn cmd_derive(a_text: &str, max_m: u64) -> Result<Report, UsageError> {
    let a = parse_arg("--a", a_text)?;
    let mixed = RuleSpec::mixed3();
    let mut rows = Vec::new();
    let mut matches_mixed3 = true;
    let mut all_zero = true;
    let mut text = String::new();
    writeln!(text, "derive s_m = {}", a.render()).unwrap();
    for m in 1..=max_m {
        let d = rules::derive_from_constant_s(&a, m).map_err(usage)?;
        let residual = d.residual(2, 2);
        all_zero &= residual.is_zero();
        matches_mixed3 &= d.coefficients() == mixed.coefficients(m).map_err(usage)?;
        writeln!(
            text,
            "  m = {m:<3} a = {:<6} t = u = {:<24} v = {:<24} residual(2,2) = {residual}",
            d.a.to_string(),
            d.u.to_string(),
            d.v.to_string()
        )
        .unwrap();
        rows.push(json!({
            "m": m,
            "a": d.a.to_string(),
            "t": d.t,
            "u": d.u,
            "v": d.v,
            "residual_2_2": residual,
        }));
    }
    if matches_mixed3 {
        writeln!(
            text,
            "  t = u = q^m, v = q^m * (q - 1), residual = 0 for m <= {max_m}"
        )
        .unwrap();
    }
    let status = if all_zero { Status::Pass } else { Status::Fail };
    writeln!(text, "{}", status.label()).unwrap();
    Ok(Report {
        command: "derive",
        status,
        payload: json!({
            "a": a.render(),
            "max_m": max_m,
            "matches_mixed3": matches_mixed3,
            "rows": rows,
        }),
        text,
    })
}

pub fn cmd_obstruction(s_text: &str, m: u64, bound: u64) -> Result<Report, UsageError> {
    let s = parse_arg("--s", s_text)?;
    let outcome = rules::degree_obstruction(&s, m, bound).map_err(usage)?;
    let mut text = format!(
        "obstruction s_m = {} at m = {m}, bound {bound}\n",
        s.render()
    );
    let status = match outcome.witness() {
        Some(w) => {
            writeln!(text, "  witness   (m, n, k) = ({}, {}, {})", w.m, w.n, w.k).unwrap();
            writeln!(text, "  rule      {}", w.lhs).unwrap();
            writeln!(text, "  [m+n+k]   {}", w.rhs).unwrap();
            writeln!(text, "  degrees   {} vs {}", w.lhs.degree(), w.rhs.degree()).unwrap();
            Status::Pass
        }
        None => {
            writeln!(text, "  no witness within bound").unwrap();
            Status::Fail
        }
    };
    writeln!(text, "{}", status.label()).unwrap();
    Ok(Report {
        command: "obstruction",
        status,
        payload: json!({ "s": s.render(), "m": m, "bound": bound, "result": outcome }),
        text,
    })
}

pub fn cmd_zero_identity(
    spec: &ZeroIdentitySpec,
    flip_w: bool,
    (max_m, max_n, max_k): (u64, u64, u64),
) -> Result<Report, UsageError> {
    let mut family = zero_identity::build_family(spec);
    if flip_w {
        let flipped = -family.w_coefficient();
        family = family.with_w_coefficient(flipped);
    }
    let report = zero_identity::verify_derived(&family, max_m, max_n, max_k).map_err(usage)?;
    let sample = family.sample(1, 1, 1).map_err(usage)?;
    let title = format!(
        "zero-identity r = {}, w = {}{}",
        spec.r(),
        family.w_coefficient(),
        if flip_w { " (flipped)" } else { "" }
    );
    Ok(Report {
        command: "zero-identity",
        status: verification_status(&report),
        text: verification_text(&title, &report),
        payload: json!({
            "r1k": spec.r1k().render(),
            "rn1": spec.rn1().render(),
            "r": spec.r(),
            "s0": spec.s0(),
            "t0": spec.t0(),
            "u0": spec.u0().to_string(),
            "v0": spec.v0().to_string(),
            "w": family.w_coefficient(),
            "flip_w": flip_w,
            "at_1_1_1": sample,
            "report": report,
        }),
    })
}

pub fn cmd_solve_fe(
    eq: &str,
    f1_text: &str,
    f2_text: Option<&str>,
    n: u64,
) -> Result<Report, UsageError> {
    let f1 = parse_poly("--f1", f1_text)?;
    if eq == "quafe" {
        let f2_text = f2_text.ok_or_else(|| usage("--eq quafe needs --f2"))?;
        let f2 = parse_poly("--f2", f2_text)?;
        let report = funceq::extend_sequence(&f1, &f2, (n as usize).max(3)).map_err(usage)?;
        return Ok(match report.sequence.get(n as usize) {
            Some(value) if report.is_consistent() => Report {
                command: "solve-fe",
                status: Status::Info,
                text: format!("{}\n", describe(value)),
                payload: json!({ "eq": eq, "n": n, "value": value }),
            },
            _ => Report {
                command: "solve-fe",
                status: Status::Fail,
                text: format!(
                    "seed ({f1}, {f2}) is inconsistent at index {}\nFAIL\n",
                    report.violations[0].n
                ),
                payload: json!({ "eq": eq, "n": n, "consistency": report }),
            },
        });
    }
    if f2_text.is_some() {
        return Err(usage("--f2 only applies to --eq quafe"));
    }
    let kind: TwoVarEquation = eq.parse().map_err(UsageError)?;
    let value = kind.solve(&f1, n).map_err(usage)?;
    Ok(Report {
        command: "solve-fe",
        status: Status::Info,
        text: format!("{}\n", describe(&value)),
        payload: json!({ "eq": kind, "f1": f1, "n": n, "value": value }),
    })
}

pub fn cmd_extend(f1_text: &str, f2_text: &str, horizon: usize) -> Result<Report, UsageError> {
    let f1 = parse_poly("--f1", f1_text)?;
    let f2 = parse_poly("--f2", f2_text)?;
    let report = funceq::extend_sequence(&f1, &f2, horizon).map_err(usage)?;
    let status = if report.is_consistent() {
        Status::Pass
    } else {
        Status::Fail
    };
    let mut text = format!("extend f1 = {f1}, f2 = {f2}, horizon {horizon}\n");
    writeln!(text, "  trivial match   {}", report.trivial_match).unwrap();
    writeln!(
        text,
        "  consistent to   {}",
        report.sequence.consistent_up_to
    )
    .unwrap();
    for (i, v) in report.sequence.values.iter().enumerate() {
        writeln!(text, "  f_{:<3} {}", i + 1, describe(v)).unwrap();
    }
    for v in &report.violations {
        writeln!(
            text,
            "  violation N = {}: {:?} vs {:?}, residual {}",
            v.n, v.reference, v.other, v.residual
        )
        .unwrap();
    }
    writeln!(text, "{}", status.label()).unwrap();
    Ok(Report {
        command: "extend",
        status,
        payload: serde_json::to_value(&report).expect("report serializes"),
        text,
    })
}

pub fn cmd_certify_trivial(
    horizon: usize,
    trials: usize,
    max_degree: u64,
    coeff_bound: i64,
    seed: u64,
) -> Result<Report, UsageError> {
    let summary =
        funceq::certify_trivial(horizon, trials, max_degree, coeff_bound, seed).map_err(usage)?;
    let status = if summary.counterexamples.is_empty() {
        Status::Info
    } else {
        Status::Fail
    };
    let mut text = format!(
        "certify-trivial horizon {horizon}, {trials} trials, degree <= {max_degree}, |coeff| <= {coeff_bound}, seed {seed}\n"
    );
    writeln!(text, "  consistent      {}", summary.consistent).unwrap();
    writeln!(text, "  inconsistent    {}", summary.inconsistent).unwrap();
    writeln!(text, "  counterexamples {}", summary.counterexamples.len()).unwrap();
    for s in &summary.counterexamples {
        writeln!(text, "    f1 = {}, f2 = {}", s.f1, s.f2).unwrap();
    }
    writeln!(text, "{}", status.label()).unwrap();
    Ok(Report {
        command: "certify-trivial",
        status,
        payload: serde_json::to_value(&summary).expect("summary serializes"),
        text,
    })
}

/// Build a closed-form sequence and sweep it; shared by tests and the FFI layer.
pub fn closed_form_report(
    kind: TwoVarEquation,
    f1: &Poly,
    max_m: u64,
    max_n: u64,
) -> Result<VerificationReport, UsageError> {
    let f = FESequence::closed_form(kind, f1, (max_m + max_n) as usize).map_err(usage)?;
    funceq::verify_two_var_fe(kind, &f, max_m, max_n).map_err(usage)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("qrules").chain(args.iter().copied()))
    }

    #[test]
    fn eval_examples() {
        let out = run_args(&["eval", "[m]*(q-1)+1", "m=3"]);
        assert_eq!((out.code, out.stdout.as_str()), (0, "q^3\n"));
        let out = run_args(&["eval", "q^m", "m=0"]);
        assert_eq!(out.stdout, "1\n");
        let out = run_args(&["eval", "[n]"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("unbound"), "{}", out.stderr);
    }

    #[test]
    fn parse_errors_report_offsets() {
        let out = run_args(&["eval", "q^^m", "m=1"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("byte 2"), "{}", out.stderr);
        let out = run_args(&[
            "verify-rule",
            "--s",
            "1",
            "--t",
            "q^m",
            "--u",
            "q^m",
            "--v",
            "q^m *",
            "--max",
            "2",
        ]);
        assert_eq!(out.code, 2);
        assert!(
            out.stderr.contains("--v") && out.stderr.contains("byte 5"),
            "{}",
            out.stderr
        );
    }

    #[test]
    fn verify_rule_examples() {
        assert_eq!(
            run_args(&["verify-rule", "--rule", "mixed3", "--max", "15"]).code,
            0
        );
        assert_eq!(
            run_args(&["verify-rule", "--rule", "quad1", "--max", "15"]).code,
            0
        );
        let out = run_args(&[
            "verify-rule",
            "--s",
            "1",
            "--t",
            "q^m",
            "--u",
            "q^m",
            "--v",
            "q^m",
            "--max",
            "3",
        ]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("FAIL"));
        assert!(out.stdout.contains("(1, 1, 2)"));
        assert_eq!(run_args(&["verify-rule", "--rule", "cubic"]).code, 2);
        assert_eq!(
            run_args(&["verify-rule", "--rule", "mixed3", "--max", "0"]).code,
            2
        );
        assert_eq!(run_args(&["verify-rule", "--max", "3"]).code, 2);
    }

    #[test]
    fn derive_examples() {
        let out = run_args(&["derive", "--a", "1"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("t = u = q^m, v = q^m * (q - 1)"));
        assert_eq!(run_args(&["derive", "--a", "2"]).code, 1);
        assert_eq!(run_args(&["derive", "--a", "q"]).code, 2);
    }

    #[test]
    fn solve_fe_examples() {
        let out = run_args(&["solve-fe", "--eq", "quad1", "--f1", "1", "--n", "5"]);
        assert_eq!(out.stdout, "[5] = q^4 + q^3 + q^2 + q + 1\n");
        let out = run_args(&[
            "solve-fe", "--eq", "quafe", "--f1", "1", "--f2", "1+q", "--n", "6",
        ]);
        assert_eq!(
            (out.code, out.stdout.as_str()),
            (0, "[6] = q^5 + q^4 + q^3 + q^2 + q + 1\n")
        );
        let out = run_args(&[
            "solve-fe", "--eq", "quafe", "--f1", "q", "--f2", "1+q", "--n", "6",
        ]);
        assert_eq!(out.code, 1);
        assert_eq!(
            run_args(&["solve-fe", "--eq", "quafe", "--f1", "1", "--n", "6"]).code,
            2
        );
        assert_eq!(
            run_args(&["solve-fe", "--eq", "cubic", "--f1", "1", "--n", "6"]).code,
            2
        );
        assert_eq!(
            run_args(&["solve-fe", "--eq", "linear", "--f1", "[m]", "--n", "6"]).code,
            2
        );
    }

    #[test]
    fn other_subcommands_exit_codes() {
        assert_eq!(run_args(&["obstruction", "--s", "q^3", "--m", "1"]).code, 0);
        assert_eq!(run_args(&["obstruction", "--s", "q^2", "--m", "1"]).code, 2);
        assert_eq!(
            run_args(&["obstruction", "--s", "q^3", "--m", "3", "--bound", "2"]).code,
            1
        );
        assert_eq!(
            run_args(&[
                "zero-identity",
                "--r1k",
                "[k]",
                "--rn1",
                "[n]",
                "--s0",
                "1",
                "--max",
                "4"
            ])
            .code,
            0
        );
        assert_eq!(
            run_args(&[
                "zero-identity",
                "--r1k",
                "[k]",
                "--rn1",
                "[n]",
                "--s0",
                "1",
                "--max",
                "4",
                "--flip-w"
            ])
            .code,
            1
        );
        assert_eq!(
            run_args(&["zero-identity", "--r1k", "[k]", "--rn1", "[n]", "--u0", "0"]).code,
            2
        );
        assert_eq!(
            run_args(&["zero-identity", "--r1k", "[k]", "--rn1", "q"]).code,
            2
        );
        assert_eq!(
            run_args(&["zero-identity", "--r1k", "[k]", "--rn1", "[n]", "--v0", "q"]).code,
            2
        );
        assert_eq!(run_args(&["extend", "--f1", "1", "--f2", "1 + q"]).code, 0);
        assert_eq!(
            run_args(&["extend", "--f1", "q", "--f2", "1 + q", "--horizon", "4"]).code,
            1
        );
        assert_eq!(
            run_args(&["extend", "--f1", "q", "--f2", "1 + q", "--horizon", "2"]).code,
            2
        );
        assert_eq!(
            run_args(&["certify-trivial", "--trials", "20", "--seed", "1"]).code,
            0
        );
        assert_eq!(
            run_args(&[
                "certify-trivial",
                "--trials",
                "5",
                "--horizon",
                "3",
                "--seed",
                "1"
            ])
            .code,
            1
        );
        assert_eq!(run_args(&["certify-trivial", "--trials", "5"]).code, 2);
        assert_eq!(run_args(&["bogus"]).code, 2);
        assert_eq!(run_args(&["--help"]).code, 0);
    }

    #[test]
    fn json_output_shape() {
        let out = run_args(&[
            "--format",
            "json",
            "verify-rule",
            "--s",
            "1",
            "--t",
            "q^m",
            "--u",
            "q^m",
            "--v",
            "q^m",
            "--max",
            "2",
        ]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["status"], "fail");
        let report = &v["payload"]["report"];
        assert_eq!(report["passed"], false);
        assert_eq!(report["range"], json!({"m": 2, "n": 2, "k": 2}));
        let first = &report["failures"][0];
        assert!(first["residual"].is_string());
        assert!(first.get("m").is_some() && first.get("k").is_some());
    }
}
