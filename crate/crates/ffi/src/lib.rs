//! C ABI for `qrules`.
//!
//! Polynomials and expressions cross the boundary as opaque handles
//! ([`QrPoly`], [`QrExpr`]) that the caller releases with the matching
//! `_free` function. Fallible functions return a [`QrStatus`] and write their
//! result through an out pointer; on failure, [`qr_last_error_message`]
//! describes what went wrong. Strings returned by the library are released
//! with [`qr_string_free`].
//!
//! Every entry point catches panics, so a bug inside the library surfaces as
//! [`QrStatus::Internal`] rather than unwinding into foreign code.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use qrules::rules::BuiltinRule;
use qrules::{parse, Binding, IndexVar, Poly, SeqExpr};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    EvalError = 4,
    DivisionError = 5,
    InvalidArgument = 6,
    Internal = 7,
}

/// Opaque polynomial in `q` with rational coefficients.
pub struct QrPoly(Poly);

/// Opaque parsed sequence expression.
pub struct QrExpr(SeqExpr);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(QrStatus, String);

impl Fail {
    fn null(what: &str) -> Self {
        Fail(QrStatus::NullPointer, format!("{what} is null"))
    }
}

fn guard<F>(f: F) -> QrStatus
where
    F: FnOnce() -> Result<(), Fail> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => QrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: the library panicked");
            QrStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null("output pointer"));
    }
    out.write(value);
    Ok(())
}

// Boxes only after the null check so a bad `out` does not leak the value.
unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs removed")
        .into_raw()
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `[n]_q = 1 + q + ... + q^(n-1)`.
#[no_mangle]
pub extern "C" fn qr_poly_q_integer(n: u64) -> *mut QrPoly {
    Box::into_raw(Box::new(QrPoly(qrules::q_integer(n))))
}

/// Parse a constant expression (one without `m`, `n`, `k`) into a polynomial.
/// On a syntax error `error_offset`, if non-null, receives the byte offset.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` and `error_offset` must be
/// valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn qr_poly_parse(
    text: *const c_char,
    out: *mut *mut QrPoly,
    error_offset: *mut usize,
) -> QrStatus {
    guard(|| {
        let expr = parse_expr(text, error_offset)?;
        let poly = expr
            .evaluate(&Binding::new())
            .map_err(|e| Fail(QrStatus::EvalError, e.to_string()))?;
        put_handle(out, QrPoly(poly))
    })
}

unsafe fn parse_expr(text: *const c_char, error_offset: *mut usize) -> Result<SeqExpr, Fail> {
    let text = str_arg(text, "text")?;
    parse(text).map_err(|e| {
        if !error_offset.is_null() {
            error_offset.write(e.offset());
        }
        Fail(QrStatus::ParseError, e.to_string())
    })
}

unsafe fn binary(
    a: *const QrPoly,
    b: *const QrPoly,
    out: *mut *mut QrPoly,
    op: impl FnOnce(&Poly, &Poly) -> Result<Poly, Fail>,
) -> Result<(), Fail> {
    let (a, b) = (ref_arg(a, "left operand")?, ref_arg(b, "right operand")?);
    let result = op(&a.0, &b.0)?;
    put_handle(out, QrPoly(result))
}

/// `*out = a + b`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_poly_add(
    a: *const QrPoly,
    b: *const QrPoly,
    out: *mut *mut QrPoly,
) -> QrStatus {
    guard(|| binary(a, b, out, |x, y| Ok(x + y)))
}

/// `*out = a - b`.
///
/// # Safety
/// Same as [`qr_poly_add`].
#[no_mangle]
pub unsafe extern "C" fn qr_poly_sub(
    a: *const QrPoly,
    b: *const QrPoly,
    out: *mut *mut QrPoly,
) -> QrStatus {
    guard(|| binary(a, b, out, |x, y| Ok(x - y)))
}

/// `*out = a * b`.
///
/// # Safety
/// Same as [`qr_poly_add`].
#[no_mangle]
pub unsafe extern "C" fn qr_poly_mul(
    a: *const QrPoly,
    b: *const QrPoly,
    out: *mut *mut QrPoly,
) -> QrStatus {
    guard(|| binary(a, b, out, |x, y| Ok(x * y)))
}

/// `*out = a / b`, failing with `DivisionError` unless `b` divides `a`.
///
/// # Safety
/// Same as [`qr_poly_add`].
#[no_mangle]
pub unsafe extern "C" fn qr_poly_exact_div(
    a: *const QrPoly,
    b: *const QrPoly,
    out: *mut *mut QrPoly,
) -> QrStatus {
    guard(|| {
        binary(a, b, out, |x, y| {
            x.exact_div(y)
                .map_err(|e| Fail(QrStatus::DivisionError, e.to_string()))
        })
    })
}

/// Degree of `p`, or -1 for the zero polynomial.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_poly_degree(p: *const QrPoly, out: *mut i64) -> QrStatus {
    guard(|| {
        let p = ref_arg(p, "polynomial")?;
        let degree = match p.0.degree().finite() {
            Some(d) => i64::try_from(d)
                .map_err(|_| Fail(QrStatus::InvalidArgument, "degree exceeds i64".into()))?,
            None => -1,
        };
        write_out(out, degree)
    })
}

/// `*out = (a == b)`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_poly_equal(
    a: *const QrPoly,
    b: *const QrPoly,
    out: *mut bool,
) -> QrStatus {
    guard(|| {
        let (a, b) = (ref_arg(a, "left operand")?, ref_arg(b, "right operand")?);
        write_out(out, a.0 == b.0)
    })
}

/// Canonical text of `p`, e.g. `q^2 - 1/2*q + 3`. Free with [`qr_string_free`].
/// Returns null if `p` is null.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qr_poly_to_string(p: *const QrPoly) -> *mut c_char {
    match p.as_ref() {
        Some(p) => into_c_string(p.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Release a polynomial handle. Null is ignored.
///
/// # Safety
/// `p` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qr_poly_free(p: *mut QrPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Parse a sequence expression such as `[m]*(q-1) + 1`. On a syntax error
/// `error_offset`, if non-null, receives the byte offset of the problem.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` and `error_offset` must be
/// valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn qr_expr_parse(
    text: *const c_char,
    out: *mut *mut QrExpr,
    error_offset: *mut usize,
) -> QrStatus {
    guard(|| {
        let expr = parse_expr(text, error_offset)?;
        put_handle(out, QrExpr(expr))
    })
}

/// Evaluate `e` at the given indices. A negative index leaves that variable
/// unbound; using an unbound variable fails with `EvalError`.
///
/// # Safety
/// `e` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_expr_evaluate(
    e: *const QrExpr,
    m: i64,
    n: i64,
    k: i64,
    out: *mut *mut QrPoly,
) -> QrStatus {
    guard(|| {
        let e = ref_arg(e, "expression")?;
        let binding = [(IndexVar::M, m), (IndexVar::N, n), (IndexVar::K, k)]
            .into_iter()
            .filter_map(|(var, v)| u64::try_from(v).ok().map(|v| (var, v)))
            .fold(Binding::new(), |b, (var, v)| b.with(var, v));
        let poly =
            e.0.evaluate(&binding)
                .map_err(|err| Fail(QrStatus::EvalError, err.to_string()))?;
        put_handle(out, QrPoly(poly))
    })
}

/// Canonical text of `e`; parsing it gives back an equivalent expression.
/// Free with [`qr_string_free`]. Returns null if `e` is null.
///
/// # Safety
/// `e` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qr_expr_to_string(e: *const QrExpr) -> *mut c_char {
    match e.as_ref() {
        Some(e) => into_c_string(e.0.render()),
        None => ptr::null_mut(),
    }
}

/// Release an expression handle. Null is ignored.
///
/// # Safety
/// `e` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qr_expr_free(e: *mut QrExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Check a builtin rule (`linear`, `quad1`, `quad2` or `mixed3`) on the box
/// `1..=max_m` x `1..=max_n` (x `1..=max_k` for `mixed3`).
///
/// # Safety
/// `rule` must be a NUL-terminated string; `passed` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_verify_builtin_rule(
    rule: *const c_char,
    max_m: u64,
    max_n: u64,
    max_k: u64,
    passed: *mut bool,
) -> QrStatus {
    guard(|| {
        let rule: BuiltinRule = str_arg(rule, "rule")?
            .parse()
            .map_err(|e: String| Fail(QrStatus::InvalidArgument, e))?;
        let report = rule
            .verify(max_m, max_n, max_k)
            .map_err(|e| Fail(QrStatus::InvalidArgument, e.to_string()))?;
        write_out(passed, report.passed)
    })
}

/// Run a `qrules` command line, e.g. `{"extend", "--f1", "1", "--f2", "q + 1"}`,
/// without the program name. Pass `--format json` for machine-readable
/// output. `*stdout_out` receives the command's standard output (or its
/// diagnostics if it wrote nothing there) and `*exit_code` the exit status
/// the binary would return.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; the out pointers must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_cli_run(
    argc: usize,
    argv: *const *const c_char,
    stdout_out: *mut *mut c_char,
    exit_code: *mut i32,
) -> QrStatus {
    guard(|| {
        if argc > 0 && argv.is_null() {
            return Err(Fail::null("argv"));
        }
        if stdout_out.is_null() || exit_code.is_null() {
            return Err(Fail::null("output pointer"));
        }
        let mut args = vec!["qrules".to_string()];
        for i in 0..argc {
            args.push(str_arg(*argv.add(i), "argument")?.to_string());
        }
        let outcome = qrules::cli::run(args);
        let text = if outcome.stdout.is_empty() {
            outcome.stderr
        } else {
            outcome.stdout
        };
        write_out(exit_code, outcome.code)?;
        write_out(stdout_out, into_c_string(text))
    })
}
