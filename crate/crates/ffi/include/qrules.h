#ifndef QRULES_H
#define QRULES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_INVALID_UTF8 = 2,
  QR_STATUS_PARSE_ERROR = 3,
  QR_STATUS_EVAL_ERROR = 4,
  QR_STATUS_DIVISION_ERROR = 5,
  QR_STATUS_INVALID_ARGUMENT = 6,
  QR_STATUS_INTERNAL = 7,
} QrStatus;

/*
 Opaque parsed sequence expression.
 */
typedef struct QrExpr QrExpr;

/*
 Opaque polynomial in `q` with rational coefficients.
 */
typedef struct QrPoly QrPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or an empty string.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *qr_last_error_message(void);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and must not be freed twice.
 */
void qr_string_free(char *s);

/*
 `[n]_q = 1 + q + ... + q^(n-1)`.
 */
struct QrPoly *qr_poly_q_integer(uint64_t n);

/*
 Parse a constant expression (one without `m`, `n`, `k`) into a polynomial.
 On a syntax error `error_offset`, if non-null, receives the byte offset.

 # Safety
 `text` must be a NUL-terminated string; `out` and `error_offset` must be
 valid for writes or null.
 */
enum QrStatus qr_poly_parse(const char *text, struct QrPoly **out, size_t *error_offset);

/*
 `*out = a + b`.

 # Safety
 `a` and `b` must be live handles; `out` must be valid for writes.
 */
enum QrStatus qr_poly_add(const struct QrPoly *a, const struct QrPoly *b, struct QrPoly **out);

/*
 `*out = a - b`.

 # Safety
 Same as [`qr_poly_add`].
 */
enum QrStatus qr_poly_sub(const struct QrPoly *a, const struct QrPoly *b, struct QrPoly **out);

/*
 `*out = a * b`.

 # Safety
 Same as [`qr_poly_add`].
 */
enum QrStatus qr_poly_mul(const struct QrPoly *a, const struct QrPoly *b, struct QrPoly **out);

/*
 `*out = a / b`, failing with `DivisionError` unless `b` divides `a`.

 # Safety
 Same as [`qr_poly_add`].
 */
enum QrStatus qr_poly_exact_div(const struct QrPoly *a,
                                const struct QrPoly *b,
                                struct QrPoly **out);

/*
 Degree of `p`, or -1 for the zero polynomial.

 # Safety
 `p` must be a live handle; `out` must be valid for writes.
 */
enum QrStatus qr_poly_degree(const struct QrPoly *p, int64_t *out);

/*
 `*out = (a == b)`.

 # Safety
 `a` and `b` must be live handles; `out` must be valid for writes.
 */
enum QrStatus qr_poly_equal(const struct QrPoly *a, const struct QrPoly *b, bool *out);

/*
 Canonical text of `p`, e.g. `q^2 - 1/2*q + 3`. Free with [`qr_string_free`].
 Returns null if `p` is null.

 # Safety
 `p` must be a live handle or null.
 */
char *qr_poly_to_string(const struct QrPoly *p);

/*
 Release a polynomial handle. Null is ignored.

 # Safety
 `p` must come from this library and must not be freed twice.
 */
void qr_poly_free(struct QrPoly *p);

/*
 Parse a sequence expression such as `[m]*(q-1) + 1`. On a syntax error
 `error_offset`, if non-null, receives the byte offset of the problem.

 # Safety
 `text` must be a NUL-terminated string; `out` and `error_offset` must be
 valid for writes or null.
 */
enum QrStatus qr_expr_parse(const char *text, struct QrExpr **out, size_t *error_offset);

/*
 Evaluate `e` at the given indices. A negative index leaves that variable
 unbound; using an unbound variable fails with `EvalError`.

 # Safety
 `e` must be a live handle; `out` must be valid for writes.
 */
enum QrStatus qr_expr_evaluate(const struct QrExpr *e,
                               int64_t m,
                               int64_t n,
                               int64_t k,
                               struct QrPoly **out);

/*
 Canonical text of `e`; parsing it gives back an equivalent expression.
 Free with [`qr_string_free`]. Returns null if `e` is null.

 # Safety
 `e` must be a live handle or null.
 */
char *qr_expr_to_string(const struct QrExpr *e);

/*
 Release an expression handle. Null is ignored.

 # Safety
 `e` must come from this library and must not be freed twice.
 */
void qr_expr_free(struct QrExpr *e);

/*
 Check a builtin rule (`linear`, `quad1`, `quad2` or `mixed3`) on the box
 `1..=max_m` x `1..=max_n` (x `1..=max_k` for `mixed3`).

 # Safety
 `rule` must be a NUL-terminated string; `passed` must be valid for writes.
 */
enum QrStatus qr_verify_builtin_rule(const char *rule,
                                     uint64_t max_m,
                                     uint64_t max_n,
                                     uint64_t max_k,
                                     bool *passed);

/*
 Run a `qrules` command line, e.g. `{"extend", "--f1", "1", "--f2", "q + 1"}`,
 without the program name. Pass `--format json` for machine-readable
 output. `*stdout_out` receives the command's standard output (or its
 diagnostics if it wrote nothing there) and `*exit_code` the exit status
 the binary would return.

 # Safety
 `argv` must point to `argc` NUL-terminated strings; the out pointers must
 be valid for writes.
 */
enum QrStatus qr_cli_run(size_t argc,
                         const char *const *argv,
                         char **stdout_out,
                         int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QRULES_H */
