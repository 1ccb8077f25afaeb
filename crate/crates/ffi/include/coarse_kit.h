#ifndef COARSE_KIT_H
#define COARSE_KIT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CkStatus {
  CK_STATUS_OK = 0,
  CK_STATUS_NULL_POINTER = 1,
  CK_STATUS_INVALID_ARGUMENT = 2,
  CK_STATUS_SIZE_GUARD = 3,
  CK_STATUS_PARSE = 4,
  CK_STATUS_COMPUTATION = 5,
  CK_STATUS_PANIC = 6,
} CkStatus;

/**
 * Opaque handle to an immutable complex.
 */
typedef struct CkComplex CkComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *ck_last_error(void);

/**
 * Library version as a static string.
 */
const char *ck_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void ck_string_free(char *s);

/**
 * # Safety
 * `cx` must be null or a handle returned by this library, not yet freed.
 */
void ck_complex_free(struct CkComplex *cx);

/**
 * The boundary of an `n`-gon, `n ≥ 3`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CkStatus ck_circle_new(size_t n, struct CkComplex **out);

/**
 * The bundle `M_k` for primes `p ≠ q`; `reduce` selects linear circle sizes.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CkStatus ck_mk_new(uint64_t p, uint64_t q, uint32_t k, bool reduce, struct CkComplex **out);

/**
 * Parses a complex from the JSON interchange format.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum CkStatus ck_complex_from_json(const char *json, struct CkComplex **out);

/**
 * # Safety
 * `cx` must be a live handle and `out` a valid pointer.
 */
enum CkStatus ck_complex_to_json(const struct CkComplex *cx, char **out);

/**
 * # Safety
 * `cx` must be a live handle and `out` a valid pointer.
 */
enum CkStatus ck_complex_dim(const struct CkComplex *cx, size_t *out);

/**
 * Number of `k`-cells; zero above the dimension.
 *
 * # Safety
 * `cx` must be a live handle and `out` a valid pointer.
 */
enum CkStatus ck_complex_count(const struct CkComplex *cx, size_t k, size_t *out);

/**
 * # Safety
 * `cx` must be a live handle and `out` a valid pointer.
 */
enum CkStatus ck_complex_euler(const struct CkComplex *cx, int64_t *out);

/**
 * Free rank of `H_k`, and the number of nontrivial torsion summands.
 *
 * # Safety
 * `cx` must be a live handle; `rank` and `torsion` must be valid pointers.
 */
enum CkStatus ck_homology(const struct CkComplex *cx, size_t k, size_t *rank, size_t *torsion);

/**
 * `(n, m)` with `n·p^k + m·q^k = 1` and `|m|` minimal.
 *
 * # Safety
 * `n` and `m` must be valid pointers.
 */
enum CkStatus ck_bezout(int64_t p, int64_t q, uint32_t k, int64_t *n, int64_t *m);

/**
 * Runs a verification command and returns its JSON report.
 *
 * `command` is `"prop51"`, `"prop52"` or `"tower"`. `params_json` is an
 * object with `p`, `q`, `k` and optional `reduce`, `edge_scale`, `budget`,
 * `node_limit`, `method` (`"auto"` or `"ilp"`), `stages`, `n_mode` (`"lcm"` or `"factorial"`) and `out`
 * (a directory for witness files). `exit_code` receives 0 for pass, 1 for
 * fail and 2 for inconclusive.
 *
 * # Safety
 * String arguments must be nul-terminated; out-parameters must be valid pointers.
 */
enum CkStatus ck_verify(const char *command,
                        const char *params_json,
                        char **report,
                        int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COARSE_KIT_H */
