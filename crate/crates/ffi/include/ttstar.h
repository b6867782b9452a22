#ifndef TTSTAR_H
#define TTSTAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every fallible entry point.
 */
typedef enum TtstarStatus {
  TtstarOk = 0,
  TtstarInvalidArgument = 1,
  TtstarOutOfRange = 2,
  TtstarNoConvergence = 3,
  TtstarInternal = 4,
  TtstarIo = 5,
  TtstarPanic = 6,
} TtstarStatus;

/**
 * Profile selector for [`ttstar_solution_profile`].
 */
typedef enum TtstarProfile {
  TtstarProfileW0 = 0,
  TtstarProfileW1 = 1,
  TtstarProfileQ0 = 2,
  TtstarProfileQ1 = 3,
  TtstarProfileH = 4,
  TtstarProfileS = 5,
  TtstarProfileR = 6,
} TtstarProfile;

/**
 * Opaque solution handle.
 */
typedef struct TtstarSolution TtstarSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread; empty when no error has occurred.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *ttstar_last_error(void);

/**
 * Release a string allocated by this library.
 *
 * # Safety
 * `s` must come from a `ttstar_*` function returning `char*` and must not be
 * freed twice.
 */
void ttstar_string_free(char *s);

/**
 * Solve the system for exponents (a, b) and asymptotic data
 * (gamma0, gamma1) on the log-radial grid [s_min, s_max] with m nodes.
 * Pass m = 0 for the default grid (-14, 3, 1701).
 *
 * # Safety
 * `out` must be a valid pointer to a `TtstarSolution*` slot.
 */
enum TtstarStatus ttstar_solve(double a,
                               double b,
                               double gamma0,
                               double gamma1,
                               double s_min,
                               double s_max,
                               uintptr_t m,
                               struct TtstarSolution **out);

/**
 * Number of grid nodes in a solution.
 *
 * # Safety
 * `sol` must be a live handle from [`ttstar_solve`].
 */
uintptr_t ttstar_solution_len(const struct TtstarSolution *sol);

/**
 * Copy one profile (or the s/r coordinate axes) into `buf`, which must hold
 * `len >= ttstar_solution_len(sol)` doubles.
 *
 * # Safety
 * `sol` must be a live handle and `buf` must point to at least `len` doubles.
 */
enum TtstarStatus ttstar_solution_profile(const struct TtstarSolution *sol,
                                          enum TtstarProfile which,
                                          double *buf,
                                          uintptr_t len);

/**
 * Verification report for a solution as a JSON document (schema matching the
 * CLI), or NULL on serialization failure.
 *
 * # Safety
 * `sol` must be a live handle.
 */
char *ttstar_solution_report_json(const struct TtstarSolution *sol);

/**
 * Release a solution handle.
 *
 * # Safety
 * `sol` must come from [`ttstar_solve`] and must not be freed twice.
 */
void ttstar_solution_free(struct TtstarSolution *sol);

/**
 * gamma for the case (l1, l2) (l2 = 0 for single-block rows) from the
 * comma-separated class exponents in `k_csv` (rationals like "-2/3").
 * Returns "g0 g1" computed by the closed form; with `check` nonzero the
 * first-principles derivation is cross-run and a mismatch fails with
 * TTSTAR_INTERNAL. Free the result with [`ttstar_string_free`].
 *
 * # Safety
 * `k_csv` must be a NUL-terminated string and `out` a valid slot.
 */
enum TtstarStatus ttstar_gamma_from_exponents(uint32_t l1,
                                              uint32_t l2,
                                              const char *k_csv,
                                              int32_t check,
                                              char **out);

/**
 * Invert gamma: class exponents for the case (l1, l2) with the given
 * "g0,g1" and total degree (rationals). Returns them space-separated.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be a valid slot.
 */
enum TtstarStatus ttstar_exponents_from_gamma(uint32_t l1,
                                              uint32_t l2,
                                              const char *gamma_csv,
                                              const char *total_degree,
                                              char **out);

/**
 * The worked-example catalog as JSON (name, case, data, tabulated and
 * derived gamma, discrepancy flag, admissibility).
 * Free with [`ttstar_string_free`]; NULL on internal failure.
 */
char *ttstar_catalog_json(void);

/**
 * Structure checks for a block pattern (identity T). Returns the report as
 * JSON; free with [`ttstar_string_free`].
 *
 * # Safety
 * `blocks` must point to `n_blocks` readable entries; `out` must be valid.
 */
enum TtstarStatus ttstar_verify_structure(const uint32_t *blocks, uintptr_t n_blocks, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TTSTAR_H */
