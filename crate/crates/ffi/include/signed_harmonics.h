#ifndef SIGNED_HARMONICS_H
#define SIGNED_HARMONICS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ShStatus {
  SH_STATUS_OK = 0,
  SH_STATUS_NULL_POINTER = 1,
  SH_STATUS_INVALID_UTF8 = 2,
  SH_STATUS_PARSE = 3,
  SH_STATUS_DOMAIN = 4,
  SH_STATUS_PRECONDITION = 5,
  SH_STATUS_RESOURCE = 6,
  SH_STATUS_PRECISION = 7,
  SH_STATUS_INTERNAL = 8,
  SH_STATUS_PANIC = 9,
} ShStatus;

/**
 * Greedy run towards a target.
 */
typedef struct ShGreedyRun ShGreedyRun;

/**
 * Exact minimum search result.
 */
typedef struct ShMinResult ShMinResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *sh_version(void);

/**
 * Copy of the calling thread's last error message, or null if the last
 * call succeeded. Free with [`sh_string_free`].
 */
char *sh_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void sh_string_free(char *s);

/**
 * Computes `m_N(tau)`. `tau` is `p/q` or a decimal literal; `split` and
 * `max_half_size` use the library defaults when 0.
 *
 * # Safety
 * `tau` must be a valid NUL-terminated string and `out` a writable pointer.
 */
enum ShStatus sh_min_abs(uint32_t n,
                         const char *tau,
                         uint32_t split,
                         uint64_t max_half_size,
                         struct ShMinResult **out);

/**
 * # Safety
 * `r` must be a live handle from [`sh_min_abs`].
 */
uint32_t sh_min_result_n(const struct ShMinResult *r);

/**
 * `m_N(tau)` as `p/q`. Free with [`sh_string_free`].
 *
 * # Safety
 * `r` must be a live handle from [`sh_min_abs`].
 */
char *sh_min_result_value(const struct ShMinResult *r);

/**
 * `m_N(tau) * lcm(1..N)` as `p/q` (an integer for integer tau).
 *
 * # Safety
 * `r` must be a live handle from [`sh_min_abs`].
 */
char *sh_min_result_times_lcm(const struct ShMinResult *r);

/**
 * Witness signs as a string of `+` and `-`.
 *
 * # Safety
 * `r` must be a live handle from [`sh_min_abs`].
 */
char *sh_min_result_witness(const struct ShMinResult *r);

/**
 * # Safety
 * `r` must be null or a handle from [`sh_min_abs`] that was not yet freed.
 */
void sh_min_result_free(struct ShMinResult *r);

/**
 * Runs the greedy sign choice for `n = 1..=n_max`. `tau` is a rational
 * literal or one of `pi`, `e`, `sqrt2`, `log2`, `euler_gamma`.
 * `precision_bits = 0` escalates from 256 bits as needed.
 *
 * # Safety
 * `tau` must be a valid NUL-terminated string and `out` a writable pointer.
 */
enum ShStatus sh_greedy_run(const char *tau,
                            uint64_t n_max,
                            uint32_t precision_bits,
                            struct ShGreedyRun **out);

/**
 * # Safety
 * `r` must be a live handle from [`sh_greedy_run`].
 */
uint64_t sh_greedy_len(const struct ShGreedyRun *r);

/**
 * Sign chosen at step `n` (1-based): `1`, `-1`, or `0` when out of range.
 *
 * # Safety
 * `r` must be a live handle from [`sh_greedy_run`].
 */
int8_t sh_greedy_sign(const struct ShGreedyRun *r, uint64_t n);

/**
 * `|sigma_n - tau|` after step `n` (1-based).
 *
 * # Safety
 * `r` must be a live handle from [`sh_greedy_run`] and `out` writable.
 */
enum ShStatus sh_greedy_residual(const struct ShGreedyRun *r, uint64_t n, double *out);

/**
 * # Safety
 * `r` must be null or a handle from [`sh_greedy_run`] that was not yet freed.
 */
void sh_greedy_free(struct ShGreedyRun *r);

/**
 * Limit density `g(x)`; `tol <= 0` selects the default tolerance.
 *
 * # Safety
 * `out` must be writable.
 */
enum ShStatus sh_g_density(double x, double tol, double *out);

/**
 * `prod_{n <= N} cos(pi x / n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ShStatus sh_rho_n(double x, uint64_t n, double *out);

/**
 * Exact `P[a < X_N < b]` for uniform random signs.
 *
 * # Safety
 * `out` must be writable.
 */
enum ShStatus sh_prob_exact(uint32_t n, double a, double b, double *out);

/**
 * Number of distinct values in the 6-tuple family.
 */
uint64_t sh_tuple_value_count(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGNED_HARMONICS_H */
