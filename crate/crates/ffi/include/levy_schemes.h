#ifndef LEVY_SCHEMES_H
#define LEVY_SCHEMES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Scheme family selector.
 */
typedef enum LsSchemeKind {
  LS_SCHEME_KIND_TRUNCATION = 0,
  LS_SCHEME_KIND_GAUSSIAN_COMPENSATION = 1,
  LS_SCHEME_KIND_THREE_MOMENT = 2,
  LS_SCHEME_KIND_HIGH_ORDER = 3,
} LsSchemeKind;

/**
 * Result of every call.
 */
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_UTF8 = 2,
  LS_STATUS_CONFIG = 3,
  LS_STATUS_DOMAIN = 4,
  LS_STATUS_UNSUPPORTED = 5,
  LS_STATUS_EPSILON_TOO_LARGE = 6,
  LS_STATUS_NUMERICAL = 7,
  LS_STATUS_BUFFER_TOO_SMALL = 8,
  LS_STATUS_PANIC = 9,
} LsStatus;

/**
 * Opaque Lévy measure.
 */
typedef struct LsMeasure LsMeasure;

/**
 * Opaque finite-activity scheme.
 */
typedef struct LsScheme LsScheme;

/**
 * Monte Carlo estimate of `E[f(X₁)]`.
 */
typedef struct LsMcResult {
  double mean;
  double stderr;
  uint64_t n_paths;
  double avg_jumps_per_path;
  uint64_t failures;
} LsMcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ls_last_error_message(void);

/**
 * Clears the last error message of this thread.
 */
void ls_clear_error(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Builds a measure from its JSON descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum LsStatus ls_measure_from_json(const char *json, struct LsMeasure **out);

/**
 * Releases a measure. NULL is ignored.
 *
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void ls_measure_free(struct LsMeasure *m);

/**
 * `ν(|x| > r)`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_measure_tail_mass(const struct LsMeasure *m, double r, double *out);

/**
 * Builds a scheme at truncation level `epsilon`; `n` is used by the
 * high-order kind only.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_scheme_build(const struct LsMeasure *m,
                              enum LsSchemeKind kind,
                              double epsilon,
                              uint32_t n,
                              struct LsScheme **out);

/**
 * Releases a scheme. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ls_scheme_free(struct LsScheme *s);

/**
 * Total intensity `λ_ε`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_scheme_lambda(const struct LsScheme *s, double *out);

/**
 * Drift `γ_ε`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_scheme_gamma(const struct LsScheme *s, double *out);

/**
 * Copies atom locations and rates. `*count` receives the number of atoms
 * even when `capacity` is too small (then `BufferTooSmall` is returned).
 * `locations`/`rates` may be NULL when `capacity` is 0.
 *
 * # Safety
 * The arrays must hold `capacity` doubles; `count` must be writable.
 */
enum LsStatus ls_scheme_atoms(const struct LsScheme *s,
                              double *locations,
                              double *rates,
                              size_t capacity,
                              size_t *count);

/**
 * `∫ x^k ν_ε(dx)` for `k ≥ 1`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_scheme_moment(const struct LsScheme *s, int32_t k, double *out);

/**
 * JSON form of the scheme; release with [`ls_string_free`].
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_scheme_to_json(const struct LsScheme *s, char **out);

/**
 * Rebuilds a scheme from [`ls_scheme_to_json`] output.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum LsStatus ls_scheme_from_json(const char *json, struct LsScheme **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void ls_string_free(char *p);

/**
 * Jump-adapted Monte Carlo estimate for the SDE given as JSON, e.g.
 * `{"coefficient": {"type": "sin", "a": 1}, "x0": 1, "payoff": {"type": "cos", "omega": 2}}`.
 * `workers = 0` selects the default thread count.
 *
 * # Safety
 * `s` must be a live handle, `sde_json` NUL-terminated, `out` writable.
 */
enum LsStatus ls_estimate(const struct LsScheme *s,
                          const char *sde_json,
                          uint64_t n_paths,
                          uint64_t seed,
                          uint32_t workers,
                          struct LsMcResult *out);

/**
 * `(3−α)(2/(2−α))^{4/α}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LsStatus ls_optimality_constant(double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVY_SCHEMES_H */
