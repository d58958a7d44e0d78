#pragma once

/* Generated from the telescopic-ffi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum TlStatus {
  /**
   * Success.
   */
  TL_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  TL_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TL_STATUS_INVALID_STRING = 2,
  /**
   * A string argument did not parse.
   */
  TL_STATUS_PARSE = 3,
  /**
   * Arguments were outside the admissible domain.
   */
  TL_STATUS_DOMAIN = 4,
  /**
   * The request exceeded a capacity guard of the chosen engine.
   */
  TL_STATUS_CAPACITY = 5,
  /**
   * The grid oracle did not stabilize at the requested resolutions.
   */
  TL_STATUS_INCONCLUSIVE = 6,
  /**
   * An internal panic was caught at the boundary.
   */
  TL_STATUS_PANIC = 7,
} TlStatus;

/**
 * Opaque handle over a computed profile of Betti numbers.
 */
typedef struct TlBettiProfile TlBettiProfile;

/**
 * Opaque handle over a validated vector of leg lengths.
 */
typedef struct TlLengthVector TlLengthVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns a copy of the message stored by the most recent failed call on
 * this thread, or NULL when the most recent call succeeded. The caller
 * releases the copy with tl_string_free.
 */
char *tl_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is a no-op.
 */
void tl_string_free(char *s);

/**
 * Parses a comma-separated list of leg lengths (rationals like `5/4` or
 * square roots like `sqrt(2)`, telescopic leg last) into a handle.
 */
enum TlStatus tl_length_vector_parse(const char *spec, struct TlLengthVector **out);

void tl_length_vector_free(struct TlLengthVector *lv);

/**
 * Number of legs, telescopic included.
 */
enum TlStatus tl_length_vector_n(const struct TlLengthVector *lv, size_t *out);

/**
 * Writes 1 when the configuration space has two connected components,
 * 0 when it has one. Fails for n = 3 and for non-generic vectors.
 */
enum TlStatus tl_length_vector_disconnected(const struct TlLengthVector *lv, int *out);

/**
 * Computes the full profile of Betti numbers for the handle.
 */
enum TlStatus tl_betti_compute(const struct TlLengthVector *lv, struct TlBettiProfile **out);

void tl_betti_free(struct TlBettiProfile *profile);

/**
 * Dimension n - 3 of the configuration space.
 */
enum TlStatus tl_betti_dimension(const struct TlBettiProfile *profile, size_t *out);

/**
 * Number of stored ranks b_0 .. b_{count-1}.
 */
enum TlStatus tl_betti_rank_count(const struct TlBettiProfile *profile, size_t *out);

/**
 * Writes 1 when no subset of the legs sums to half the perimeter.
 */
enum TlStatus tl_betti_generic(const struct TlBettiProfile *profile, int *out);

/**
 * Betti number b_k as a decimal string.
 */
enum TlStatus tl_betti_rank_decimal(const struct TlBettiProfile *profile, size_t k, char **out);

/**
 * Sum of all Betti numbers as a decimal string.
 */
enum TlStatus tl_betti_total_decimal(const struct TlBettiProfile *profile, char **out);

/**
 * Euler characteristic as a decimal string (possibly negative).
 */
enum TlStatus tl_betti_euler_decimal(const struct TlBettiProfile *profile, char **out);

/**
 * Counts connected components by flood-filling a grid on the torus of
 * diagonal angles. Zero resolution or rounds select the defaults (48,
 * 1); a non-positive margin threshold selects the resolution-dependent
 * default.
 */
enum TlStatus tl_grid_b0(const struct TlLengthVector *lv,
                         size_t resolution,
                         size_t rounds,
                         double margin_threshold,
                         size_t *out_components);

/**
 * Admissible energy interval [lo, hi] for field strength h, written as
 * two rational strings.
 */
enum TlStatus tl_xy_v_interval(const char *h, char **out_lo, char **out_hi);

/**
 * Analytic growth rate of the total Betti number at energy v: the
 * entropy H(p_v) below the transition, ln 2 at and above it.
 */
enum TlStatus tl_xy_tau_analytic(const char *h, const char *v, double *out);

/**
 * Finite-size growth rate ln(b) / (N + 2) for N rotators at field h and
 * energy v. Non-zero log_space sums binomial prefixes in log space
 * instead of exact big integers.
 */
enum TlStatus tl_xy_tau_empirical(size_t rotators,
                                  const char *h,
                                  const char *v,
                                  int log_space,
                                  double *out);

/**
 * Total Betti number as an exact decimal string.
 */
enum TlStatus tl_xy_total_betti_decimal(size_t rotators, const char *h, const char *v, char **out);

/**
 * Natural logarithm of the total Betti number, computed in log space.
 */
enum TlStatus tl_xy_total_betti_ln(size_t rotators, const char *h, const char *v, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
