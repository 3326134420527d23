#ifndef HSLAB_H
#define HSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HslabStatus {
  HSLAB_STATUS_OK = 0,
  HSLAB_STATUS_INVALID_PARAMS = 1,
  HSLAB_STATUS_DOMAIN = 2,
  HSLAB_STATUS_NON_CONVERGENCE = 3,
  HSLAB_STATUS_NON_FINITE = 4,
  HSLAB_STATUS_DIVERGENT = 5,
  HSLAB_STATUS_ZERO_DENOMINATOR = 6,
  HSLAB_STATUS_NULL_POINTER = 7,
  HSLAB_STATUS_PANIC = 8,
  HSLAB_STATUS_OTHER = 9,
} HslabStatus;

/**
 * Radial test functions accepted by `hslab_quotient`.
 */
typedef enum HslabTestFunction {
  /**
   * `1 - r/R`.
   */
  HSLAB_TEST_FUNCTION_CONE = 0,
  /**
   * `(1 - (r/R)^2)^2`.
   */
  HSLAB_TEST_FUNCTION_QUARTIC = 1,
  /**
   * The `a = 1` minimizer at scale `arg`.
   */
  HSLAB_TEST_FUNCTION_EXTREMAL = 2,
  /**
   * Cone bump of width `arg` touching the boundary region.
   */
  HSLAB_TEST_FUNCTION_BOUNDARY_BUMP = 3,
} HslabTestFunction;

/**
 * Opaque validated parameter set.
 */
typedef struct HslabParams HslabParams;

typedef struct HslabConstants {
  double beta;
  double p_star;
  double hardy_const;
  double rearrange_threshold;
  double best_constant;
  double best_constant_err;
  /**
   * NaN unless `0 < s < p`.
   */
  double a_threshold;
} HslabConstants;

typedef struct HslabQuotient {
  double quotient;
  double quotient_err;
  double numerator;
  double denominator;
} HslabQuotient;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; valid until the next call.
 */
const char *hslab_last_error_message(void);

/**
 * Validates `(N, p, s, R, a, T)` and returns a new handle in `out`.
 * `outer <= 0` selects `T = R`; an infinite `outer` selects the whole space.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum HslabStatus hslab_params_new(uint32_t n,
                                  double p,
                                  double s,
                                  double radius,
                                  double a,
                                  double outer,
                                  struct HslabParams **out);

/**
 * Frees a handle from `hslab_params_new`; null is ignored.
 *
 * # Safety
 * `params` must be null or a handle not yet freed.
 */
void hslab_params_free(struct HslabParams *params);

/**
 * Exponents, thresholds and the best constant.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
enum HslabStatus hslab_constants(const struct HslabParams *params, struct HslabConstants *out);

/**
 * Rayleigh quotient `Q_a` of a test function; `arg` is the scale for
 * `Extremal` and the width for `BoundaryBump`, and is ignored otherwise.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
enum HslabStatus hslab_quotient(const struct HslabParams *params,
                                enum HslabTestFunction function,
                                double arg,
                                struct HslabQuotient *out);

/**
 * The transported Sobolev constant `c(m)` for `m > N > p`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HslabStatus hslab_c_of_m(double m, uint32_t n, double p, double *out);

/**
 * Static description of a status code.
 */
const char *hslab_status_name(enum HslabStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSLAB_H */
