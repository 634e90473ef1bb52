/* C interface to the fractal-fft transform library. */

#ifndef FRACTAL_FFT_H
#define FRACTAL_FFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum FractalFftStatus {
  FractalFftStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  FractalFftStatus_NullArgument = 1,
  /**
   * An argument was malformed (bad UTF-8, wrong buffer length, bad enum).
   */
  FractalFftStatus_InvalidArgument = 2,
  /**
   * The configuration failed validation.
   */
  FractalFftStatus_ValidationFailed = 3,
  /**
   * A configured size cap was exceeded.
   */
  FractalFftStatus_ResourceExceeded = 4,
  /**
   * A matrix was singular or an inverse failed its residual check.
   */
  FractalFftStatus_NumericalFailure = 5,
  /**
   * A panic was caught at the FFI boundary.
   */
  FractalFftStatus_Panicked = 6,
} FractalFftStatus;

/**
 * Composition ordering selector.
 */
typedef enum FractalFftOrdering {
  FractalFftOrdering_Obverse = 0,
  FractalFftOrdering_Reverse = 1,
} FractalFftOrdering;

/**
 * Opaque handle to a transform plan.
 */
typedef struct FractalFftPlan FractalFftPlan;

/**
 * Opaque handle to a validated system.
 */
typedef struct FractalFftSystem FractalFftSystem;

/**
 * Complex multiplication/addition tally of one apply.
 */
typedef struct FractalFftOpCounts {
  uint64_t multiplications;
  uint64_t additions;
} FractalFftOpCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fractal_fft_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *fractal_fft_version(void);

/**
 * Parses and validates a JSON system configuration. On success writes a
 * system handle to `out`; free it with [`fractal_fft_system_free`].
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum FractalFftStatus fractal_fft_system_from_json(const char *json, struct FractalFftSystem **out);

/**
 * Releases a system handle. Null is a no-op.
 *
 * # Safety
 * `system` must have been returned by [`fractal_fft_system_from_json`] and
 * not freed before.
 */
void fractal_fft_system_free(struct FractalFftSystem *system);

/**
 * Spatial dimension `d`; 0 when `system` is null.
 *
 * # Safety
 * `system` must be a live handle or null.
 */
size_t fractal_fft_system_dim(const struct FractalFftSystem *system);

/**
 * Branch count `K`; 0 when `system` is null.
 *
 * # Safety
 * `system` must be a live handle or null.
 */
size_t fractal_fft_system_branch_count(const struct FractalFftSystem *system);

/**
 * Builds a transform plan for `K^level` samples under the given ordering.
 * Free the handle with [`fractal_fft_plan_free`].
 *
 * # Safety
 * `system` must be a live handle and `out` a valid pointer.
 */
enum FractalFftStatus fractal_fft_plan_build(const struct FractalFftSystem *system,
                                             uint32_t level,
                                             enum FractalFftOrdering ordering,
                                             struct FractalFftPlan **out);

/**
 * Releases a plan handle. Null is a no-op.
 *
 * # Safety
 * `plan` must have been returned by [`fractal_fft_plan_build`] and not
 * freed before.
 */
void fractal_fft_plan_free(struct FractalFftPlan *plan);

/**
 * Number of complex samples (`K^N`) the plan applies to; 0 on null.
 *
 * # Safety
 * `plan` must be a live handle or null.
 */
size_t fractal_fft_plan_length(const struct FractalFftPlan *plan);

/**
 * Applies the forward transform. `input` and `output` are interleaved
 * buffers of `2·len` doubles; `counts` may be null.
 *
 * # Safety
 * `plan` must be live; `input`/`output` must point to at least `2·len`
 * readable/writable doubles and must not overlap.
 */
enum FractalFftStatus fractal_fft_plan_forward(const struct FractalFftPlan *plan,
                                               const double *input,
                                               double *output,
                                               size_t len,
                                               struct FractalFftOpCounts *counts);

/**
 * Applies the inverse transform; arguments as in
 * [`fractal_fft_plan_forward`].
 *
 * # Safety
 * Same requirements as [`fractal_fft_plan_forward`].
 */
enum FractalFftStatus fractal_fft_plan_inverse(const struct FractalFftPlan *plan,
                                               const double *input,
                                               double *output,
                                               size_t len,
                                               struct FractalFftOpCounts *counts);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACTAL_FFT_H */
