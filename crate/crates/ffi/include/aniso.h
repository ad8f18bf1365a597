/* C interface for the aniso lattice-walk library. */

#ifndef ANISO_H
#define ANISO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AnisoStatus {
  ANISO_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ANISO_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  ANISO_STATUS_UTF8 = 2,
  /**
   * A numeric or structural argument was out of contract.
   */
  ANISO_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The environment violates the probability bounds or is degenerate.
   */
  ANISO_STATUS_INVALID_ENVIRONMENT = 4,
  /**
   * A value fell outside the supported range.
   */
  ANISO_STATUS_OUT_OF_RANGE = 5,
  /**
   * A JSON spec failed to parse.
   */
  ANISO_STATUS_JSON = 6,
  /**
   * An unexpected internal failure.
   */
  ANISO_STATUS_INTERNAL = 7,
} AnisoStatus;

/**
 * Opaque handle to a tabulated closed-form law.
 */
typedef struct AnisoDensity AnisoDensity;

/**
 * Opaque handle to a validated level-probability environment.
 */
typedef struct AnisoEnv AnisoEnv;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * A static, NUL-terminated description of a status code.
 */
const char *aniso_status_message(enum AnisoStatus status);

/**
 * The library version as a static NUL-terminated string.
 */
const char *aniso_version(void);

/**
 * Builds an environment from a spec string: a preset name (`comb`,
 * `hphc`, `uniform(p)` with `p` a decimal or fraction) or a JSON object
 * such as `{"kind": "table", "default": 0.5, "levels": {"0": 0.25}}`.
 * On success writes a handle that must be released with
 * [`aniso_env_free`].
 *
 * # Safety
 * `spec` must point to a valid NUL-terminated string and `out` must be
 * valid for writing one pointer; neither may alias freed memory for the
 * duration of the call.
 */
enum AnisoStatus aniso_env_new(const char *spec, struct AnisoEnv **out);

/**
 * Releases an environment handle. A null handle is a no-op.
 *
 * # Safety
 * `env` must be null or a pointer returned by [`aniso_env_new`] that has
 * not been freed yet.
 */
void aniso_env_free(struct AnisoEnv *env);

/**
 * Writes the vertical-step probability `p(level)` to `out`.
 *
 * # Safety
 * `env` must be a live handle from [`aniso_env_new`]; `out` must be
 * valid for writing one `double`.
 */
enum AnisoStatus aniso_env_prob(const struct AnisoEnv *env, int64_t level, double *out);

/**
 * Estimates the Cesaro constants over `window` levels per half-plane
 * (at least 16) and writes `gamma1 >= gamma2` plus the fitted rate
 * exponent `tau`. Any out-parameter may be null to skip it.
 *
 * # Safety
 * `env` must be a live handle; each non-null out-parameter must be
 * valid for writing one `double`.
 */
enum AnisoStatus aniso_env_cesaro(const struct AnisoEnv *env,
                                  uint64_t window,
                                  double *gamma1,
                                  double *gamma2,
                                  double *tau);

/**
 * Simulates `n` steps of the walk from the origin with the Markov
 * kernel and writes the endpoint. Identical (env, n, seed) triples give
 * identical endpoints.
 *
 * # Safety
 * `env` must be a live handle; `c1` and `c2` must each be valid for
 * writing one `int64_t`.
 */
enum AnisoStatus aniso_walk_endpoint(const struct AnisoEnv *env,
                                     uint64_t n,
                                     uint64_t seed,
                                     int64_t *c1,
                                     int64_t *c2);

/**
 * Simulates `n` steps with the geometric-block construction and writes
 * the step bookkeeping: horizontal count `h`, vertical count `v`
 * (`h + v = n`) and the untruncated horizontal total `h_star >= h`.
 * Any out-parameter may be null to skip it.
 *
 * # Safety
 * `env` must be a live handle; each non-null out-parameter must be
 * valid for writing one `uint64_t`.
 */
enum AnisoStatus aniso_walk_block_counts(const struct AnisoEnv *env,
                                         uint64_t n,
                                         uint64_t seed,
                                         uint64_t *h,
                                         uint64_t *v,
                                         uint64_t *h_star);

/**
 * Tabulates the law of the inverse time change at `t` (or of its
 * complement when `complement` is true) for constants
 * `gamma1 >= gamma2 >= 1` on `intervals` quadrature cells (pass 0 for
 * the default resolution). Equal constants yield a point-mass table.
 * The handle must be released with [`aniso_density_free`].
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum AnisoStatus aniso_density_new(double t,
                                   double gamma1,
                                   double gamma2,
                                   bool complement,
                                   size_t intervals,
                                   struct AnisoDensity **out);

/**
 * Releases a density handle. A null handle is a no-op.
 *
 * # Safety
 * `density` must be null or a pointer returned by [`aniso_density_new`]
 * that has not been freed yet.
 */
void aniso_density_free(struct AnisoDensity *density);

/**
 * Writes the open support interval of the tabulated law. A point mass
 * reports `lo == hi`.
 *
 * # Safety
 * `density` must be a live handle; `lo` and `hi` must each be valid for
 * writing one `double`.
 */
enum AnisoStatus aniso_density_support(const struct AnisoDensity *density, double *lo, double *hi);

/**
 * Writes the density value at `v`; zero outside the support. The
 * density diverges at the support endpoints and at the location of a
 * point mass, which reports `ANISO_STATUS_OUT_OF_RANGE`.
 *
 * # Safety
 * `density` must be a live handle; `out` must be valid for writing one
 * `double`.
 */
enum AnisoStatus aniso_density_pdf(const struct AnisoDensity *density, double v, double *out);

/**
 * Writes the cumulative probability at `v` (0 below the support, 1
 * above it; a point mass is a unit step).
 *
 * # Safety
 * `density` must be a live handle; `out` must be valid for writing one
 * `double`.
 */
enum AnisoStatus aniso_density_cdf(const struct AnisoDensity *density, double v, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANISO_H */
