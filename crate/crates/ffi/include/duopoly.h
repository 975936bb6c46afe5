#ifndef DUOPOLY_H
#define DUOPOLY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DuopolyClassification {
  DUOPOLY_CLASSIFICATION_STABLE_FOR_ALL_DELAYS = 0,
  DUOPOLY_CLASSIFICATION_STABLE_UNTIL_TAU0 = 1,
  DUOPOLY_CLASSIFICATION_UNSTABLE_AT_ZERO_DELAY = 2,
} DuopolyClassification;

typedef enum DuopolyStatus {
  DUOPOLY_STATUS_OK = 0,
  DUOPOLY_STATUS_NULL_POINTER = 1,
  DUOPOLY_STATUS_INVALID_PARAMETER = 2,
  DUOPOLY_STATUS_PRICE_SINGULARITY = 3,
  DUOPOLY_STATUS_INFEASIBLE = 4,
  /**
   * Integration, root-finding or degenerate-crossing failure.
   */
  DUOPOLY_STATUS_NUMERICAL = 5,
  DUOPOLY_STATUS_INDEX_OUT_OF_RANGE = 6,
  DUOPOLY_STATUS_PANIC = 7,
} DuopolyStatus;

/**
 * Economic parameters together with adjustment speeds.
 */
typedef struct DuopolyModel DuopolyModel;

typedef struct DuopolyTrajectory DuopolyTrajectory;

typedef struct DuopolyParams {
  double q;
  double s;
  double t1;
  double c1;
  double c2;
} DuopolyParams;

typedef struct DuopolySpeeds {
  double k1;
  double k2;
  double h1;
  double h2;
} DuopolySpeeds;

typedef struct DuopolyState {
  double x1;
  double x2;
  double z1;
  double z2;
} DuopolyState;

typedef struct DuopolyEquilibrium {
  struct DuopolyState state;
  double evaded;
  bool feasible;
  double profit1;
  double profit2;
} DuopolyEquilibrium;

/**
 * Undelayed characteristic quartic `l^4 + m43 l^3 + m42 l^2 + m41 l + m40`
 * and its Hurwitz determinants.
 */
typedef struct DuopolyStability {
  double m43;
  double m42;
  double m41;
  double m40;
  double d1;
  double d2;
  double d3;
  double d4;
  bool stable;
  double max_real_part;
} DuopolyStability;

/**
 * Delay-stability summary. `omega0`, `tau0`, `transversality` and
 * `crossing_residual` are NaN unless `has_crossing`.
 */
typedef struct DuopolyHopf {
  enum DuopolyClassification classification;
  bool has_crossing;
  double omega0;
  double tau0;
  double transversality;
  double crossing_residual;
} DuopolyHopf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of this library, statically allocated.
 */
const char *duopoly_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 * Returns 0 when there is no error. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t duopoly_last_error_message(char *buf, size_t len);

/**
 * Validates `params` and `speeds` and allocates a model handle in `*out`.
 *
 * # Safety
 * All pointers must be null or valid; `*out` is overwritten.
 */
enum DuopolyStatus duopoly_model_new(const struct DuopolyParams *params,
                                     const struct DuopolySpeeds *speeds,
                                     struct DuopolyModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`duopoly_model_new`] not yet freed.
 */
void duopoly_model_free(struct DuopolyModel *model);

/**
 * # Safety
 * `model` must be a live handle (or null); `out` must be null or writable.
 */
enum DuopolyStatus duopoly_model_equilibrium(const struct DuopolyModel *model,
                                             struct DuopolyEquilibrium *out);

/**
 * # Safety
 * `model` must be a live handle (or null); `out` must be null or writable.
 */
enum DuopolyStatus duopoly_model_stability(const struct DuopolyModel *model,
                                           struct DuopolyStability *out);

/**
 * # Safety
 * `model` must be a live handle (or null); `out` must be null or writable.
 */
enum DuopolyStatus duopoly_model_hopf(const struct DuopolyModel *model, struct DuopolyHopf *out);

/**
 * Integrates from `initial` (constant history for `x1` on `[-tau, 0]`).
 *
 * When integration stops early, `*out` still receives the partial
 * trajectory and the failure status is returned; free it either way.
 *
 * # Safety
 * `model` must be a live handle; `initial` readable; `out` writable.
 */
enum DuopolyStatus duopoly_model_simulate(const struct DuopolyModel *model,
                                          const struct DuopolyState *initial,
                                          double tau,
                                          double step,
                                          double t_end,
                                          struct DuopolyTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a handle from [`duopoly_model_simulate`] not yet freed.
 */
void duopoly_trajectory_free(struct DuopolyTrajectory *traj);

/**
 * Number of stored samples, 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t duopoly_trajectory_len(const struct DuopolyTrajectory *traj);

/**
 * Step actually used (the requested step snapped to divide the delay), NaN for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
double duopoly_trajectory_step(const struct DuopolyTrajectory *traj);

/**
 * Sample `index`: time into `*time`, state into `*state`.
 *
 * # Safety
 * `traj` must be a live handle; `time` and `state` null or writable.
 */
enum DuopolyStatus duopoly_trajectory_get(const struct DuopolyTrajectory *traj,
                                          size_t index,
                                          double *time,
                                          struct DuopolyState *state);

/**
 * Copies up to `capacity` samples into `times` and `states`; the number
 * copied goes to `*written`.
 *
 * # Safety
 * `times` and `states` must each hold `capacity` elements.
 */
enum DuopolyStatus duopoly_trajectory_copy(const struct DuopolyTrajectory *traj,
                                           double *times,
                                           struct DuopolyState *states,
                                           size_t capacity,
                                           size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUOPOLY_H */
