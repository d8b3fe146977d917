/* C interface to the bmcd spell-duration modelling library. */

#ifndef BMCD_H
#define BMCD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum BmcdStatus {
  BMCD_STATUS_OK = 0,
  BMCD_STATUS_NULL_POINTER = 1,
  BMCD_STATUS_INVALID_ARGUMENT = 2,
  BMCD_STATUS_INSUFFICIENT_DATA = 3,
  BMCD_STATUS_NON_CONVERGED = 4,
  BMCD_STATUS_SINGULAR = 5,
  BMCD_STATUS_UNDEFINED = 6,
  BMCD_STATUS_INTERNAL_ERROR = 7,
} BmcdStatus;

/**
 * Opaque handle: a fitted station-season model (dry hdeGPD + wet
 * geometric mixture) ready for simulation and risk evaluation.
 */
typedef struct BmcdModel BmcdModel;

/**
 * Hurdle discretised eGPD dry-spell parameters.
 */
typedef struct BmcdHdeGpd {
  double f1;
  double kappa;
  double sigma;
  double xi;
} BmcdHdeGpd;

/**
 * Two-component geometric mixture wet-spell parameters (p1 >= p2).
 */
typedef struct BmcdGeomMix {
  double pi;
  double p1;
  double p2;
} BmcdGeomMix;

/**
 * Certified interval for a risk metric.
 */
typedef struct BmcdRiskBound {
  double lower;
  double upper;
  double width;
  uint64_t u_used;
} BmcdRiskBound;

/**
 * Fit convergence record.
 */
typedef struct BmcdFitDiagnostics {
  /**
   * 1 when the fit converged, 0 otherwise.
   */
  uint8_t converged;
  uintptr_t iterations;
  /**
   * PWM squared residual or EM log-likelihood.
   */
  double objective;
  uintptr_t restart_index;
} BmcdFitDiagnostics;

/**
 * Chi-squared goodness-of-fit result.
 */
typedef struct BmcdGofResult {
  double statistic;
  uint32_t dof;
  double p_value;
  uint32_t d_max;
} BmcdGofResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a model handle from dry and wet parameters. On success writes an
 * owned pointer into `out`; release it with `bmcd_model_free`.
 *
 * # Safety
 * `dry`, `wet` and `out` must be valid pointers.
 */
enum BmcdStatus bmcd_model_new(const struct BmcdHdeGpd *dry,
                               const struct BmcdGeomMix *wet,
                               struct BmcdModel **out);

/**
 * Destroy a model handle. A null pointer is a no-op.
 *
 * # Safety
 * `model` must have come from `bmcd_model_new` and not be freed twice.
 */
void bmcd_model_free(struct BmcdModel *model);

/**
 * Simulate `n_steps` days of the chain into `out_states` (0 = dry,
 * 1 = wet), starting a fresh dry spell, reproducibly from `seed`.
 *
 * # Safety
 * `out_states` must point to at least `n_steps` writable bytes.
 */
enum BmcdStatus bmcd_model_simulate(const struct BmcdModel *model,
                                    uintptr_t n_steps,
                                    uint64_t seed,
                                    uint8_t *out_states);

/**
 * Mean residual dry-spell duration after `d` days as a certified bound of
 * width below `precision`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum BmcdStatus bmcd_model_mean_residual(const struct BmcdModel *model,
                                         uint32_t d,
                                         double precision,
                                         struct BmcdRiskBound *out);

/**
 * Long-run fraction of days spent in dry spells strictly older than `d`
 * days, as a certified bound.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum BmcdStatus bmcd_model_proportion_long_dry(const struct BmcdModel *model,
                                               uint32_t d,
                                               double precision,
                                               struct BmcdRiskBound *out);

/**
 * Fit the dry-spell law (empirical hurdle frequency + PWM tail) to
 * durations in days.
 *
 * # Safety
 * `durations` must point to `len` readable u32 values; `out_params` and
 * `out_diag` (nullable) must be valid if non-null.
 */
enum BmcdStatus bmcd_fit_hdegpd(const uint32_t *durations,
                                uintptr_t len,
                                struct BmcdHdeGpd *out_params,
                                struct BmcdFitDiagnostics *out_diag);

/**
 * Fit the wet-spell geometric mixture by EM with restarts.
 *
 * # Safety
 * Pointer arguments as in `bmcd_fit_hdegpd`.
 */
enum BmcdStatus bmcd_fit_geommix(const uint32_t *durations,
                                 uintptr_t len,
                                 uint64_t seed,
                                 struct BmcdGeomMix *out_params,
                                 struct BmcdFitDiagnostics *out_diag);

/**
 * Maximum-likelihood geometric fit: p = 1/mean.
 *
 * # Safety
 * `durations` must point to `len` readable values; `out_p` must be valid.
 */
enum BmcdStatus bmcd_fit_geometric(const uint32_t *durations, uintptr_t len, double *out_p);

/**
 * Chi-squared goodness-of-fit of dry durations against an hdeGPD law.
 * `d_max` = 0 selects the adaptive depth cut.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum BmcdStatus bmcd_gof_hdegpd(const uint32_t *durations,
                                uintptr_t len,
                                const struct BmcdHdeGpd *params,
                                uint32_t d_max,
                                uint64_t min_tail_count,
                                struct BmcdGofResult *out);

/**
 * Chi-squared goodness-of-fit of durations against a geometric law.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum BmcdStatus bmcd_gof_geometric(const uint32_t *durations,
                                   uintptr_t len,
                                   double p,
                                   uint32_t d_max,
                                   uint64_t min_tail_count,
                                   struct BmcdGofResult *out);

/**
 * Probability mass of the hdeGPD law at duration `d` (days >= 1);
 * NaN on invalid parameters.
 */
double bmcd_hdegpd_pmf(struct BmcdHdeGpd params, uint32_t d);

/**
 * Survival P(tau > d) of the hdeGPD law; NaN on invalid parameters.
 */
double bmcd_hdegpd_survival(struct BmcdHdeGpd params, uint32_t d);

/**
 * Probability mass of the geometric-mixture law at duration `d`.
 */
double bmcd_geommix_pmf(struct BmcdGeomMix params, uint32_t d);

/**
 * Survival P(tau > d) of the geometric-mixture law.
 */
double bmcd_geommix_survival(struct BmcdGeomMix params, uint32_t d);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMCD_H */
