#ifndef DEGBEAM_H
#define DEGBEAM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum db_status {
  DB_STATUS_OK = 0,
  DB_STATUS_NULL_POINTER = 1,
  DB_STATUS_INVALID_ARGUMENT = 2,
  DB_STATUS_DOMAIN = 3,
  DB_STATUS_CLASSIFICATION = 4,
  DB_STATUS_NUMERICAL = 5,
  DB_STATUS_IO = 6,
  DB_STATUS_PANIC = 7,
} db_status;

/**
 * Opaque coefficient handle.
 */
typedef struct db_coefficient db_coefficient;

/**
 * Opaque discretization handle.
 */
typedef struct db_discretization db_discretization;

/**
 * Opaque energy trace handle.
 */
typedef struct db_trace db_trace;

/**
 * Stability constants, field for field.
 */
typedef struct db_constants {
  double k;
  double c_hp;
  double eps0;
  double a1;
  double beta;
  double gamma;
  double c_beta;
  double c_gamma;
  double theta;
  double rho;
  double nu;
  double delta;
  double c_delta;
  double c1;
  double c2;
  double c3;
  double m;
} db_constants;

/**
 * Outcome of [`db_verify_decay`].
 */
typedef struct db_decay {
  /**
   * 1 when `E(t) <= E(0) e^{1 - t/M}` at every sample.
   */
  int ok;
  double margin;
  /**
   * NaN when the trace is too short or flat to fit.
   */
  double fitted_rate;
  size_t fit_points;
} db_decay;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `cap - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t db_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *db_version(void);

/**
 * `a(x) = x^alpha (1 + c x)`; `c = 0` gives the pure power law.
 *
 * # Safety
 * `out_handle` must be null or valid for writes.
 */
enum db_status db_coefficient_new(double alpha, double c, struct db_coefficient **out_handle);

/**
 * # Safety
 * `h` must be null or a handle from [`db_coefficient_new`] not freed before.
 */
void db_coefficient_free(struct db_coefficient *h);

/**
 * `K = sup x|a'|/a`, `a(1)` and the class (0 = weakly, 1 = strongly degenerate).
 *
 * # Safety
 * `h` must be a live coefficient handle; out pointers must be valid or null
 * (null outputs are skipped).
 */
enum db_status db_coefficient_info(const struct db_coefficient *h,
                                   double *k,
                                   double *a1,
                                   int *class_);

/**
 * Hardy constant estimate on a `mesh_n` element grid.
 *
 * # Safety
 * `h` must be a live coefficient handle; `c_hp` valid for writes.
 */
enum db_status db_coefficient_hardy(const struct db_coefficient *h, size_t mesh_n, double *c_hp);

/**
 * # Safety
 * `coeff` must be a live coefficient handle; `out_handle` valid for writes.
 */
enum db_status db_discretization_new(const struct db_coefficient *coeff,
                                     size_t n_elements,
                                     double beta,
                                     double gamma,
                                     double grading,
                                     struct db_discretization **out_handle);

/**
 * # Safety
 * `h` must be null or a live discretization handle.
 */
void db_discretization_free(struct db_discretization *h);

/**
 * # Safety
 * `h` must be a live discretization handle; `n_dof` valid for writes.
 */
enum db_status db_discretization_n_dof(const struct db_discretization *h, size_t *n_dof);

/**
 * Solves the static problem with loads `lambda`, `mu` at `x = 1`. Returns
 * the cubic `p`, `q` of the exact solution and the discrete error in the
 * energy norm.
 *
 * # Safety
 * `h` must be a live discretization handle; out pointers valid for writes.
 */
enum db_status db_static_solve(const struct db_discretization *h,
                               double lambda,
                               double mu,
                               double *p,
                               double *q,
                               double *error);

/**
 * Stability constants for the given data with the scanned `delta`. Pass a
 * NaN `eps0` for the default `2 - K`.
 *
 * # Safety
 * `out_constants` must be valid for writes.
 */
enum db_status db_stability_constants(double k,
                                      double a1,
                                      double c_hp,
                                      double beta,
                                      double gamma,
                                      double eps0,
                                      struct db_constants *out_constants);

/**
 * Simulates from the named initial shapes (`zero`, `x2`, `x3`,
 * `x2_one_minus_x2`, `sin_bump_x2`) with boundary feedback on.
 *
 * # Safety
 * `h` must be a live discretization handle, the strings NUL terminated and
 * `out_handle` valid for writes.
 */
enum db_status db_simulate(const struct db_discretization *h,
                           const char *y0_choice,
                           double y0_amplitude,
                           const char *y1_choice,
                           double y1_amplitude,
                           double dt,
                           double t_end,
                           struct db_trace **out_handle);

/**
 * # Safety
 * `h` must be null or a live trace handle.
 */
void db_trace_free(struct db_trace *h);

/**
 * Number of samples in the trace.
 *
 * # Safety
 * `h` must be a live trace handle; `len` valid for writes.
 */
enum db_status db_trace_len(const struct db_trace *h, size_t *len);

/**
 * Copies times and energies into caller buffers of `cap` doubles each.
 * Fails with `DB_STATUS_INVALID_ARGUMENT` when `cap` is too small.
 *
 * # Safety
 * `times` and `energy` must point to `cap` writable doubles.
 */
enum db_status db_trace_copy(const struct db_trace *h, double *times, double *energy, size_t cap);

/**
 * Largest per-step defect of the discrete energy balance relative to `E(0)`.
 *
 * # Safety
 * `h` must be a live trace handle; `residual` valid for writes.
 */
enum db_status db_trace_energy_residual(const struct db_trace *h, double *residual);

/**
 * Attaches the bound `E(0) e^{1 - t/M}` and checks the trace against it.
 *
 * # Safety
 * `h` must be a live trace handle; `constants` readable; `report` writable.
 */
enum db_status db_verify_decay(struct db_trace *h,
                               const struct db_constants *constants,
                               struct db_decay *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEGBEAM_H */
