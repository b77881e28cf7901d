/* Copyright 2026 The qvdp Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the qvdp library: driven quantum Van der Pol oscillator.
 *
 * Conventions
 *   - Every function returns a qvdp_status. On failure the message is
 *     available from qvdp_last_error() on the calling thread until the next
 *     failing call on that thread. Messages start with the offending
 *     parameter name.
 *   - Objects are opaque handles released with the matching _free function.
 *     Free functions accept NULL.
 *   - Complex matrices are column-major with interleaved (re, im) doubles.
 *   - Caller owns all output buffers; sizes are stated per function.
 */

#ifndef QVDP_QVDP_H_
#define QVDP_QVDP_H_

#include <stddef.h>

#if defined(__GNUC__)
#define QVDP_API __attribute__((visibility("default")))
#else
#define QVDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qvdp_status {
  QVDP_OK = 0,
  QVDP_ERR_INVALID_ARGUMENT = 1,
  QVDP_ERR_RESOURCE = 2,
  QVDP_ERR_SOLVER = 3,
  QVDP_ERR_INSTABILITY = 4,
  QVDP_ERR_DOMAIN = 5,
  QVDP_ERR_INTERNAL = 6
} qvdp_status;

typedef struct qvdp_liouvillian qvdp_liouvillian;
typedef struct qvdp_state qvdp_state;

typedef struct qvdp_complex {
  double re;
  double im;
} qvdp_complex;

typedef struct qvdp_params {
  double gamma1;
  double gamma2;
  double drive;    /* F */
  double detuning; /* Delta */
} qvdp_params;

typedef struct qvdp_space {
  int n_max;
  int displaced; /* nonzero for a frame displaced by center */
  qvdp_complex center;
} qvdp_space;

typedef struct qvdp_grid {
  double min;
  double max;
  int points;
} qvdp_grid;

QVDP_API const char* qvdp_version(void);
QVDP_API const char* qvdp_last_error(void);

/* ---- Liouvillians ---------------------------------------------------- */

/* max_bytes = 0 selects the default memory budget (3 GiB). */
QVDP_API qvdp_status qvdp_liouvillian_create(const qvdp_params* params,
                                             const qvdp_space* space,
                                             size_t max_bytes,
                                             qvdp_liouvillian** out);

/* Quadratic fluctuation model around beta (lab-frame fluctuation space). */
QVDP_API qvdp_status qvdp_liouvillian_create_linearized(
    const qvdp_params* params, qvdp_complex beta, int n_max, size_t max_bytes,
    qvdp_liouvillian** out);

QVDP_API void qvdp_liouvillian_free(qvdp_liouvillian* l);

QVDP_API qvdp_status qvdp_liouvillian_dim(const qvdp_liouvillian* l, int* dim);

/* |vec(I)^T L|_inf / |L|_1 */
QVDP_API qvdp_status qvdp_liouvillian_trace_residual(const qvdp_liouvillian* l,
                                                     double* out);

/* ---- States ---------------------------------------------------------- */

typedef struct qvdp_steady_report {
  double residual;
  double tolerance;
  double gap_estimate;
  int refinement_steps;
} qvdp_steady_report;

/* report may be NULL. */
QVDP_API qvdp_status qvdp_steady_state(const qvdp_liouvillian* l,
                                       qvdp_state** out,
                                       qvdp_steady_report* report);

/* Dense eigen cross-check; null_space_dim may be NULL. */
QVDP_API qvdp_status qvdp_steady_state_eigen(const qvdp_liouvillian* l,
                                             qvdp_state** out,
                                             int* null_space_dim);

QVDP_API qvdp_status qvdp_state_vacuum(const qvdp_space* space,
                                       qvdp_state** out);
QVDP_API qvdp_status qvdp_state_fock(const qvdp_space* space, int n,
                                     qvdp_state** out);
/* Amplitudes are lab-frame values. */
QVDP_API qvdp_status qvdp_state_coherent(const qvdp_space* space,
                                         qvdp_complex amplitude,
                                         qvdp_state** out);
QVDP_API qvdp_status qvdp_state_cat(const qvdp_space* space,
                                    qvdp_complex center, qvdp_complex offset,
                                    qvdp_state** out);

/* Validated state from a column-major interleaved matrix of size 2*dim*dim. */
QVDP_API qvdp_status qvdp_state_from_matrix(const qvdp_space* space,
                                            const double* rho,
                                            qvdp_state** out);

QVDP_API void qvdp_state_free(qvdp_state* s);

QVDP_API qvdp_status qvdp_state_dim(const qvdp_state* s, int* dim);

/* Writes 2*dim*dim doubles. */
QVDP_API qvdp_status qvdp_state_matrix(const qvdp_state* s, double* out);

typedef struct qvdp_moments {
  qvdp_complex mean;   /* <b> */
  double number;       /* <b^dag b> */
  qvdp_complex second; /* <b^2> */
  double covariance[4]; /* row-major quadrature covariance about the mean */
  double trace;
  double purity;
} qvdp_moments;

QVDP_API qvdp_status qvdp_state_moments(const qvdp_state* s, qvdp_moments* out);

QVDP_API qvdp_status qvdp_truncation_check(const qvdp_state* s,
                                           double threshold,
                                           double* top_population,
                                           int* flagged);

/* Lab truncation large enough to hold a displaced-frame state. */
QVDP_API qvdp_status qvdp_suggested_lab_truncation(const qvdp_space* space,
                                                   int* n_max_lab);

/* ---- Time evolution -------------------------------------------------- */

typedef struct qvdp_evolve_options {
  double rtol;   /* 0 selects 1e-9 */
  double atol;   /* 0 selects 1e-12 */
  int skip_validation; /* nonzero skips the per-snapshot invariant checks */
} qvdp_evolve_options;

/* out must hold n_times handles; on failure none are allocated. options may
 * be NULL. */
QVDP_API qvdp_status qvdp_evolve(const qvdp_liouvillian* l,
                                 const qvdp_state* rho0, const double* times,
                                 size_t n_times,
                                 const qvdp_evolve_options* options,
                                 qvdp_state** out);

/* ---- Observables ----------------------------------------------------- */

/* values has p->points * x->points entries, values[ip * x->points + ix]. */
QVDP_API qvdp_status qvdp_wigner(const qvdp_state* s, const qvdp_grid* x,
                                 const qvdp_grid* p, double* values);

QVDP_API qvdp_status qvdp_wigner_default_axis(const qvdp_state* s,
                                              qvdp_grid* axis);

QVDP_API qvdp_status qvdp_negativity_volume(const double* values,
                                            const qvdp_grid* x,
                                            const qvdp_grid* p, double* out);

typedef struct qvdp_phase_summary {
  double integral;
  double peak_position;
  double peak_height;
  double peak_width;
  int peak_count;
} qvdp_phase_summary;

/* values has n_phi entries on phi_k = 2 pi k / n_phi; summary may be NULL. */
QVDP_API qvdp_status qvdp_phase_distribution(const qvdp_state* s, int n_phi,
                                             double* values,
                                             qvdp_phase_summary* summary);

/* Per snapshot: -<r_perp>/r_ss, <r_perp>, Var(r_perp). */
QVDP_API qvdp_status qvdp_phase_deviation(const qvdp_state* const* snapshots,
                                          size_t n, double phi_ss, double r_ss,
                                          double* delta_phi,
                                          double* r_perp_mean,
                                          double* r_perp_variance);

/* ---- Spectra --------------------------------------------------------- */

/* Incoherent emission spectrum. failed receives the number of frequencies
 * whose solve failed (their values are NaN). workers = 0 picks the hardware
 * concurrency. */
QVDP_API qvdp_status qvdp_spectrum(const qvdp_liouvillian* l,
                                   const qvdp_state* rho_ss,
                                   const double* omega, size_t n, int workers,
                                   double* values, double* coherent_weight,
                                   size_t* failed);

/* <b^dag(t) b(0)>, 2*n doubles. */
QVDP_API qvdp_status qvdp_correlation(const qvdp_liouvillian* l,
                                      const qvdp_state* rho_ss,
                                      const double* times, size_t n,
                                      int subtract_mean, double* out);

/* Local maxima positions; count receives the total even when it exceeds
 * capacity. */
QVDP_API qvdp_status qvdp_find_peaks(const double* x, const double* y,
                                     size_t n, double rel_prominence,
                                     double* peaks, size_t capacity,
                                     size_t* count);

/* ---- Effective model ------------------------------------------------- */

typedef struct qvdp_fixed_point {
  qvdp_complex beta;
  qvdp_complex lambda1;
  qvdp_complex lambda2;
  int stable;
  double residual;
} qvdp_fixed_point;

/* out holds up to 3 points; lc_radius (may be NULL) is NaN unless F = 0. */
QVDP_API qvdp_status qvdp_fixed_points(const qvdp_params* params,
                                       qvdp_fixed_point out[3], size_t* count,
                                       double* lc_radius);

typedef enum qvdp_regime {
  QVDP_REGIME_NO_STABLE_FIXED_POINT = 0,
  QVDP_REGIME_OVERDAMPED = 1,
  QVDP_REGIME_UNDERDAMPED = 2,
  QVDP_REGIME_QUANTUM_COHERENT = 3
} qvdp_regime;

QVDP_API const char* qvdp_regime_name(qvdp_regime r);

/* Fields that do not apply are NaN. */
typedef struct qvdp_effective_summary {
  qvdp_regime regime;
  int fixed_point_count;
  qvdp_complex beta;
  double radius;
  double phase;
  qvdp_complex lambda1;
  qvdp_complex lambda2;
  double A;
  double theta;
  double chi;
  double omega_eff;
  double gamma_up;
  double gamma_down;
  double gamma;
  double gamma_deph;
  double n_eff;
  double n_bar;
  double quality;
  double sigma[4];
  double sigma_eigenvalues[2];
  double sigma_asymmetry;
  double sigma_principal_angle;
  int below_shot_noise;
  double phase_gamma;
  double phase_omega_sq;
} qvdp_effective_summary;

QVDP_API qvdp_status qvdp_effective_summary_compute(
    const qvdp_params* params, qvdp_effective_summary* out);

QVDP_API qvdp_status qvdp_effective_spectrum(const qvdp_params* params,
                                             qvdp_complex beta,
                                             const double* omega, size_t n,
                                             double* values);

/* ---- Classical dynamics ---------------------------------------------- */

typedef enum qvdp_boundary_kind {
  QVDP_BOUNDARY_SADDLE_NODE_OUTER = 0,
  QVDP_BOUNDARY_SADDLE_NODE_INNER = 1,
  QVDP_BOUNDARY_BELYAKOV_DEVANEY = 2,
  QVDP_BOUNDARY_HOPF = 3
} qvdp_boundary_kind;

/* F^2 on the requested boundary at detuning delta. */
QVDP_API qvdp_status qvdp_boundary(const qvdp_params* params,
                                   qvdp_boundary_kind kind, double delta,
                                   double* f2);

/* beta_out receives 2*n doubles. */
QVDP_API qvdp_status qvdp_classical_integrate(const qvdp_params* params,
                                              qvdp_complex beta0,
                                              const double* times, size_t n,
                                              double* beta_out);

typedef enum qvdp_cell_label {
  QVDP_CELL_SYNC_OVERDAMPED = 0,
  QVDP_CELL_SYNC_UNDERDAMPED = 1,
  QVDP_CELL_LIMIT_CYCLE = 2,
  QVDP_CELL_PHASE_SELF_OSCILLATION = 3,
  QVDP_CELL_UNRESOLVED = 4
} qvdp_cell_label;

QVDP_API const char* qvdp_cell_label_name(qvdp_cell_label label);

typedef struct qvdp_diagram_cell {
  double drive;
  double detuning;
  qvdp_cell_label label;
  int winding;
  double period;
  int fixed_points;
} qvdp_diagram_cell;

typedef struct qvdp_attractor_options {
  double transient; /* 0 selects 50 / gamma1 */
  double window;    /* 0 selects 50 / gamma1 */
  double budget;    /* 0 selects 1000 / gamma1 */
  int workers;      /* 0 picks the hardware concurrency */
} qvdp_attractor_options;

/* out holds n_drive * n_detuning cells, F outer. options may be NULL. */
QVDP_API qvdp_status qvdp_scan_phase_diagram(
    const qvdp_params* params, const double* drives, size_t n_drive,
    const double* detunings, size_t n_detuning,
    const qvdp_attractor_options* options, qvdp_diagram_cell* out);

#ifdef __cplusplus
}
#endif

#endif /* QVDP_QVDP_H_ */
