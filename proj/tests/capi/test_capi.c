/* Copyright 2026 The qvdp Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qvdp/qvdp.h"

static int failures = 0;
static int checks = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    ++checks;                                                         \
    if (!(cond)) {                                                    \
      ++failures;                                                     \
      fprintf(stderr, "%s:%d: CHECK(%s) failed (last error: %s)\n", \
              __FILE__, __LINE__, #cond, qvdp_last_error());          \
    }                                                                 \
  } while (0)

#define CHECK_OK(call) CHECK((call) == QVDP_OK)

static qvdp_params params(double g2, double f, double d) {
  qvdp_params p;
  p.gamma1 = 1.0;
  p.gamma2 = g2;
  p.drive = f;
  p.detuning = d;
  return p;
}

static qvdp_space lab(int n) {
  qvdp_space s;
  s.n_max = n;
  s.displaced = 0;
  s.center.re = 0.0;
  s.center.im = 0.0;
  return s;
}

static void test_errors(void) {
  qvdp_params bad = params(0.0, 1.0, 0.0);
  qvdp_space s = lab(10);
  qvdp_liouvillian* l = NULL;
  CHECK(qvdp_liouvillian_create(&bad, &s, 0, &l) == QVDP_ERR_INVALID_ARGUMENT);
  CHECK(l == NULL);
  CHECK(strstr(qvdp_last_error(), "gamma2") != NULL);

  qvdp_params p = params(0.1, 1.0, 0.0);
  qvdp_space big = lab(80);
  CHECK(qvdp_liouvillian_create(&p, &big, 1u << 20, &l) == QVDP_ERR_RESOURCE);
  CHECK(strstr(qvdp_last_error(), "n_max") != NULL);

  qvdp_space small = lab(5);
  qvdp_state* st = NULL;
  qvdp_complex far = {4.0, 0.0};
  CHECK(qvdp_state_coherent(&small, far, &st) == QVDP_ERR_DOMAIN);
  CHECK(st == NULL);

  CHECK(qvdp_liouvillian_create(NULL, &s, 0, &l) == QVDP_ERR_INVALID_ARGUMENT);
  CHECK(qvdp_liouvillian_create(&p, &s, 0, NULL) == QVDP_ERR_INVALID_ARGUMENT);

  double f2 = 0.0;
  CHECK(qvdp_boundary(&p, QVDP_BOUNDARY_HOPF, 0.1, &f2) == QVDP_ERR_DOMAIN);

  /* Freeing NULL is a no-op. */
  qvdp_liouvillian_free(NULL);
  qvdp_state_free(NULL);
}

static void test_steady_and_observables(void) {
  qvdp_params p = params(0.2, 1.2, 0.4);
  qvdp_space s = lab(26);
  qvdp_liouvillian* l = NULL;
  CHECK_OK(qvdp_liouvillian_create(&p, &s, 0, &l));
  int dim = 0;
  CHECK_OK(qvdp_liouvillian_dim(l, &dim));
  CHECK(dim == 27);
  double tr_res = 1.0;
  CHECK_OK(qvdp_liouvillian_trace_residual(l, &tr_res));
  CHECK(tr_res < 1e-13);

  qvdp_state* rho = NULL;
  qvdp_state* rho_e = NULL;
  qvdp_steady_report rep;
  int nulls = 0;
  CHECK_OK(qvdp_steady_state(l, &rho, &rep));
  CHECK_OK(qvdp_steady_state_eigen(l, &rho_e, &nulls));
  CHECK(nulls == 1);
  CHECK(rep.residual <= rep.tolerance);

  double* a = malloc(sizeof(double) * 2 * 27 * 27);
  double* b = malloc(sizeof(double) * 2 * 27 * 27);
  CHECK_OK(qvdp_state_matrix(rho, a));
  CHECK_OK(qvdp_state_matrix(rho_e, b));
  double diff = 0.0;
  for (int k = 0; k < 2 * 27 * 27; ++k) diff = fmax(diff, fabs(a[k] - b[k]));
  CHECK(diff < 1e-9);

  /* Round trip through the matrix constructor. */
  qvdp_state* copy = NULL;
  CHECK_OK(qvdp_state_from_matrix(&s, a, &copy));
  qvdp_moments m1, m2;
  CHECK_OK(qvdp_state_moments(rho, &m1));
  CHECK_OK(qvdp_state_moments(copy, &m2));
  CHECK(fabs(m1.number - m2.number) < 1e-14);
  CHECK(fabs(m1.trace - 1.0) < 1e-12);
  CHECK(m1.purity > 0.0 && m1.purity <= 1.0 + 1e-12);

  double top = 1.0;
  int flagged = 1;
  CHECK_OK(qvdp_truncation_check(rho, 1e-6, &top, &flagged));
  CHECK(!flagged);

  /* Evolution from the steady state. */
  double times[3] = {0.0, 1.0, 5.0};
  qvdp_state* snaps[3] = {NULL, NULL, NULL};
  CHECK_OK(qvdp_evolve(l, rho, times, 3, NULL, snaps));
  for (int k = 0; k < 3; ++k) {
    qvdp_moments m;
    CHECK_OK(qvdp_state_moments(snaps[k], &m));
    CHECK(fabs(m.number - m1.number) < 1e-8);
  }
  double dphi[3], rmean[3], rvar[3];
  const qvdp_state* cs[3] = {snaps[0], snaps[1], snaps[2]};
  double r_ss = hypot(m1.mean.re, m1.mean.im);
  CHECK_OK(qvdp_phase_deviation(cs, 3, atan2(m1.mean.im, m1.mean.re), r_ss, dphi, rmean, rvar));
  CHECK(fabs(dphi[2]) < 1e-8);
  CHECK(rvar[0] > 0.0);
  for (int k = 0; k < 3; ++k) qvdp_state_free(snaps[k]);

  /* Wigner function. */
  qvdp_grid axis;
  CHECK_OK(qvdp_wigner_default_axis(rho, &axis));
  CHECK(axis.points == 201);
  double* w = malloc(sizeof(double) * (size_t)axis.points * (size_t)axis.points);
  CHECK_OK(qvdp_wigner(rho, &axis, &axis, w));
  double step = (axis.max - axis.min) / (axis.points - 1);
  double sum = 0.0;
  for (int k = 0; k < axis.points * axis.points; ++k) sum += w[k];
  CHECK(fabs(sum * step * step - 1.0) < 1e-6);
  double nv = -1.0;
  CHECK_OK(qvdp_negativity_volume(w, &axis, &axis, &nv));
  CHECK(nv >= 0.0);
  free(w);

  double pd[64];
  qvdp_phase_summary ps;
  CHECK_OK(qvdp_phase_distribution(rho, 64, pd, &ps));
  CHECK(fabs(ps.integral - 1.0) < 1e-10);
  CHECK(ps.peak_count >= 1);

  /* Spectrum and correlation. */
  double omega[5] = {-1.0, -0.2, 0.0, 0.4, 1.0};
  double sv[5];
  double coh = -1.0;
  size_t failed = 99;
  CHECK_OK(qvdp_spectrum(l, rho, omega, 5, 1, sv, &coh, &failed));
  CHECK(failed == 0);
  CHECK(fabs(coh - (m1.mean.re * m1.mean.re + m1.mean.im * m1.mean.im)) < 1e-12);
  for (int k = 0; k < 5; ++k) CHECK(isfinite(sv[k]) && sv[k] > 0.0);
  double t0 = 0.0;
  double corr[2];
  CHECK_OK(qvdp_correlation(l, rho, &t0, 1, 0, corr));
  CHECK(fabs(corr[0] - m1.number) < 1e-12);

  free(a);
  free(b);
  qvdp_state_free(copy);
  qvdp_state_free(rho);
  qvdp_state_free(rho_e);
  qvdp_liouvillian_free(l);
}

static void test_states(void) {
  qvdp_space s = lab(30);
  qvdp_state* st = NULL;
  qvdp_moments m;
  CHECK_OK(qvdp_state_fock(&s, 3, &st));
  CHECK_OK(qvdp_state_moments(st, &m));
  CHECK(fabs(m.number - 3.0) < 1e-12);
  qvdp_state_free(st);

  qvdp_complex zero = {0.0, 0.0}, off = {2.0, 0.0};
  CHECK_OK(qvdp_state_cat(&s, zero, off, &st));
  qvdp_grid g = {-5.0, 5.0, 101};
  double* w = malloc(sizeof(double) * 101 * 101);
  CHECK_OK(qvdp_wigner(st, &g, &g, w));
  double nv = 0.0;
  CHECK_OK(qvdp_negativity_volume(w, &g, &g, &nv));
  CHECK(nv > 0.1);
  free(w);
  qvdp_state_free(st);

  qvdp_space d = s;
  d.displaced = 1;
  d.center.re = 3.0;
  int n_lab = 0;
  CHECK_OK(qvdp_suggested_lab_truncation(&d, &n_lab));
  CHECK(n_lab > 30);
  CHECK(qvdp_state_fock(&d, 0, &st) == QVDP_ERR_INVALID_ARGUMENT);
}

static void test_effective_and_classical(void) {
  qvdp_params p = params(0.1, 10.0, 0.0);
  qvdp_fixed_point fps[3];
  size_t n = 0;
  double lc = 0.0;
  CHECK_OK(qvdp_fixed_points(&p, fps, &n, &lc));
  CHECK(n == 1);
  CHECK(fabs(fps[0].beta.re + 5.0) < 1e-10);
  CHECK(isnan(lc));

  qvdp_effective_summary s;
  CHECK_OK(qvdp_effective_summary_compute(&p, &s));
  CHECK(s.regime == QVDP_REGIME_OVERDAMPED);
  CHECK(isnan(s.omega_eff));
  CHECK(strcmp(qvdp_regime_name(s.regime), "overdamped") == 0);

  p.detuning = 4.0;
  CHECK_OK(qvdp_effective_summary_compute(&p, &s));
  CHECK(s.regime == QVDP_REGIME_QUANTUM_COHERENT);
  CHECK(fabs(s.omega_eff - 3.951) < 1e-3);
  CHECK(fabs(s.quality - s.omega_eff / s.gamma_deph) < 1e-12);

  double omega[3] = {-s.omega_eff, 0.0, s.omega_eff};
  double sv[3];
  CHECK_OK(qvdp_effective_spectrum(&p, s.beta, omega, 3, sv));
  CHECK(sv[2] > sv[1]);

  double f2 = -1.0;
  CHECK_OK(qvdp_boundary(&p, QVDP_BOUNDARY_SADDLE_NODE_INNER, 0.0, &f2));
  CHECK(fabs(f2 - 0.185185) < 1e-5);

  qvdp_params free_osc = params(0.1, 0.0, 0.0);
  CHECK_OK(qvdp_fixed_points(&free_osc, fps, &n, &lc));
  CHECK(fabs(lc - sqrt(5.0)) < 1e-12);
  double times[2] = {0.0, 40.0};
  double beta[4];
  qvdp_complex b0 = {0.1, 0.0};
  CHECK_OK(qvdp_classical_integrate(&free_osc, b0, times, 2, beta));
  CHECK(fabs(hypot(beta[2], beta[3]) - sqrt(5.0)) < 1e-6);

  double drives[2] = {0.2, 10.0};
  double dets[2] = {1.0, 4.0};
  qvdp_diagram_cell cells[4];
  qvdp_attractor_options opt = {0.0, 0.0, 0.0, 1};
  CHECK_OK(qvdp_scan_phase_diagram(&free_osc, drives, 2, dets, 2, &opt, cells));
  CHECK(cells[0].label == QVDP_CELL_LIMIT_CYCLE);
  CHECK(cells[0].winding == 1);
  CHECK(cells[3].label == QVDP_CELL_SYNC_UNDERDAMPED);
  CHECK(strcmp(qvdp_cell_label_name(cells[0].label), "limit-cycle") == 0);

  double x[5] = {0, 1, 2, 3, 4}, y[5] = {0, 1, 0, 2, 0};
  double peaks[1];
  size_t count = 0;
  CHECK_OK(qvdp_find_peaks(x, y, 5, 0.01, peaks, 1, &count));
  CHECK(count == 2);
  CHECK(fabs(peaks[0] - 1.0) < 1e-12);
}

static void test_linearized(void) {
  qvdp_params p = params(0.1, 10.0, 4.0);
  qvdp_effective_summary s;
  CHECK_OK(qvdp_effective_summary_compute(&p, &s));
  qvdp_liouvillian* l = NULL;
  CHECK_OK(qvdp_liouvillian_create_linearized(&p, s.beta, 30, 0, &l));
  qvdp_state* rho = NULL;
  CHECK_OK(qvdp_steady_state(l, &rho, NULL));
  qvdp_moments m;
  CHECK_OK(qvdp_state_moments(rho, &m));
  for (int k = 0; k < 4; ++k) CHECK(fabs(m.covariance[k] - s.sigma[k]) < 1e-7);
  qvdp_state_free(rho);
  qvdp_liouvillian_free(l);
}

int main(void) {
  CHECK(strlen(qvdp_version()) > 0);
  test_errors();
  test_steady_and_observables();
  test_states();
  test_effective_and_classical();
  test_linearized();
  printf("%d checks, %d failures\n", checks, failures);
  return failures == 0 ? 0 : 1;
}
