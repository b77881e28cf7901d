// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/qvdp.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "qvdp/classical.hpp"
#include "qvdp/effective.hpp"
#include "qvdp/error.hpp"
#include "qvdp/lindblad.hpp"
#include "qvdp/observables.hpp"
#include "qvdp/spectrum.hpp"

#ifndef QVDP_VERSION_STRING
#define QVDP_VERSION_STRING "0.0.0"
#endif

struct qvdp_liouvillian {
  qvdp::Liouvillian impl;
};

struct qvdp_state {
  qvdp::DensityMatrix impl;
};

namespace {

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

qvdp_status fail(qvdp_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs body, translating library exceptions into status codes.
template <class Body>
qvdp_status guarded(Body&& body) {
  try {
    body();
    return QVDP_OK;
  } catch (const qvdp::InvalidArgument& e) {
    return fail(QVDP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const qvdp::ResourceError& e) {
    return fail(QVDP_ERR_RESOURCE, e.what());
  } catch (const qvdp::SolverError& e) {
    return fail(QVDP_ERR_SOLVER, e.what());
  } catch (const qvdp::InstabilityError& e) {
    return fail(QVDP_ERR_INSTABILITY, e.what());
  } catch (const qvdp::DomainError& e) {
    return fail(QVDP_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QVDP_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(QVDP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QVDP_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* msg) {
  if (!ok) throw qvdp::InvalidArgument(msg);
}

qvdp::Complex to_cxx(qvdp_complex z) { return {z.re, z.im}; }
qvdp_complex to_c(qvdp::Complex z) { return {z.real(), z.imag()}; }

qvdp::SystemParams to_params(const qvdp_params* p) {
  require(p != nullptr, "params: null pointer");
  qvdp::SystemParams out;
  out.gamma1 = p->gamma1;
  out.gamma2 = p->gamma2;
  out.drive = p->drive;
  out.detuning = p->detuning;
  out.validate();
  return out;
}

qvdp::FockSpace to_space(const qvdp_space* s) {
  require(s != nullptr, "space: null pointer");
  return s->displaced ? qvdp::FockSpace::displaced(s->n_max, to_cxx(s->center))
                      : qvdp::FockSpace::lab(s->n_max);
}

qvdp::UniformGrid to_grid(const qvdp_grid* g, const char* name) {
  require(g != nullptr, "grid: null pointer");
  qvdp::UniformGrid out{g->min, g->max, g->points};
  out.validate(name);
  return out;
}

qvdp::ResourceLimits to_limits(size_t max_bytes) {
  qvdp::ResourceLimits lim;
  if (max_bytes > 0) lim.max_bytes = max_bytes;
  return lim;
}

qvdp_state* wrap(qvdp::DensityMatrix rho) {
  return new qvdp_state{std::move(rho)};
}

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

}  // namespace

extern "C" {

const char* qvdp_version(void) { return QVDP_VERSION_STRING; }

const char* qvdp_last_error(void) { return g_last_error.c_str(); }

qvdp_status qvdp_liouvillian_create(const qvdp_params* params,
                                    const qvdp_space* space, size_t max_bytes,
                                    qvdp_liouvillian** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = new qvdp_liouvillian{
        qvdp::build_liouvillian(to_params(params), to_space(space), to_limits(max_bytes))};
  });
}

qvdp_status qvdp_liouvillian_create_linearized(const qvdp_params* params,
                                               qvdp_complex beta, int n_max,
                                               size_t max_bytes,
                                               qvdp_liouvillian** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = new qvdp_liouvillian{qvdp::build_linearized_liouvillian(
        to_params(params), to_cxx(beta), n_max, to_limits(max_bytes))};
  });
}

void qvdp_liouvillian_free(qvdp_liouvillian* l) { delete l; }

qvdp_status qvdp_liouvillian_dim(const qvdp_liouvillian* l, int* dim) {
  return guarded([&] {
    require(l && dim, "liouvillian: null pointer");
    *dim = l->impl.dim();
  });
}

qvdp_status qvdp_liouvillian_trace_residual(const qvdp_liouvillian* l,
                                            double* out) {
  return guarded([&] {
    require(l && out, "liouvillian: null pointer");
    *out = l->impl.trace_preservation_residual();
  });
}

qvdp_status qvdp_steady_state(const qvdp_liouvillian* l, qvdp_state** out,
                              qvdp_steady_report* report) {
  return guarded([&] {
    require(l && out, "liouvillian: null pointer");
    qvdp::SteadyStateReport rep;
    auto rho = qvdp::steady_state(l->impl, &rep);
    if (report) {
      report->residual = rep.residual;
      report->tolerance = rep.tolerance;
      report->gap_estimate = rep.gap_estimate;
      report->refinement_steps = rep.refinement_steps;
    }
    *out = wrap(std::move(rho));
  });
}

qvdp_status qvdp_steady_state_eigen(const qvdp_liouvillian* l, qvdp_state** out,
                                    int* null_space_dim) {
  return guarded([&] {
    require(l && out, "liouvillian: null pointer");
    *out = wrap(qvdp::steady_state_eigen(l->impl, null_space_dim));
  });
}

qvdp_status qvdp_state_vacuum(const qvdp_space* space, qvdp_state** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = wrap(qvdp::vacuum_state(to_space(space)));
  });
}

qvdp_status qvdp_state_fock(const qvdp_space* space, int n, qvdp_state** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = wrap(qvdp::fock_state(to_space(space), n));
  });
}

qvdp_status qvdp_state_coherent(const qvdp_space* space, qvdp_complex amplitude,
                                qvdp_state** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = wrap(qvdp::coherent_state(to_space(space), to_cxx(amplitude)));
  });
}

qvdp_status qvdp_state_cat(const qvdp_space* space, qvdp_complex center,
                           qvdp_complex offset, qvdp_state** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = wrap(qvdp::cat_state(to_space(space), to_cxx(center), to_cxx(offset)));
  });
}

qvdp_status qvdp_state_from_matrix(const qvdp_space* space, const double* rho,
                                   qvdp_state** out) {
  return guarded([&] {
    require(rho && out, "rho: null pointer");
    const qvdp::FockSpace fs = to_space(space);
    const int n = fs.dim();
    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t k = 2 * (static_cast<std::size_t>(j) * n + i);
        m(i, j) = {rho[k], rho[k + 1]};
      }
    }
    *out = wrap(qvdp::DensityMatrix(fs, m));
  });
}

void qvdp_state_free(qvdp_state* s) { delete s; }

qvdp_status qvdp_state_dim(const qvdp_state* s, int* dim) {
  return guarded([&] {
    require(s && dim, "state: null pointer");
    *dim = s->impl.dim();
  });
}

qvdp_status qvdp_state_matrix(const qvdp_state* s, double* out) {
  return guarded([&] {
    require(s && out, "state: null pointer");
    const auto& m = s->impl.matrix();
    const auto n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t k = 2 * static_cast<std::size_t>(j * n + i);
        out[k] = m(i, j).real();
        out[k + 1] = m(i, j).imag();
      }
    }
  });
}

qvdp_status qvdp_state_moments(const qvdp_state* s, qvdp_moments* out) {
  return guarded([&] {
    require(s && out, "state: null pointer");
    const qvdp::Moments m = qvdp::moments(s->impl);
    const Eigen::Matrix2d c = qvdp::covariance_from_state(s->impl);
    out->mean = to_c(m.mean);
    out->number = m.number;
    out->second = to_c(m.second);
    out->covariance[0] = c(0, 0);
    out->covariance[1] = c(0, 1);
    out->covariance[2] = c(1, 0);
    out->covariance[3] = c(1, 1);
    out->trace = s->impl.trace().real();
    out->purity = s->impl.purity();
  });
}

qvdp_status qvdp_truncation_check(const qvdp_state* s, double threshold,
                                  double* top_population, int* flagged) {
  return guarded([&] {
    require(s != nullptr, "state: null pointer");
    const auto rep = qvdp::truncation_check(s->impl, threshold);
    if (top_population) *top_population = rep.top_population;
    if (flagged) *flagged = rep.flagged ? 1 : 0;
  });
}

qvdp_status qvdp_suggested_lab_truncation(const qvdp_space* space,
                                          int* n_max_lab) {
  return guarded([&] {
    require(n_max_lab != nullptr, "n_max_lab: null pointer");
    *n_max_lab = qvdp::suggested_lab_truncation(to_space(space));
  });
}

qvdp_status qvdp_evolve(const qvdp_liouvillian* l, const qvdp_state* rho0,
                        const double* times, size_t n_times,
                        const qvdp_evolve_options* options, qvdp_state** out) {
  return guarded([&] {
    require(l && rho0 && out, "evolve: null pointer");
    require(times != nullptr || n_times == 0, "times: null pointer");
    qvdp::EvolveOptions opt;
    if (options) {
      if (options->rtol > 0) opt.rtol = options->rtol;
      if (options->atol > 0) opt.atol = options->atol;
      opt.validate_snapshots = options->skip_validation == 0;
    }
    auto snaps = qvdp::evolve(l->impl, rho0->impl,
                              std::span<const double>(times, n_times), opt);
    std::vector<std::unique_ptr<qvdp_state>> held;
    held.reserve(snaps.size());
    for (auto& s : snaps) held.emplace_back(wrap(std::move(s)));
    for (std::size_t k = 0; k < held.size(); ++k) out[k] = held[k].release();
  });
}

qvdp_status qvdp_wigner(const qvdp_state* s, const qvdp_grid* x,
                        const qvdp_grid* p, double* values) {
  return guarded([&] {
    require(s && values, "wigner: null pointer");
    const auto w = qvdp::wigner(s->impl, to_grid(x, "x_grid"), to_grid(p, "p_grid"));
    for (int ip = 0; ip < w.p.points; ++ip) {
      for (int ix = 0; ix < w.x.points; ++ix) {
        values[static_cast<std::size_t>(ip) * w.x.points + ix] = w.values(ip, ix);
      }
    }
  });
}

qvdp_status qvdp_wigner_default_axis(const qvdp_state* s, qvdp_grid* axis) {
  return guarded([&] {
    require(s && axis, "wigner: null pointer");
    const auto g = qvdp::default_wigner_axis(s->impl);
    *axis = {g.min, g.max, g.points};
  });
}

qvdp_status qvdp_negativity_volume(const double* values, const qvdp_grid* x,
                                   const qvdp_grid* p, double* out) {
  return guarded([&] {
    require(values && out, "negativity: null pointer");
    qvdp::WignerGrid w{to_grid(x, "x_grid"), to_grid(p, "p_grid"), {}};
    w.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(values, w.p.points, w.x.points);
    *out = qvdp::negativity_volume(w);
  });
}

qvdp_status qvdp_phase_distribution(const qvdp_state* s, int n_phi,
                                    double* values, qvdp_phase_summary* summary) {
  return guarded([&] {
    require(s && values, "phase distribution: null pointer");
    const auto pd = qvdp::phase_distribution(s->impl, n_phi);
    std::copy(pd.values.begin(), pd.values.end(), values);
    if (summary) {
      summary->integral = pd.integral();
      summary->peak_position = pd.peak_position();
      summary->peak_height = pd.peak_height();
      summary->peak_width = pd.peak_width();
      summary->peak_count = pd.count_peaks();
    }
  });
}

qvdp_status qvdp_phase_deviation(const qvdp_state* const* snapshots, size_t n,
                                 double phi_ss, double r_ss, double* delta_phi,
                                 double* r_perp_mean, double* r_perp_variance) {
  return guarded([&] {
    require(snapshots != nullptr || n == 0, "snapshots: null pointer");
    std::vector<qvdp::DensityMatrix> snaps;
    snaps.reserve(n);
    for (size_t k = 0; k < n; ++k) {
      require(snapshots[k] != nullptr, "snapshots: null entry");
      snaps.push_back(snapshots[k]->impl);
    }
    const auto dev = qvdp::phase_deviation_series(snaps, qvdp::QuadratureFrame{phi_ss}, r_ss);
    for (size_t k = 0; k < n; ++k) {
      if (delta_phi) delta_phi[k] = dev.delta_phi[k];
      if (r_perp_mean) r_perp_mean[k] = dev.r_perp_mean[k];
      if (r_perp_variance) r_perp_variance[k] = dev.r_perp_variance[k];
    }
  });
}

qvdp_status qvdp_spectrum(const qvdp_liouvillian* l, const qvdp_state* rho_ss,
                          const double* omega, size_t n, int workers,
                          double* values, double* coherent_weight,
                          size_t* failed) {
  return guarded([&] {
    require(l && rho_ss && values, "spectrum: null pointer");
    require(omega != nullptr || n == 0, "omega: null pointer");
    qvdp::SpectrumOptions opt;
    opt.workers = workers;
    const auto tr = qvdp::spectrum_full(l->impl, rho_ss->impl,
                                        std::span<const double>(omega, n), opt);
    std::copy(tr.values.begin(), tr.values.end(), values);
    if (coherent_weight) *coherent_weight = tr.coherent_weight;
    if (failed) *failed = tr.failed.size();
  });
}

qvdp_status qvdp_correlation(const qvdp_liouvillian* l, const qvdp_state* rho_ss,
                             const double* times, size_t n, int subtract_mean,
                             double* out) {
  return guarded([&] {
    require(l && rho_ss && out, "correlation: null pointer");
    require(times != nullptr || n == 0, "times: null pointer");
    const auto c = qvdp::correlation_function(l->impl, rho_ss->impl,
                                              std::span<const double>(times, n),
                                              subtract_mean != 0);
    for (size_t k = 0; k < n; ++k) {
      out[2 * k] = c[k].real();
      out[2 * k + 1] = c[k].imag();
    }
  });
}

qvdp_status qvdp_find_peaks(const double* x, const double* y, size_t n,
                            double rel_prominence, double* peaks,
                            size_t capacity, size_t* count) {
  return guarded([&] {
    require((x && y) || n == 0, "find_peaks: null pointer");
    require(count != nullptr, "count: null pointer");
    const auto pk = qvdp::find_peaks(std::span<const double>(x, n),
                                     std::span<const double>(y, n), rel_prominence);
    *count = pk.size();
    for (size_t k = 0; k < pk.size() && k < capacity && peaks; ++k) peaks[k] = pk[k];
  });
}

qvdp_status qvdp_fixed_points(const qvdp_params* params, qvdp_fixed_point out[3],
                              size_t* count, double* lc_radius) {
  return guarded([&] {
    require(out && count, "fixed_points: null pointer");
    const auto set = qvdp::classical_fixed_points(to_params(params));
    *count = std::min<size_t>(set.points.size(), 3);
    for (size_t k = 0; k < *count; ++k) {
      const auto& f = set.points[k];
      out[k] = {to_c(f.beta), to_c(f.lambda1), to_c(f.lambda2), f.stable ? 1 : 0, f.residual};
    }
    if (lc_radius) *lc_radius = opt_or_nan(set.limit_cycle_radius);
  });
}

const char* qvdp_regime_name(qvdp_regime r) {
  switch (r) {
    case QVDP_REGIME_NO_STABLE_FIXED_POINT: return "no-stable-fixed-point";
    case QVDP_REGIME_OVERDAMPED: return "overdamped";
    case QVDP_REGIME_UNDERDAMPED: return "underdamped";
    case QVDP_REGIME_QUANTUM_COHERENT: return "quantum-coherent";
  }
  return "unknown";
}

qvdp_status qvdp_effective_summary_compute(const qvdp_params* params,
                                           qvdp_effective_summary* out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    const auto s = qvdp::classify_regime(to_params(params));
    qvdp_effective_summary r;
    r.regime = static_cast<qvdp_regime>(static_cast<int>(s.regime));
    r.fixed_point_count = static_cast<int>(s.fixed_points.points.size());
    const qvdp_complex nan_c{kNaN, kNaN};
    r.beta = r.lambda1 = r.lambda2 = nan_c;
    r.radius = r.phase = r.A = r.theta = r.chi = r.omega_eff = kNaN;
    r.gamma_up = r.gamma_down = r.gamma = r.gamma_deph = kNaN;
    r.n_eff = r.n_bar = r.quality = kNaN;
    for (double& v : r.sigma) v = kNaN;
    r.sigma_eigenvalues[0] = r.sigma_eigenvalues[1] = kNaN;
    r.sigma_asymmetry = r.sigma_principal_angle = kNaN;
    r.below_shot_noise = 0;
    r.phase_gamma = r.phase_omega_sq = kNaN;
    if (s.stable) {
      r.beta = to_c(s.stable->beta);
      r.radius = s.stable->radius();
      r.phase = s.stable->phase();
      r.lambda1 = to_c(s.stable->lambda1);
      r.lambda2 = to_c(s.stable->lambda2);
    }
    if (s.rates) {
      const auto& b = *s.rates;
      r.A = b.A;
      r.theta = b.theta;
      r.chi = opt_or_nan(b.chi);
      r.omega_eff = opt_or_nan(b.omega_eff);
      r.gamma_up = opt_or_nan(b.gamma_up);
      r.gamma_down = opt_or_nan(b.gamma_down);
      r.gamma = b.gamma;
      r.gamma_deph = opt_or_nan(b.gamma_deph);
      r.n_eff = opt_or_nan(b.n_eff);
      r.n_bar = b.n_bar;
      r.quality = opt_or_nan(b.quality);
    }
    if (s.covariance) {
      const auto& c = *s.covariance;
      r.sigma[0] = c.sigma(0, 0);
      r.sigma[1] = c.sigma(0, 1);
      r.sigma[2] = c.sigma(1, 0);
      r.sigma[3] = c.sigma(1, 1);
      r.sigma_eigenvalues[0] = c.eigenvalues(0);
      r.sigma_eigenvalues[1] = c.eigenvalues(1);
      r.sigma_asymmetry = c.asymmetry;
      r.sigma_principal_angle = c.principal_angle;
      r.below_shot_noise = c.below_shot_noise ? 1 : 0;
    }
    if (s.phase) {
      r.phase_gamma = s.phase->gamma;
      r.phase_omega_sq = s.phase->omega_sq;
    }
    *out = r;
  });
}

qvdp_status qvdp_effective_spectrum(const qvdp_params* params, qvdp_complex beta,
                                    const double* omega, size_t n, double* values) {
  return guarded([&] {
    require(values && (omega || n == 0), "effective spectrum: null pointer");
    const auto tr = qvdp::effective_spectrum(to_params(params), to_cxx(beta),
                                             std::span<const double>(omega, n));
    std::copy(tr.values.begin(), tr.values.end(), values);
  });
}

qvdp_status qvdp_boundary(const qvdp_params* params, qvdp_boundary_kind kind,
                          double delta, double* f2) {
  return guarded([&] {
    require(f2 != nullptr, "f2: null pointer");
    const auto p = to_params(params);
    switch (kind) {
      case QVDP_BOUNDARY_SADDLE_NODE_OUTER:
        *f2 = qvdp::boundary_saddle_node(p, delta).f2_outer;
        break;
      case QVDP_BOUNDARY_SADDLE_NODE_INNER:
        *f2 = qvdp::boundary_saddle_node(p, delta).f2_inner;
        break;
      case QVDP_BOUNDARY_BELYAKOV_DEVANEY:
        *f2 = qvdp::boundary_belyakov_devaney(p, delta);
        break;
      case QVDP_BOUNDARY_HOPF:
        *f2 = qvdp::boundary_hopf(p, delta);
        break;
      default:
        throw qvdp::InvalidArgument("kind: unknown boundary");
    }
  });
}

qvdp_status qvdp_classical_integrate(const qvdp_params* params, qvdp_complex beta0,
                                     const double* times, size_t n,
                                     double* beta_out) {
  return guarded([&] {
    require(beta_out && (times || n == 0), "classical: null pointer");
    const auto tr = qvdp::integrate_classical(to_params(params), to_cxx(beta0),
                                              std::span<const double>(times, n));
    for (size_t k = 0; k < n; ++k) {
      beta_out[2 * k] = tr.beta[k].real();
      beta_out[2 * k + 1] = tr.beta[k].imag();
    }
  });
}

const char* qvdp_cell_label_name(qvdp_cell_label label) {
  switch (label) {
    case QVDP_CELL_SYNC_OVERDAMPED: return "sync-overdamped";
    case QVDP_CELL_SYNC_UNDERDAMPED: return "sync-underdamped";
    case QVDP_CELL_LIMIT_CYCLE: return "limit-cycle";
    case QVDP_CELL_PHASE_SELF_OSCILLATION: return "phase-self-oscillation";
    case QVDP_CELL_UNRESOLVED: return "unresolved";
  }
  return "unknown";
}

qvdp_status qvdp_scan_phase_diagram(const qvdp_params* params,
                                    const double* drives, size_t n_drive,
                                    const double* detunings, size_t n_detuning,
                                    const qvdp_attractor_options* options,
                                    qvdp_diagram_cell* out) {
  return guarded([&] {
    require(out && (drives || n_drive == 0) && (detunings || n_detuning == 0),
            "scan: null pointer");
    qvdp::AttractorOptions opt;
    if (options) {
      if (options->transient > 0) opt.transient = options->transient;
      if (options->window > 0) opt.window = options->window;
      if (options->budget > 0) opt.budget = options->budget;
      opt.workers = options->workers;
    }
    const auto cells = qvdp::scan_phase_diagram(
        to_params(params), std::span<const double>(drives, n_drive),
        std::span<const double>(detunings, n_detuning), opt);
    for (size_t k = 0; k < cells.size(); ++k) {
      const auto& c = cells[k];
      out[k] = {c.drive, c.detuning, static_cast<qvdp_cell_label>(static_cast<int>(c.label)),
                c.winding, c.period, c.fixed_points};
    }
  });
}

}  // extern "C"
