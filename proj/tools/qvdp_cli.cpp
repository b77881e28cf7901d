// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

// qvdp-cli: configuration-driven front end to the qvdp C library.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "qvdp/qvdp.h"

namespace qvdp_cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kResource = 3,
  kSolver = 4,
  kIo = 5,
};

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check(qvdp_status st, const std::string& context = {}) {
  if (st == QVDP_OK) return;
  std::string msg = qvdp_last_error();
  if (!context.empty()) msg = context + ": " + msg;
  switch (st) {
    case QVDP_ERR_INVALID_ARGUMENT:
    case QVDP_ERR_DOMAIN:
      throw CliError(kConfig, msg);
    case QVDP_ERR_RESOURCE:
      throw CliError(kResource, msg);
    case QVDP_ERR_SOLVER:
    case QVDP_ERR_INSTABILITY:
      throw CliError(kSolver, msg);
    default:
      throw CliError(kUsage, msg);
  }
}

// Owning wrappers for the opaque handles.
struct LiouvillianDeleter {
  void operator()(qvdp_liouvillian* l) const { qvdp_liouvillian_free(l); }
};
struct StateDeleter {
  void operator()(qvdp_state* s) const { qvdp_state_free(s); }
};
using LiouvillianPtr = std::unique_ptr<qvdp_liouvillian, LiouvillianDeleter>;
using StatePtr = std::unique_ptr<qvdp_state, StateDeleter>;

struct Run {
  std::string command;
  Config cfg;
  fs::path out;
  int workers = 0;
};

// ---------------------------------------------------------------------------
// Output

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const Run& run, const std::string& name, const std::vector<std::string>& columns)
      : path_(run.out / name), file_(path_) {
    if (!file_) throw CliError(kIo, "out: cannot write " + path_.string());
    file_ << "# qvdp " << qvdp_version() << "\n# command: " << run.command << "\n";
    for (const auto& [k, v] : run.cfg.resolved()) file_ << "# config: " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) file_ << (i ? "," : "") << columns[i];
    file_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) file_ << (i ? "," : "") << cells[i];
    file_ << "\n";
    if (!file_) throw CliError(kIo, "out: failed while writing " + path_.string());
  }

  void row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(csv_number(v));
    row(s);
  }

 private:
  fs::path path_;
  std::ofstream file_;
};

ordered_json number_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json complex_json(qvdp_complex z) {
  return ordered_json{{"re", number_json(z.re)}, {"im", number_json(z.im)}};
}

void write_json(const Run& run, const std::string& name, ordered_json result) {
  ordered_json doc;
  doc["qvdp_version"] = qvdp_version();
  doc["command"] = run.command;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : run.cfg.resolved()) cfg[k] = v;
  doc["config"] = cfg;
  doc["result"] = std::move(result);
  const fs::path path = run.out / name;
  std::ofstream f(path);
  if (!f) throw CliError(kIo, "out: cannot write " + path.string());
  f << doc.dump(2) << "\n";
  if (!f) throw CliError(kIo, "out: failed while writing " + path.string());
}

// ---------------------------------------------------------------------------
// Shared configuration pieces

qvdp_params read_params(Config& cfg, bool need_drive = true) {
  const double g1 = cfg.number("params.gamma1", 1.0);
  if (!(g1 > 0)) throw CliError(kConfig, "params.gamma1: must be > 0");
  qvdp_params p;
  p.gamma1 = 1.0;
  p.gamma2 = cfg.number("params.gamma2") / g1;
  p.drive = (need_drive ? cfg.number("params.F") : cfg.number("params.F", 0.0)) / g1;
  p.detuning = cfg.number("params.Delta", 0.0) / g1;
  if (!(p.gamma2 > 0)) throw CliError(kConfig, "params.gamma2: must be > 0");
  if (p.drive < 0) throw CliError(kConfig, "params.F: must be >= 0");
  return p;
}

qvdp_effective_summary summary_of(const qvdp_params& p) {
  qvdp_effective_summary s;
  check(qvdp_effective_summary_compute(&p, &s), "params");
  return s;
}

qvdp_complex parse_complex(Config& cfg, const std::string& key, const std::string& fallback) {
  const std::string s = cfg.text(key, fallback);
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (a.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(s);
    const double im = std::stod(b, &used);
    if (b.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::logic_error&) {
    throw CliError(kConfig, key + ": expected 're,im', got '" + s + "'");
  }
}

// Stable classical amplitude, or a config error naming the key that asked.
qvdp_complex auto_center(const qvdp_effective_summary& s, const std::string& key) {
  if (s.regime == QVDP_REGIME_NO_STABLE_FIXED_POINT) {
    throw CliError(kConfig, key + ": 'auto' needs a stable classical fixed point; give re,im");
  }
  return s.beta;
}

qvdp_complex read_amplitude(Config& cfg, const std::string& key, const qvdp_effective_summary& s,
                            const std::string& fallback = "auto") {
  if (cfg.text(key, fallback) == "auto") return auto_center(s, key);
  return parse_complex(cfg, key, fallback);
}

qvdp_space read_space(Config& cfg, const qvdp_effective_summary& s) {
  qvdp_space sp{};
  sp.n_max = cfg.integer("space.n_max");
  const std::string frame = cfg.text("space.frame", "lab");
  if (frame == "lab") {
    sp.displaced = 0;
    sp.center = {0.0, 0.0};
  } else if (frame == "displaced") {
    sp.displaced = 1;
    sp.center = read_amplitude(cfg, "space.center", s);
  } else {
    throw CliError(kConfig, "space.frame: expected 'lab' or 'displaced', got '" + frame + "'");
  }
  return sp;
}

LiouvillianPtr make_liouvillian(const qvdp_params& p, const qvdp_space& sp) {
  qvdp_liouvillian* l = nullptr;
  check(qvdp_liouvillian_create(&p, &sp, 0, &l), "space");
  return LiouvillianPtr(l);
}

StatePtr steady_of(const qvdp_liouvillian* l, qvdp_steady_report* rep = nullptr) {
  qvdp_state* s = nullptr;
  check(qvdp_steady_state(l, &s, rep), "steady state");
  return StatePtr(s);
}

// Builds the state selected by <section>.state (steady | vacuum | coherent | cat).
StatePtr read_state(Config& cfg, const std::string& section, const std::string& fallback,
                    const qvdp_space& sp, const qvdp_liouvillian* l,
                    const qvdp_effective_summary& s) {
  const std::string kind = cfg.text(section + ".state", fallback);
  qvdp_state* out = nullptr;
  if (kind == "steady") {
    return steady_of(l);
  } else if (kind == "vacuum") {
    check(qvdp_state_vacuum(&sp, &out), section + ".state");
  } else if (kind == "coherent") {
    const qvdp_complex a = read_amplitude(cfg, section + ".amplitude", s);
    check(qvdp_state_coherent(&sp, a, &out), section + ".amplitude");
  } else if (kind == "cat") {
    const qvdp_complex c = read_amplitude(cfg, section + ".amplitude", s);
    const qvdp_complex o = parse_complex(cfg, section + ".offset", "2,0");
    check(qvdp_state_cat(&sp, c, o, &out), section + ".offset");
  } else {
    throw CliError(kConfig, section + ".state: expected steady, vacuum, coherent or cat, got '" +
                                kind + "'");
  }
  return StatePtr(out);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return v;
}

std::vector<double> read_range(Config& cfg, const std::string& prefix, double lo_default,
                               double hi_default, int n_default, bool allow_log = false) {
  const double lo = cfg.number(prefix + "_min", lo_default);
  const double hi = cfg.number(prefix + "_max", hi_default);
  const int n = cfg.integer(prefix + "_points", n_default);
  if (n < 1) throw CliError(kConfig, prefix + "_points: must be >= 1");
  if (n > 1 && !(hi > lo)) throw CliError(kConfig, prefix + "_max: must exceed " + prefix + "_min");
  const std::string spacing = allow_log ? cfg.text(prefix + "_spacing", "linear") : "linear";
  if (spacing == "linear") return linspace(lo, hi, n);
  if (spacing != "log") throw CliError(kConfig, prefix + "_spacing: expected 'linear' or 'log'");
  if (!(lo > 0)) throw CliError(kConfig, prefix + "_min: log spacing needs a positive minimum");
  auto v = linspace(std::log(lo), std::log(hi), n);
  for (double& x : v) x = std::exp(x);
  return v;
}

ordered_json summary_json(const qvdp_effective_summary& s,
                          ordered_json j = ordered_json::object()) {
  j["regime"] = qvdp_regime_name(s.regime);
  j["fixed_point_count"] = s.fixed_point_count;
  j["beta_ss"] = complex_json(s.beta);
  j["R_ss"] = number_json(s.radius);
  j["phi_ss"] = number_json(s.phase);
  j["lambda1"] = complex_json(s.lambda1);
  j["lambda2"] = complex_json(s.lambda2);
  j["A"] = number_json(s.A);
  j["theta"] = number_json(s.theta);
  j["chi"] = number_json(s.chi);
  j["Omega_eff"] = number_json(s.omega_eff);
  j["Gamma_up"] = number_json(s.gamma_up);
  j["Gamma_down"] = number_json(s.gamma_down);
  j["Gamma"] = number_json(s.gamma);
  j["Gamma_deph"] = number_json(s.gamma_deph);
  j["n_eff"] = number_json(s.n_eff);
  j["n_bar"] = number_json(s.n_bar);
  j["quality"] = number_json(s.quality);
  j["sigma"] = {number_json(s.sigma[0]), number_json(s.sigma[1]), number_json(s.sigma[2]),
                number_json(s.sigma[3])};
  j["sigma_eigenvalues"] = {number_json(s.sigma_eigenvalues[0]), number_json(s.sigma_eigenvalues[1])};
  j["sigma_asymmetry"] = number_json(s.sigma_asymmetry);
  j["sigma_principal_angle"] = number_json(s.sigma_principal_angle);
  j["below_shot_noise"] = s.below_shot_noise != 0;
  j["phase_equation_Gamma"] = number_json(s.phase_gamma);
  j["phase_equation_Omega_sq"] = number_json(s.phase_omega_sq);
  return j;
}

ordered_json moments_json(const qvdp_state* st) {
  qvdp_moments m;
  check(qvdp_state_moments(st, &m));
  double top = 0.0;
  int flagged = 0;
  check(qvdp_truncation_check(st, 1e-6, &top, &flagged));
  ordered_json j;
  j["mean_b"] = complex_json(m.mean);
  j["number"] = m.number;
  j["second_moment"] = complex_json(m.second);
  j["covariance"] = {m.covariance[0], m.covariance[1], m.covariance[2], m.covariance[3]};
  j["trace"] = m.trace;
  j["purity"] = m.purity;
  j["truncation_top_population"] = top;
  j["truncation_flagged"] = flagged != 0;
  return j;
}

qvdp_phase_summary write_phase(const Run& run, const qvdp_state* st, int n_phi) {
  std::vector<double> values(static_cast<std::size_t>(std::max(n_phi, 0)));
  qvdp_phase_summary sum;
  check(qvdp_phase_distribution(st, n_phi, values.data(), &sum), "steady.n_phi");
  CsvWriter csv(run, "phase.csv", {"phi_rad", "P_per_rad"});
  for (int k = 0; k < n_phi; ++k) {
    csv.row(std::vector<double>{2.0 * std::numbers::pi * k / n_phi, values[static_cast<std::size_t>(k)]});
  }
  return sum;
}

ordered_json phase_json(const qvdp_phase_summary& s) {
  return ordered_json{{"integral", s.integral},
                      {"peak_position", s.peak_position},
                      {"peak_height", s.peak_height},
                      {"peak_width", s.peak_width},
                      {"peak_count", s.peak_count}};
}

ordered_json write_wigner(const Run& run, const qvdp_state* st, const qvdp_grid& x,
                          const qvdp_grid& p, const std::string& name) {
  std::vector<double> w(static_cast<std::size_t>(x.points) * p.points);
  check(qvdp_wigner(st, &x, &p, w.data()), "wigner");
  double neg = 0.0;
  check(qvdp_negativity_volume(w.data(), &x, &p, &neg));
  CsvWriter csv(run, name, {"x", "p", "W"});
  double integral = 0.0, wmin = std::numeric_limits<double>::infinity();
  const double dx = (x.max - x.min) / (x.points - 1), dp = (p.max - p.min) / (p.points - 1);
  for (int ip = 0; ip < p.points; ++ip) {
    for (int ix = 0; ix < x.points; ++ix) {
      const double v = w[static_cast<std::size_t>(ip) * x.points + ix];
      integral += v * dx * dp;
      wmin = std::min(wmin, v);
      csv.row(std::vector<double>{x.min + ix * dx, p.min + ip * dp, v});
    }
  }
  return ordered_json{{"integral", integral}, {"negativity_volume", neg}, {"min_W", wmin}};
}

qvdp_grid read_grid(Config& cfg, const std::string& prefix, const qvdp_grid& fallback) {
  qvdp_grid g;
  g.min = cfg.number(prefix + "_min", fallback.min);
  g.max = cfg.number(prefix + "_max", fallback.max);
  g.points = cfg.integer(prefix + "_points", fallback.points);
  if (g.points < 2 || !(g.max > g.min)) {
    throw CliError(kConfig, prefix + "_points: need >= 2 points and " + prefix + "_max > " + prefix + "_min");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_steady(Run& run) {
  Config& cfg = run.cfg;
  const qvdp_params p = read_params(cfg);
  const auto s = summary_of(p);
  const qvdp_space sp = read_space(cfg, s);
  const int n_phi = cfg.integer("steady.n_phi", 256);
  const bool with_wigner = cfg.boolean("steady.wigner", false);
  cfg.reject_unused();

  const auto l = make_liouvillian(p, sp);
  qvdp_steady_report rep;
  const auto rho = steady_of(l.get(), &rep);
  const auto phase = write_phase(run, rho.get(), n_phi);

  ordered_json r;
  r["solver"] = {{"residual", rep.residual},
                 {"tolerance", rep.tolerance},
                 {"gap_estimate", rep.gap_estimate},
                 {"refinement_steps", rep.refinement_steps}};
  r["state"] = moments_json(rho.get());
  r["phase_distribution"] = phase_json(phase);
  if (with_wigner) {
    qvdp_grid axis;
    check(qvdp_wigner_default_axis(rho.get(), &axis));
    r["wigner"] = write_wigner(run, rho.get(), axis, axis, "wigner.csv");
  }
  r["classical"] = summary_json(s);
  write_json(run, "steady.json", r);
}

void cmd_evolve(Run& run) {
  Config& cfg = run.cfg;
  const qvdp_params p = read_params(cfg);
  const auto s = summary_of(p);
  const qvdp_space sp = read_space(cfg, s);
  const double t_max = cfg.number("evolve.t_max");
  const int samples = cfg.integer("evolve.samples", 101);
  const double rtol = cfg.number("evolve.rtol", 1e-9);
  const bool negativity = cfg.boolean("evolve.negativity", false);
  const int w_points = cfg.integer("evolve.wigner_points", 101);
  if (!(t_max > 0)) throw CliError(kConfig, "evolve.t_max: must be > 0");
  if (samples < 2) throw CliError(kConfig, "evolve.samples: must be >= 2");
  if (negativity && w_points < 2) throw CliError(kConfig, "evolve.wigner_points: must be >= 2");

  const auto l = make_liouvillian(p, sp);
  const auto rho0 = read_state(cfg, "evolve", "vacuum", sp, l.get(), s);
  cfg.reject_unused();

  const auto times = linspace(0.0, t_max, samples);
  std::vector<qvdp_state*> raw(times.size(), nullptr);
  qvdp_evolve_options opt{rtol, 0.0, 0};
  check(qvdp_evolve(l.get(), rho0.get(), times.data(), times.size(), &opt, raw.data()), "evolve");
  std::vector<StatePtr> snaps;
  for (auto* h : raw) snaps.emplace_back(h);

  const bool with_phase = s.regime != QVDP_REGIME_NO_STABLE_FIXED_POINT;
  std::vector<double> dphi(times.size(), kNaN), rmean(times.size(), kNaN), rvar(times.size(), kNaN);
  if (with_phase) {
    check(qvdp_phase_deviation(raw.data(), raw.size(), s.phase, s.radius, dphi.data(),
                               rmean.data(), rvar.data()));
  }
  qvdp_grid axis{};
  if (negativity) {
    check(qvdp_wigner_default_axis(rho0.get(), &axis));
    axis.points = w_points;
  }

  std::vector<std::string> cols{"t", "trace", "re_b", "im_b", "number", "purity", "top_population",
                                "delta_phi", "r_perp_mean", "r_perp_variance"};
  if (negativity) cols.push_back("negativity_volume");
  CsvWriter csv(run, "evolve.csv", cols);
  double max_drift = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    qvdp_moments m;
    check(qvdp_state_moments(raw[k], &m));
    double top = 0.0;
    check(qvdp_truncation_check(raw[k], 1e-6, &top, nullptr));
    max_drift = std::max(max_drift, std::abs(m.trace - 1.0));
    std::vector<double> row{times[k], m.trace, m.mean.re, m.mean.im, m.number, m.purity, top,
                            dphi[k], rmean[k], rvar[k]};
    if (negativity) {
      std::vector<double> w(static_cast<std::size_t>(axis.points) * axis.points);
      check(qvdp_wigner(raw[k], &axis, &axis, w.data()));
      double neg = 0.0;
      check(qvdp_negativity_volume(w.data(), &axis, &axis, &neg));
      row.push_back(neg);
    }
    csv.row(row);
  }
  ordered_json r;
  r["snapshots"] = times.size();
  r["max_trace_drift"] = max_drift;
  r["final_state"] = moments_json(raw.back());
  r["classical"] = summary_json(s);
  write_json(run, "evolve.json", r);
}

void cmd_spectrum(Run& run) {
  Config& cfg = run.cfg;
  const qvdp_params p = read_params(cfg);
  const auto s = summary_of(p);
  const qvdp_space sp = read_space(cfg, s);
  double scale = std::max({1.0, std::abs(p.detuning)});
  if (std::isfinite(s.omega_eff)) scale = std::max(scale, s.omega_eff);
  if (std::isfinite(s.gamma_deph)) scale = std::max(scale, s.gamma_deph);
  const auto omega = read_range(cfg, "spectrum.omega", -4.0 * scale, 4.0 * scale, 2048);
  const double prominence = cfg.number("spectrum.rel_prominence", 0.01);
  const bool with_effective = cfg.boolean("spectrum.effective", false);
  cfg.reject_unused();

  const auto l = make_liouvillian(p, sp);
  const auto rho = steady_of(l.get());
  std::vector<double> values(omega.size());
  double coherent = 0.0;
  size_t failed = 0;
  check(qvdp_spectrum(l.get(), rho.get(), omega.data(), omega.size(), run.workers, values.data(),
                      &coherent, &failed), "spectrum");
  std::vector<double> eff(omega.size(), kNaN);
  if (with_effective) {
    if (s.regime == QVDP_REGIME_NO_STABLE_FIXED_POINT) {
      throw CliError(kConfig, "spectrum.effective: needs a stable classical fixed point");
    }
    check(qvdp_effective_spectrum(&p, s.beta, omega.data(), omega.size(), eff.data()),
          "spectrum.effective");
  }

  std::vector<std::string> cols{"omega_over_gamma1", "S"};
  if (with_effective) cols.push_back("S_eff");
  CsvWriter csv(run, "spectrum.csv", cols);
  double integral = 0.0;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    std::vector<double> row{omega[k], values[k]};
    if (with_effective) row.push_back(eff[k]);
    csv.row(row);
    if (k > 0) integral += 0.5 * (values[k] + values[k - 1]) * (omega[k] - omega[k - 1]);
  }
  size_t count = 0;
  check(qvdp_find_peaks(omega.data(), values.data(), omega.size(), prominence, nullptr, 0, &count));
  std::vector<double> peaks(count);
  check(qvdp_find_peaks(omega.data(), values.data(), omega.size(), prominence, peaks.data(),
                        peaks.size(), &count));
  qvdp_moments m;
  check(qvdp_state_moments(rho.get(), &m));

  ordered_json r;
  r["coherent_weight"] = coherent;
  r["sum_rule"] = integral / (2.0 * std::numbers::pi) + coherent;
  r["number"] = m.number;
  r["failed_frequencies"] = failed;
  r["peaks"] = peaks;
  r["classical"] = summary_json(s);
  write_json(run, "spectrum.json", r);
}

void cmd_wigner(Run& run) {
  Config& cfg = run.cfg;
  const qvdp_params p = read_params(cfg);
  const auto s = summary_of(p);
  const qvdp_space sp = read_space(cfg, s);
  const auto l = make_liouvillian(p, sp);
  const auto rho = read_state(cfg, "wigner", "steady", sp, l.get(), s);
  qvdp_grid axis;
  check(qvdp_wigner_default_axis(rho.get(), &axis));
  const qvdp_grid x = read_grid(cfg, "wigner.x", axis);
  const qvdp_grid pg = read_grid(cfg, "wigner.p", axis);
  cfg.reject_unused();

  ordered_json r = write_wigner(run, rho.get(), x, pg, "wigner.csv");
  r["state"] = moments_json(rho.get());
  write_json(run, "wigner.json", r);
}

void cmd_effective(Run& run) {
  Config& cfg = run.cfg;
  qvdp_params p = read_params(cfg);
  const bool sweep = cfg.has("effective.Delta_points");
  std::vector<double> deltas{p.detuning};
  if (sweep) deltas = read_range(cfg, "effective.Delta", p.detuning, p.detuning, 1);
  const int omega_points = cfg.integer("effective.omega_points", 0);
  if (omega_points < 0 || omega_points == 1) {
    throw CliError(kConfig, "effective.omega_points: must be 0 or >= 2");
  }
  cfg.reject_unused();

  ordered_json points = ordered_json::array();
  std::unique_ptr<CsvWriter> csv;
  if (sweep) {
    csv = std::make_unique<CsvWriter>(
        run, "effective.csv",
        std::vector<std::string>{"Delta", "regime", "re_beta", "im_beta", "Omega_eff", "Gamma",
                                 "Gamma_up", "Gamma_down", "Gamma_deph", "n_eff", "n_bar",
                                 "quality", "sigma_min", "sigma_max"});
  }
  for (double d : deltas) {
    p.detuning = d;
    const auto s = summary_of(p);
    points.push_back(summary_json(s, ordered_json{{"Delta", d}}));
    if (csv) {
      csv->row(std::vector<std::string>{
          csv_number(d), qvdp_regime_name(s.regime), csv_number(s.beta.re), csv_number(s.beta.im),
          csv_number(s.omega_eff), csv_number(s.gamma), csv_number(s.gamma_up),
          csv_number(s.gamma_down), csv_number(s.gamma_deph), csv_number(s.n_eff),
          csv_number(s.n_bar), csv_number(s.quality), csv_number(s.sigma_eigenvalues[0]),
          csv_number(s.sigma_eigenvalues[1])});
    }
  }
  csv.reset();
  if (omega_points >= 2) {
    const auto s = summary_of(p);
    if (s.regime == QVDP_REGIME_NO_STABLE_FIXED_POINT) {
      throw CliError(kConfig, "effective.omega_points: spectrum needs a stable classical fixed point");
    }
    double scale = std::max(1.0, std::abs(p.detuning));
    if (std::isfinite(s.gamma_deph)) scale = std::max(scale, s.gamma_deph);
    const auto omega = linspace(-4.0 * scale, 4.0 * scale, omega_points);
    std::vector<double> values(omega.size());
    check(qvdp_effective_spectrum(&p, s.beta, omega.data(), omega.size(), values.data()),
          "effective");
    CsvWriter table(run, "effective_spectrum.csv", {"omega_over_gamma1", "S_eff"});
    for (std::size_t k = 0; k < omega.size(); ++k) table.row(std::vector<double>{omega[k], values[k]});
  }
  write_json(run, "effective.json", ordered_json{{"points", points}});
}

void cmd_classical_diagram(Run& run) {
  Config& cfg = run.cfg;
  const qvdp_params p = read_params(cfg, false);
  const auto drives = read_range(cfg, "diagram.F", 0.1, 10.0, 40, true);
  const auto deltas = read_range(cfg, "diagram.Delta", 0.0, 5.0, 40);
  qvdp_attractor_options opt{};
  opt.transient = cfg.number("diagram.transient", 50.0);
  opt.window = cfg.number("diagram.window", 50.0);
  opt.budget = cfg.number("diagram.budget", 1000.0);
  opt.workers = run.workers;
  if (!(opt.transient > 0)) throw CliError(kConfig, "diagram.transient: must be > 0");
  if (!(opt.window > 0)) throw CliError(kConfig, "diagram.window: must be > 0");
  if (!(opt.budget > 0)) throw CliError(kConfig, "diagram.budget: must be > 0");
  cfg.reject_unused();

  std::vector<qvdp_diagram_cell> cells(drives.size() * deltas.size());
  check(qvdp_scan_phase_diagram(&p, drives.data(), drives.size(), deltas.data(), deltas.size(),
                                &opt, cells.data()), "diagram");
  std::map<std::string, int> counts;
  {
    CsvWriter csv(run, "diagram.csv", {"F", "Delta", "label", "winding", "period", "fixed_points"});
    for (const auto& c : cells) {
      const std::string label = qvdp_cell_label_name(c.label);
      ++counts[label];
      csv.row(std::vector<std::string>{csv_number(c.drive), csv_number(c.detuning), label,
                                       std::to_string(c.winding), csv_number(c.period),
                                       std::to_string(c.fixed_points)});
    }
  }
  {
    // Closed-form boundaries evaluated where each applies.
    CsvWriter csv(run, "boundaries.csv",
                  {"Delta", "F_saddle_node_outer", "F_saddle_node_inner", "F_belyakov_devaney", "F_hopf"});
    for (double d : deltas) {
      std::vector<double> row{d};
      for (auto kind : {QVDP_BOUNDARY_SADDLE_NODE_OUTER, QVDP_BOUNDARY_SADDLE_NODE_INNER,
                        QVDP_BOUNDARY_BELYAKOV_DEVANEY, QVDP_BOUNDARY_HOPF}) {
        double f2 = kNaN;
        row.push_back(qvdp_boundary(&p, kind, d, &f2) == QVDP_OK ? std::sqrt(f2) : kNaN);
      }
      csv.row(row);
    }
  }
  ordered_json c = ordered_json::object();
  for (const auto& [k, v] : counts) c[k] = v;
  write_json(run, "diagram.json", ordered_json{{"cells", cells.size()}, {"label_counts", c}});
}

void cmd_scan(Run& run) {
  Config& cfg = run.cfg;
  const qvdp_params base = read_params(cfg);
  const std::string param = cfg.text("scan.parameter");
  if (param != "F" && param != "Delta" && param != "gamma2") {
    throw CliError(kConfig, "scan.parameter: expected F, Delta or gamma2, got '" + param + "'");
  }
  const auto values = read_range(cfg, "scan.value", 0.0, 1.0, 11);
  const int n_phi = cfg.integer("scan.n_phi", 256);
  const int n_max = cfg.integer("space.n_max");
  const std::string frame = cfg.text("space.frame", "lab");
  if (frame != "lab" && frame != "displaced") {
    throw CliError(kConfig, "space.frame: expected 'lab' or 'displaced', got '" + frame + "'");
  }
  if (frame == "displaced" && cfg.text("space.center", "auto") != "auto") {
    throw CliError(kConfig, "space.center: scans only support 'auto'");
  }
  cfg.reject_unused();

  struct Row {
    qvdp_moments m{};
    qvdp_phase_summary ph{};
    qvdp_effective_summary s{};
    double top = 0.0;
    int code = kOk;
    std::string error;
  };
  std::vector<Row> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      Row& row = rows[i];
      try {
        qvdp_params p = base;
        if (param == "F") p.drive = values[i];
        if (param == "Delta") p.detuning = values[i];
        if (param == "gamma2") p.gamma2 = values[i];
        row.s = summary_of(p);
        qvdp_space sp{n_max, frame == "displaced" ? 1 : 0, {0.0, 0.0}};
        if (sp.displaced) sp.center = auto_center(row.s, "space.center");
        const auto l = make_liouvillian(p, sp);
        const auto rho = steady_of(l.get());
        check(qvdp_state_moments(rho.get(), &row.m));
        check(qvdp_truncation_check(rho.get(), 1e-6, &row.top, nullptr));
        std::vector<double> pv(static_cast<std::size_t>(std::max(n_phi, 0)));
        check(qvdp_phase_distribution(rho.get(), n_phi, pv.data(), &row.ph), "scan.n_phi");
      } catch (const CliError& e) {
        row.code = e.code();
        row.error = "scan point " + std::to_string(i) + " (" + param + " = " +
                    csv_number(values[i]) + "): " + e.what();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(run.workers > 0 ? run.workers
                                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())),
                                static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& row : rows) {
    if (row.code != kOk) throw CliError(row.code, row.error);
  }

  CsvWriter csv(run, "scan.csv",
                {param, "re_b", "im_b", "number", "peak_position", "peak_height", "peak_width",
                 "peak_count", "top_population", "regime", "quality"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv.row(std::vector<std::string>{
        csv_number(values[i]), csv_number(r.m.mean.re), csv_number(r.m.mean.im),
        csv_number(r.m.number), csv_number(r.ph.peak_position), csv_number(r.ph.peak_height),
        csv_number(r.ph.peak_width), std::to_string(r.ph.peak_count), csv_number(r.top),
        qvdp_regime_name(r.s.regime), csv_number(r.s.quality)});
  }
  write_json(run, "scan.json", ordered_json{{"points", rows.size()}});
}

int resolve_workers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("QVDP_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<int>(v);
    throw CliError(kUsage, "QVDP_WORKERS: expected a positive integer, got '" + std::string(env) + "'");
  }
  return 0;
}

}  // namespace
}  // namespace qvdp_cli

int main(int argc, char** argv) {
  using namespace qvdp_cli;
  CLI::App app{"Driven quantum Van der Pol oscillator simulations", "qvdp-cli"};
  app.set_version_flag("--version", std::string(qvdp_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"steady", "steady state, phase distribution and moments"},
      {"evolve", "time evolution of an initial state"},
      {"spectrum", "emission spectrum from the quantum regression theorem"},
      {"wigner", "Wigner density on a grid"},
      {"effective", "analytic effective-model summary"},
      {"classical-diagram", "classical synchronization phase diagram"},
      {"scan", "steady-state observables along a parameter line"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (default: QVDP_WORKERS or all cores)")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  try {
    run.workers = resolve_workers(workers);
    if (!std::filesystem::is_regular_file(config_path)) {
      throw CliError(kIo, "config: cannot read " + config_path);
    }
    run.cfg = Config::load(config_path);
    run.out = out_dir;
    std::error_code ec;
    std::filesystem::create_directories(run.out, ec);
    if (ec) throw CliError(kIo, "out: cannot create " + out_dir + ": " + ec.message());

    if (run.command == "steady") cmd_steady(run);
    else if (run.command == "evolve") cmd_evolve(run);
    else if (run.command == "spectrum") cmd_spectrum(run);
    else if (run.command == "wigner") cmd_wigner(run);
    else if (run.command == "effective") cmd_effective(run);
    else if (run.command == "classical-diagram") cmd_classical_diagram(run);
    else cmd_scan(run);
  } catch (const ConfigError& e) {
    std::cerr << "qvdp-cli: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const CliError& e) {
    std::cerr << "qvdp-cli: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "qvdp-cli: internal error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
