// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "ode.hpp"
#include "parallel.hpp"
#include "qvdp/effective.hpp"
#include "qvdp/error.hpp"

namespace qvdp {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec2 = Eigen::Vector2d;

Vec2 to_vec(Complex z) { return Vec2(z.real(), z.imag()); }
Complex to_complex(const Vec2& v) { return Complex(v(0), v(1)); }

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

detail::OdeOptions ode_options(double rtol) {
  detail::OdeOptions o;
  o.rtol = rtol;
  o.atol = rtol * 1e-2;
  o.min_step = 1e-12;
  return o;
}

// Amplitude and frequency scales used to pick sampling steps.
double amplitude_scale(const SystemParams& p) {
  return std::max({1.0, std::sqrt(p.gamma1 / (2.0 * p.gamma2)),
                   std::cbrt(p.drive / p.gamma2)});
}

void check_domain(double delta, double limit, const char* what) {
  if (!(std::abs(delta) > limit)) {
    std::ostringstream msg;
    msg << "Delta: " << what << " boundary needs |Delta| > " << limit
        << ", got " << delta;
    throw DomainError(msg.str());
  }
}

// F^2 for a fixed point with gamma2 u = v at detuning delta.
double drive_squared(const SystemParams& p, double v, double delta) {
  return v / p.gamma2 * (v * v - p.gamma1 * v + 0.25 * p.gamma1 * p.gamma1 + delta * delta);
}

class Flow {
 public:
  Flow(const SystemParams& p, double rtol) : p_(p), opt_(ode_options(rtol)) {}

  Vec2 operator()(double, const Vec2& y) const {
    return to_vec(classical_rhs(p_, to_complex(y)));
  }

  // State after advancing y by h.
  Vec2 advance(const Vec2& y, double h) const {
    if (h <= 0) return y;
    Vec2 out = y;
    const double t[1] = {h};
    detail::integrate_dopri5(*this, 0.0, y, t, opt_,
                             [&](std::size_t, const Vec2& s) { out = s; });
    return out;
  }

  // Samples y at t0 + k dt for k = 1..count.
  std::vector<Vec2> sample(const Vec2& y, double dt, std::size_t count) const {
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) t[k] = dt * static_cast<double>(k + 1);
    std::vector<Vec2> out(count);
    detail::integrate_dopri5(*this, 0.0, y, t, opt_,
                             [&](std::size_t i, const Vec2& s) { out[i] = s; });
    return out;
  }

 private:
  SystemParams p_;
  detail::OdeOptions opt_;
};

}  // namespace

std::vector<double> ClassicalTrajectory::radius() const {
  std::vector<double> r;
  r.reserve(beta.size());
  for (Complex b : beta) r.push_back(std::abs(b));
  return r;
}

std::vector<double> ClassicalTrajectory::phase() const {
  std::vector<double> ph;
  ph.reserve(beta.size());
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const double a = std::arg(beta[k]);
    ph.push_back(k == 0 ? a : ph.back() + wrap(a - ph.back()));
  }
  return ph;
}

ClassicalTrajectory integrate_classical(const SystemParams& p, Complex beta0,
                                        std::span<const double> times,
                                        double rtol) {
  p.validate();
  if (!std::isfinite(beta0.real()) || !std::isfinite(beta0.imag())) {
    throw InvalidArgument("beta0: must be finite");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0 || (k > 0 && times[k] < times[k - 1])) {
      throw InvalidArgument("times: must be finite, nonnegative and nondecreasing");
    }
  }
  const double bound = 1e6 * std::max(amplitude_scale(p), std::abs(beta0));
  const Flow flow(p, rtol);
  ClassicalTrajectory tr;
  tr.times.assign(times.begin(), times.end());
  tr.beta.resize(times.size());
  detail::integrate_dopri5(flow, 0.0, to_vec(beta0), times, ode_options(rtol),
                           [&](std::size_t i, const Vec2& s) {
                             if (s.norm() > bound) {
                               std::ostringstream msg;
                               msg << "classical trajectory blew up at t = " << times[i];
                               throw SolverError(msg.str());
                             }
                             tr.beta[i] = to_complex(s);
                           });
  return tr;
}

SaddleNodeBoundary boundary_saddle_node(const SystemParams& p, double delta) {
  const double disc = p.gamma1 * p.gamma1 - 12.0 * delta * delta;
  if (disc < 0) {
    std::ostringstream msg;
    msg << "Delta: saddle-node boundary needs gamma1^2 >= 12 Delta^2, got Delta = " << delta;
    throw DomainError(msg.str());
  }
  const double s = std::sqrt(disc);
  SaddleNodeBoundary b;
  b.f2_outer = drive_squared(p, (2.0 * p.gamma1 + s) / 6.0, delta);
  b.f2_inner = drive_squared(p, (2.0 * p.gamma1 - s) / 6.0, delta);
  return b;
}

double boundary_belyakov_devaney(const SystemParams& p, double delta) {
  check_domain(delta, 0.25 * p.gamma1, "Belyakov-Devaney");
  const double d = std::abs(delta);
  return d / p.gamma2 * ((d - 0.5 * p.gamma1) * (d - 0.5 * p.gamma1) + delta * delta);
}

double boundary_hopf(const SystemParams& p, double delta) {
  check_domain(delta, 0.25 * p.gamma1, "Hopf");
  const double g1 = p.gamma1;
  return g1 * delta * delta / (4.0 * p.gamma2) + g1 * g1 * g1 / (64.0 * p.gamma2);
}

std::string_view to_string(CellLabel label) {
  switch (label) {
    case CellLabel::SyncOverdamped: return "sync-overdamped";
    case CellLabel::SyncUnderdamped: return "sync-underdamped";
    case CellLabel::LimitCycle: return "limit-cycle";
    case CellLabel::PhaseSelfOscillation: return "phase-self-oscillation";
    case CellLabel::Unresolved: return "unresolved";
  }
  return "unknown";
}

DiagramCell classify_attractor(const SystemParams& p, Complex beta0,
                               const AttractorOptions& options) {
  p.validate();
  DiagramCell cell;
  cell.drive = p.drive;
  cell.detuning = p.detuning;
  cell.label = CellLabel::Unresolved;

  const double scale = amplitude_scale(p);
  const double freq = std::max({p.gamma1, std::abs(p.detuning),
                                p.gamma2 * scale * scale, p.drive / scale});
  const double dt = 0.02 / freq;
  const double tol = options.recurrence_tol * scale;
  const Flow flow(p, 1e-11);

  Vec2 y = flow.advance(to_vec(beta0), options.transient / p.gamma1);
  double t = options.transient / p.gamma1;
  const double y_ref = y(1);

  struct Crossing {
    double t;
    Vec2 y;
    std::size_t sample;  // index of the first sample after the crossing
  };
  std::vector<double> ts{t};
  std::vector<Vec2> ys{y};
  std::vector<Crossing> crossings;

  const auto per_chunk = static_cast<std::size_t>(std::ceil(options.window / p.gamma1 / dt));
  const double t_end = options.budget / p.gamma1;

  while (t < t_end) {
    const auto chunk = flow.sample(ys.back(), dt, per_chunk);
    for (const auto& s : chunk) {
      t += dt;
      const std::size_t k = ys.size();
      ts.push_back(t);
      ys.push_back(s);
      const double g0 = ys[k - 1](1) - y_ref;
      const double g1 = s(1) - y_ref;
      if (!(g0 <= 0 && g1 > 0)) continue;

      // Illinois regula falsi on the crossing time inside the sample step.
      double a = 0.0, b = dt, fa = g0, fb = g1;
      Vec2 yc = s;
      int side = 0;
      for (int it = 0; it < 60; ++it) {
        const double h = (a * fb - b * fa) / (fb - fa);
        yc = flow.advance(ys[k - 1], h);
        const double fh = yc(1) - y_ref;
        if (std::abs(fh) <= 1e-13 * scale || b - a < 1e-15 * dt) {
          a = b = h;
          break;
        }
        if (fh > 0) {
          b = h;
          fb = fh;
          if (side == 1) fa *= 0.5;
          side = 1;
        } else {
          a = h;
          fa = fh;
          if (side == -1) fb *= 0.5;
          side = -1;
        }
      }
      crossings.push_back({ts[k - 1] + 0.5 * (a + b), yc, k});

      const std::size_t j = crossings.size() - 1;
      const std::size_t lookback = std::min<std::size_t>(j, 16);
      for (std::size_t back = 1; back <= lookback; ++back) {
        const Crossing& ci = crossings[j - back];
        const Crossing& cj = crossings[j];
        if ((cj.y - ci.y).norm() > tol) continue;
        // Net phase advance from crossing i to crossing j.
        double total = 0.0;
        double prev = std::arg(to_complex(ci.y));
        for (std::size_t m = ci.sample; m < cj.sample; ++m) {
          const double a_m = std::arg(to_complex(ys[m]));
          total += wrap(a_m - prev);
          prev = a_m;
        }
        total += wrap(std::arg(to_complex(cj.y)) - prev);
        cell.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
        cell.period = cj.t - ci.t;
        cell.label = cell.winding != 0 ? CellLabel::LimitCycle
                                       : CellLabel::PhaseSelfOscillation;
        return cell;
      }
    }
    // A trajectory that has come to rest is not a periodic attractor.
    if (std::abs(classical_rhs(p, to_complex(ys.back()))) < 1e-12 * freq * scale) {
      return cell;
    }
  }
  return cell;
}

std::vector<DiagramCell> scan_phase_diagram(const SystemParams& base,
                                            std::span<const double> drives,
                                            std::span<const double> detunings,
                                            const AttractorOptions& options) {
  base.validate();
  for (double f : drives) {
    if (!(f > 0) || !std::isfinite(f)) throw InvalidArgument("F_grid: values must be positive and finite");
  }
  for (double d : detunings) {
    if (!std::isfinite(d)) throw InvalidArgument("Delta_grid: values must be finite");
  }
  std::vector<DiagramCell> cells(drives.size() * detunings.size());
  detail::parallel_for(cells.size(), options.workers, [&](std::size_t idx) {
    SystemParams p = base;
    p.drive = drives[idx / detunings.size()];
    p.detuning = detunings[idx % detunings.size()];
    const FixedPointSet fps = classical_fixed_points(p);
    const auto stable = fps.stable();
    DiagramCell cell;
    if (stable) {
      cell.drive = p.drive;
      cell.detuning = p.detuning;
      const bool focus = std::abs(stable->lambda1.imag()) > 0;
      cell.label = focus ? CellLabel::SyncUnderdamped : CellLabel::SyncOverdamped;
    } else {
      const double r = std::sqrt(p.gamma1 / (2.0 * p.gamma2));
      cell = classify_attractor(p, std::polar(r, 0.7), options);
    }
    cell.fixed_points = static_cast<int>(fps.points.size());
    cells[idx] = cell;
  });
  return cells;
}

}  // namespace qvdp
