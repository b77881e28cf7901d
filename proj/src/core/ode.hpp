// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

// Adaptive Dormand-Prince 5(4) integrator shared by the master-equation and
// classical solvers. Steps are clipped so every requested output time is hit
// exactly; no dense output interpolation.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "qvdp/error.hpp"

namespace qvdp::detail {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

// RMS error norm, works for any Eigen vector (real or complex).
template <class V>
double error_norm(const V& err, const V& y0, const V& y1, double atol,
                  double rtol) {
  const auto n = err.size();
  double acc = 0.0;
  for (decltype(err.size()) i = 0; i < n; ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

/// Integrates y' = rhs(t, y) from t0, calling observe(index, y) at each
/// requested time. Times must be >= t0 and nondecreasing.
template <class State, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& rhs, double t0, State y,
                          std::span<const double> times,
                          const OdeOptions& opt, Observer&& observe) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats stats;
  double t = t0;
  State k1 = rhs(t, y);

  // Initial step from the scale of y and y'.
  double h;
  {
    const double d0 = y.norm() + opt.atol;
    const double d1 = k1.norm() + opt.atol;
    h = (d1 > 1e-300) ? 0.01 * d0 / d1 : 1e-6;
    h = std::clamp(h, opt.min_step, opt.max_step);
  }

  for (std::size_t idx = 0; idx < times.size(); ++idx) {
    const double target = times[idx];
    if (target < t) {
      throw InvalidArgument("output times must be nondecreasing");
    }
    while (t < target) {
      if (stats.accepted + stats.rejected > opt.max_steps) {
        throw SolverError("integrator exceeded its step budget");
      }
      const double remaining = target - t;
      bool last = false;
      double step = std::min(h, opt.max_step);
      if (step >= remaining * (1.0 - 1e-12)) {
        step = remaining;
        last = true;
      }
      const State k2 = rhs(t + c2 * step, State(y + step * a21 * k1));
      const State k3 =
          rhs(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
      const State k4 = rhs(
          t + c4 * step, State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 =
          rhs(t + c5 * step,
              State(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 =
          rhs(t + step, State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 +
                                          a64 * k4 + a65 * k5)));
      State y_new =
          y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      State k7 = rhs(t + step, y_new);
      const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                e6 * k6 + e7 * k7);
      const double en = error_norm(err, y, y_new, opt.atol, opt.rtol);
      if (!std::isfinite(en)) {
        throw SolverError("integrator produced non-finite values");
      }
      if (en <= 1.0) {
        t = last ? target : t + step;
        y = std::move(y_new);
        k1 = std::move(k7);
        ++stats.accepted;
        const double fac =
            en > 0 ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0) : 5.0;
        // Do not let a short clipped step shrink the controller's estimate.
        h = last ? std::max(h, step * fac) : step * fac;
      } else {
        ++stats.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
        if (h < opt.min_step) {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t << " (h = " << h << ")";
          throw SolverError(msg.str());
        }
      }
    }
    observe(idx, y);
  }
  return stats;
}

}  // namespace qvdp::detail
