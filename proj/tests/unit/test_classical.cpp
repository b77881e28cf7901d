// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qvdp/classical.hpp"
#include "qvdp/effective.hpp"
#include "qvdp/error.hpp"

using namespace qvdp;
using std::numbers::pi;

namespace {

SystemParams params(double g2, double f, double d) {
  SystemParams p;
  p.gamma2 = g2;
  p.drive = f;
  p.detuning = d;
  return p;
}

SystemParams with_f2(SystemParams p, double f2) {
  p.drive = std::sqrt(f2);
  return p;
}

}  // namespace

TEST_CASE("undriven amplitude follows the logistic law") {
  const SystemParams p = params(0.1, 0.0, 0.7);
  const double u_inf = p.gamma1 / (2.0 * p.gamma2);
  const Complex beta0(0.3, 0.1);
  const double u0 = std::norm(beta0);
  std::vector<double> t;
  for (int k = 0; k <= 60; ++k) t.push_back(0.25 * k);
  const ClassicalTrajectory tr = integrate_classical(p, beta0, t);
  const auto r = tr.radius();
  const auto ph = tr.phase();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double u = u_inf / (1.0 + (u_inf / u0 - 1.0) * std::exp(-p.gamma1 * t[k]));
    CHECK(r[k] * r[k] == doctest::Approx(u).epsilon(1e-8));
    // Free rotation at the detuning, unwrapped.
    CHECK(ph[k] == doctest::Approx(std::arg(beta0) + p.detuning * t[k]).epsilon(1e-8));
  }
  CHECK(r.back() == doctest::Approx(std::sqrt(u_inf)).epsilon(1e-4));
}

TEST_CASE("trajectory input validation") {
  const SystemParams p = params(0.1, 1.0, 0.0);
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS(integrate_classical(p, 0.0, bad), InvalidArgument);
  const std::vector<double> t{0.0, 1.0};
  CHECK_THROWS_AS(integrate_classical(p, Complex(NAN, 0.0), t), InvalidArgument);
}

TEST_CASE("saddle-node boundary brackets the change in fixed-point count") {
  const SystemParams base = params(0.1, 0.0, 0.0);
  const SaddleNodeBoundary zero = boundary_saddle_node(base, 0.0);
  CHECK(zero.f2_outer == doctest::Approx(0.0).scale(1.0));
  CHECK(zero.f2_inner == doctest::Approx(0.185185).epsilon(1e-5));
  for (double d : {0.05, 0.1, 0.2, -0.15}) {
    const SaddleNodeBoundary b = boundary_saddle_node(base, d);
    REQUIRE(b.f2_outer < b.f2_inner);
    auto count = [&](double f2) {
      SystemParams p = with_f2(base, f2);
      p.detuning = d;
      return classical_fixed_points(p).points.size();
    };
    CHECK(count(b.f2_outer * 0.98) == 1);
    CHECK(count(0.5 * (b.f2_outer + b.f2_inner)) == 3);
    CHECK(count(b.f2_inner * 1.02) == 1);
  }
  CHECK_THROWS_WITH_AS(boundary_saddle_node(base, 0.5), doctest::Contains("Delta"), DomainError);
}

TEST_CASE("Belyakov-Devaney boundary separates node and focus") {
  const SystemParams base = params(0.1, 0.0, 0.0);
  for (double d : {0.6, 1.0, -2.0, 4.0}) {
    const double f2 = boundary_belyakov_devaney(base, d);
    auto stable_at = [&](double scale) {
      SystemParams p = with_f2(base, f2 * scale);
      p.detuning = d;
      return classical_fixed_points(p).stable();
    };
    const auto above = stable_at(1.01);
    const auto below = stable_at(0.99);
    REQUIRE(above);
    CHECK(std::abs(above->lambda1.imag()) == 0.0);
    if (below) CHECK(std::abs(below->lambda1.imag()) > 0.0);
    // At the boundary the radicand vanishes: gamma2 |beta|^2 = |Delta|.
    SystemParams p = with_f2(base, f2);
    p.detuning = d;
    bool touched = false;
    for (const auto& fp : classical_fixed_points(p).points)
      touched = touched || std::abs(p.gamma2 * std::norm(fp.beta) - std::abs(d)) < 1e-6;
    CHECK(touched);
  }
  CHECK_THROWS_AS(boundary_belyakov_devaney(base, 0.2), DomainError);
}

TEST_CASE("Hopf boundary marks the loss of stability") {
  const SystemParams base = params(0.1, 0.0, 0.0);
  for (double d : {0.3, 1.0, 1.55, -3.0}) {
    const double f2 = boundary_hopf(base, d);
    auto stable_count = [&](double scale) {
      SystemParams p = with_f2(base, f2 * scale);
      p.detuning = d;
      return classical_fixed_points(p).stable_count();
    };
    CHECK(stable_count(1.01) >= 1);
    // Above the saddle-node range only one fixed point exists, so below the
    // boundary nothing is stable.
    if (d * d * 12.0 > base.gamma1 * base.gamma1) CHECK(stable_count(0.99) == 0);
  }
  CHECK_THROWS_AS(boundary_hopf(base, 0.1), DomainError);
}

TEST_CASE("ring-down reproduces the effective frequency and damping") {
  const SystemParams p = params(0.1, 10.0, 4.0);
  const auto fp = classical_fixed_points(p).stable();
  REQUIRE(fp);
  const BogoliubovData d = bogoliubov(p, fp->beta);
  const double dt = 0.001;
  std::vector<double> t;
  for (int k = 0; k <= 8000; ++k) t.push_back(k * dt);
  const ClassicalTrajectory tr = integrate_classical(p, fp->beta + Complex(1e-4, 0.0), t, 1e-12);
  // Zero crossings of Re(delta beta) give the period; peak ratios the decay.
  std::vector<double> zeros;
  std::vector<std::pair<double, double>> peaks;
  std::vector<double> x;
  for (const Complex& b : tr.beta) x.push_back((b - fp->beta).real());
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    if (x[k - 1] > 0 && x[k] <= 0) zeros.push_back(t[k - 1] + dt * x[k - 1] / (x[k - 1] - x[k]));
    if (x[k] > x[k - 1] && x[k] >= x[k + 1]) peaks.emplace_back(t[k], x[k]);
  }
  REQUIRE(zeros.size() >= 3);
  REQUIRE(peaks.size() >= 3);
  const double period = (zeros.back() - zeros.front()) / static_cast<double>(zeros.size() - 1);
  const double omega_fit = 2.0 * pi / period;
  const double rate_fit = std::log(peaks.front().second / peaks.back().second) /
                          (peaks.back().first - peaks.front().first);
  CHECK(omega_fit == doctest::Approx(*d.omega_eff).epsilon(0.02));
  CHECK(2.0 * rate_fit == doctest::Approx(d.gamma).epsilon(0.02));
}

TEST_CASE("attractor classification") {
  SUBCASE("locked limit cycle winds once") {
    const SystemParams p = params(0.1, 0.2, 1.0);
    REQUIRE(classical_fixed_points(p).stable_count() == 0);
    const DiagramCell c = classify_attractor(p, std::polar(std::sqrt(5.0), 0.7));
    CHECK(c.label == CellLabel::LimitCycle);
    CHECK(c.winding == 1);
    CHECK(c.period > 0.0);
  }
  SUBCASE("phase self-oscillation does not encircle the origin") {
    const SystemParams p = params(0.005, 10.0, 1.55);
    REQUIRE(classical_fixed_points(p).stable_count() == 0);
    const DiagramCell c = classify_attractor(p, std::polar(std::sqrt(100.0), 0.7));
    CHECK(c.label == CellLabel::PhaseSelfOscillation);
    CHECK(c.winding == 0);
    CHECK(c.period == doctest::Approx(4.157).epsilon(1e-3));

    AttractorOptions fine;
    fine.recurrence_tol = 1e-8;
    const DiagramCell cf = classify_attractor(p, std::polar(std::sqrt(100.0), 0.7), fine);
    CHECK(cf.winding == c.winding);
    CHECK(cf.period == doctest::Approx(c.period).epsilon(1e-6));
  }
  SUBCASE("a trajectory settling on a fixed point is not periodic") {
    AttractorOptions quick;
    quick.budget = 200.0;
    const DiagramCell c = classify_attractor(params(0.1, 10.0, 0.0), 1.0, quick);
    CHECK(c.label == CellLabel::Unresolved);
  }
}

TEST_CASE("winding is stable under time-step refinement") {
  const SystemParams p = params(0.1, 0.2, 1.0);
  const DiagramCell a = classify_attractor(p, std::polar(std::sqrt(5.0), 0.7));
  // Integrate one period finely and count turns directly.
  std::vector<double> t;
  const int n = 20000;
  for (int k = 0; k <= n; ++k) t.push_back(50.0 + a.period * k / n);
  const ClassicalTrajectory tr = integrate_classical(p, std::polar(std::sqrt(5.0), 0.7), t, 1e-12);
  const auto ph = tr.phase();
  CHECK(std::lround((ph.back() - ph.front()) / (2.0 * pi)) == a.winding);
  CHECK(std::abs(tr.beta.back() - tr.beta.front()) < 1e-5);
}

TEST_CASE("phase diagram scan") {
  const SystemParams base = params(0.1, 0.0, 0.0);
  const std::vector<double> drives{0.2, 10.0};
  const std::vector<double> detunings{0.0, 1.0, 4.0};
  AttractorOptions opt;
  opt.workers = 2;
  const auto cells = scan_phase_diagram(base, drives, detunings, opt);
  REQUIRE(cells.size() == 6);
  CHECK(cells[1].drive == 0.2);
  CHECK(cells[1].detuning == 1.0);
  CHECK(cells[1].label == CellLabel::LimitCycle);
  CHECK(cells[3].label == CellLabel::SyncOverdamped);
  CHECK(cells[5].label == CellLabel::SyncUnderdamped);
  for (const auto& c : cells) CHECK(c.fixed_points >= 1);
  CHECK(to_string(CellLabel::PhaseSelfOscillation) == "phase-self-oscillation");
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(scan_phase_diagram(base, bad, detunings), InvalidArgument);
}
