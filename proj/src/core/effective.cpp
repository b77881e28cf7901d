// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/effective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {

constexpr double kPi = std::numbers::pi;

// Real roots of u^3 + a2 u^2 + a1 u + a0, each polished by Newton steps.
std::vector<double> real_cubic_roots(double a2, double a1, double a0) {
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  std::vector<double> t;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    t.push_back(std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s));
  } else if (p == 0) {
    t.push_back(0.0);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double th = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) t.push_back(m * std::cos(th - 2.0 * kPi * k / 3.0));
  }
  auto f = [&](double u) { return ((u + a2) * u + a1) * u + a0; };
  auto df = [&](double u) { return (3.0 * u + 2.0 * a2) * u + a1; };
  std::vector<double> roots;
  for (double tk : t) {
    double u = tk - a2 / 3.0;
    for (int it = 0; it < 60; ++it) {
      const double d = df(u);
      if (d == 0) break;
      const double step = f(u) / d;
      u -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(u))) break;
    }
    roots.push_back(u);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double u : roots) {
    if (unique.empty() ||
        std::abs(u - unique.back()) > 1e-10 * std::max(1.0, std::abs(u))) {
      unique.push_back(u);
    }
  }
  return unique;
}

void eigen_closed_form(const SystemParams& p, double u, Complex& l1,
                       Complex& l2) {
  const Complex root =
      std::sqrt(Complex(p.gamma2 * p.gamma2 * u * u - p.detuning * p.detuning, 0.0));
  const double base = -2.0 * p.gamma2 * u + 0.5 * p.gamma1;
  l1 = base + root;
  l2 = base - root;
}

}  // namespace

Complex classical_rhs(const SystemParams& p, Complex beta) {
  const Complex gain(0.5 * p.gamma1 - p.gamma2 * std::norm(beta), p.detuning);
  return gain * beta - p.drive;
}

Eigen::Matrix2d drift_matrix(const SystemParams& p, Complex beta) {
  const double u = std::norm(beta);
  const double diag = 0.5 * p.gamma1 - 2.0 * p.gamma2 * u;
  const Complex g = p.gamma2 * beta * beta;
  Eigen::Matrix2d m;
  m << diag - g.real(), -p.detuning - g.imag(),
       p.detuning - g.imag(), diag + g.real();
  return m;
}

Eigen::Matrix2d diffusion_matrix(const SystemParams& p, Complex beta) {
  const double d = 0.5 * p.gamma1 + 2.0 * p.gamma2 * std::norm(beta);
  return d * Eigen::Matrix2d::Identity();
}

int FixedPointSet::stable_count() const {
  return static_cast<int>(
      std::count_if(points.begin(), points.end(), [](const FixedPoint& f) { return f.stable; }));
}

std::optional<FixedPoint> FixedPointSet::stable() const {
  std::optional<FixedPoint> best;
  for (const auto& f : points) {
    if (f.stable && (!best || f.residual < best->residual)) best = f;
  }
  return best;
}

FixedPoint make_fixed_point(const SystemParams& p, Complex beta) {
  // Newton polish on the real 2-D system; keep the best iterate.
  Complex best = beta;
  double best_res = std::abs(classical_rhs(p, beta));
  for (int it = 0; it < 8 && best_res > 0; ++it) {
    const Complex f = classical_rhs(p, best);
    const Eigen::Matrix2d j = drift_matrix(p, best);
    const Eigen::Vector2d step = j.fullPivLu().solve(Eigen::Vector2d(f.real(), f.imag()));
    if (!step.allFinite()) break;
    const Complex trial = best - Complex(step(0), step(1));
    const double res = std::abs(classical_rhs(p, trial));
    if (!(res < best_res)) break;
    best = trial;
    best_res = res;
  }
  FixedPoint fp;
  fp.beta = best;
  fp.residual = best_res;
  eigen_closed_form(p, std::norm(best), fp.lambda1, fp.lambda2);
  fp.stable = fp.lambda1.real() < 0 && fp.lambda2.real() < 0;
  return fp;
}

FixedPointSet classical_fixed_points(const SystemParams& p) {
  p.validate();
  FixedPointSet set;
  if (p.drive == 0) {
    set.points.push_back(make_fixed_point(p, 0.0));
    set.limit_cycle_radius = std::sqrt(p.gamma1 / (2.0 * p.gamma2));
    return set;
  }
  const double g2sq = p.gamma2 * p.gamma2;
  const auto roots = real_cubic_roots(
      -p.gamma1 / p.gamma2,
      (0.25 * p.gamma1 * p.gamma1 + p.detuning * p.detuning) / g2sq,
      -p.drive * p.drive / g2sq);
  for (double u : roots) {
    if (u <= 0) continue;
    const Complex denom(0.5 * p.gamma1 - p.gamma2 * u, p.detuning);
    set.points.push_back(make_fixed_point(p, p.drive / denom));
  }
  std::sort(set.points.begin(), set.points.end(),
            [](const FixedPoint& a, const FixedPoint& b) { return a.radius() < b.radius(); });
  return set;
}

BogoliubovData bogoliubov(const SystemParams& p, Complex beta) {
  const double u = std::norm(beta);
  BogoliubovData d;
  const Complex ae = Complex(0.0, -0.5) * p.gamma2 * beta * beta;
  d.A = std::abs(ae);
  d.theta = std::arg(ae);
  const double kappa = 4.0 * p.gamma2 * u;
  d.gamma = kappa - p.gamma1;
  if (!(d.gamma > 0)) {
    std::ostringstream msg;
    msg << "fixed point is unstable: Gamma = 4 gamma2 |beta|^2 - gamma1 = "
        << d.gamma << " <= 0";
    throw InstabilityError(msg.str());
  }
  d.n_bar = p.gamma1 / d.gamma;
  const double ratio = 2.0 * d.A / std::abs(p.detuning);
  d.overdamped = !(p.detuning != 0 && ratio < 1.0);
  if (d.overdamped) return d;

  const double chi = std::copysign(std::atanh(ratio), p.detuning) * 0.5;
  // cosh 2chi = 1/sqrt(1 - t^2), so sinh^2 and cosh^2 follow without overflow.
  const double c2 = 1.0 / std::sqrt((1.0 - ratio) * (1.0 + ratio));
  const double sh2 = 0.5 * (c2 - 1.0);
  const double ch2 = 0.5 * (c2 + 1.0);
  d.chi = chi;
  d.omega_eff = std::sqrt((std::abs(p.detuning) - 2.0 * d.A) * (std::abs(p.detuning) + 2.0 * d.A));
  d.gamma_up = kappa * sh2 + p.gamma1 * ch2;
  d.gamma_down = kappa * ch2 + p.gamma1 * sh2;
  d.gamma_deph = *d.gamma_up + *d.gamma_down;
  d.n_eff = *d.gamma_up / d.gamma;
  d.quality = *d.omega_eff / *d.gamma_deph;
  return d;
}

CovarianceResult lyapunov_covariance(const SystemParams& p, Complex beta) {
  const Eigen::Matrix2d m = drift_matrix(p, beta);
  const Eigen::Matrix2d dmat = diffusion_matrix(p, beta);
  if (!(m.trace() < 0 && m.determinant() > 0)) {
    throw InstabilityError("covariance: drift matrix is not stable (Gamma <= 0 or saddle)");
  }
  Eigen::Matrix3d a;
  a << 2 * m(0, 0), 2 * m(0, 1), 0,
       m(1, 0), m(0, 0) + m(1, 1), m(0, 1),
       0, 2 * m(1, 0), 2 * m(1, 1);
  const Eigen::Vector3d rhs(-dmat(0, 0), -dmat(0, 1), -dmat(1, 1));
  const Eigen::Vector3d s = a.fullPivLu().solve(rhs);

  CovarianceResult r;
  r.sigma << s(0), s(1), s(1), s(2);
  r.residual = (m * r.sigma + r.sigma * m.transpose() + dmat).norm() / dmat.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.sigma);
  r.eigenvalues = es.eigenvalues();
  r.asymmetry = r.eigenvalues(1) / r.eigenvalues(0);
  r.below_shot_noise = r.eigenvalues(0) < 0.5;
  const Eigen::Vector2d major = es.eigenvectors().col(1);
  double ang = std::atan2(major(1), major(0));
  if (ang <= -0.5 * kPi) ang += kPi;
  if (ang > 0.5 * kPi) ang -= kPi;
  r.principal_angle = ang;
  return r;
}

SpectrumTrace effective_spectrum(const SystemParams& p, Complex beta,
                                 std::span<const double> omega) {
  const double u = std::norm(beta);
  const double gamma = 4.0 * p.gamma2 * u - p.gamma1;
  if (!(gamma > 0)) {
    throw InstabilityError("effective spectrum: 4 gamma2 |beta|^2 <= gamma1, n_bar undefined");
  }
  const double n_bar = p.gamma1 / gamma;
  const double g = p.gamma2 * u;
  const double om_sq = p.detuning * p.detuning - g * g;
  SpectrumTrace out;
  out.omega.assign(omega.begin(), omega.end());
  out.values.reserve(omega.size());
  out.coherent_weight = u;
  for (double w : omega) {
    const double num =
        gamma * (g * g + n_bar * (0.25 * gamma * gamma + g * g + (w + p.detuning) * (w + p.detuning)));
    const Complex z = om_sq - Complex(w, 0.5 * gamma) * Complex(w, 0.5 * gamma);
    out.values.push_back(num / std::norm(z));
  }
  return out;
}

PhaseEquationParams second_order_phase_params(const SystemParams& p,
                                              Complex beta) {
  const double r2 = std::norm(beta);
  PhaseEquationParams e;
  e.gamma = 4.0 * p.gamma2 * r2 - p.gamma1;
  e.omega_sq = p.detuning * p.detuning +
               (p.gamma2 * r2 - 0.5 * p.gamma1) * (3.0 * p.gamma2 * r2 - 0.5 * p.gamma1);
  return e;
}

std::string_view to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::NoStableFixedPoint: return "no-stable-fixed-point";
    case RegimeLabel::Overdamped: return "overdamped";
    case RegimeLabel::Underdamped: return "underdamped";
    case RegimeLabel::QuantumCoherent: return "quantum-coherent";
  }
  return "unknown";
}

EffectiveSummary classify_regime(const SystemParams& p) {
  EffectiveSummary s;
  s.params = p;
  s.fixed_points = classical_fixed_points(p);
  s.stable = s.fixed_points.stable();
  if (!s.stable) return s;
  const Complex beta = s.stable->beta;
  s.phase = second_order_phase_params(p, beta);
  try {
    s.rates = bogoliubov(p, beta);
    s.covariance = lyapunov_covariance(p, beta);
  } catch (const InstabilityError&) {
    // Marginal points at the stability edge keep only the fixed point.
    s.stable.reset();
    return s;
  }
  if (s.rates->overdamped) {
    s.regime = RegimeLabel::Overdamped;
  } else if (*s.rates->quality > 1.0) {
    s.regime = RegimeLabel::QuantumCoherent;
  } else {
    s.regime = RegimeLabel::Underdamped;
  }
  return s;
}

}  // namespace qvdp
