// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::vector<double> UniformGrid::values() const {
  std::vector<double> v(static_cast<std::size_t>(std::max(points, 0)));
  for (int k = 0; k < points; ++k) v[static_cast<std::size_t>(k)] = at(k);
  return v;
}

void UniformGrid::validate(const char* name) const {
  if (points < 2 || !std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
    std::ostringstream msg;
    msg << name << ": need at least 2 points and finite min < max";
    throw InvalidArgument(msg.str());
  }
}

double WignerGrid::integral() const {
  return values.sum() * x.step() * p.step();
}

WignerGrid wigner(const DensityMatrix& rho, const UniformGrid& x,
                  const UniformGrid& p) {
  x.validate("x_grid");
  p.validate("p_grid");
  const Eigen::MatrixXcd& r = rho.matrix();
  const int m_dim = rho.dim();
  const Complex c = rho.space().center();
  const double x0 = std::sqrt(2.0) * c.real();
  const double p0 = std::sqrt(2.0) * c.imag();

  std::vector<double> sqrt_n(static_cast<std::size_t>(m_dim));
  for (int k = 0; k < m_dim; ++k) sqrt_n[static_cast<std::size_t>(k)] = std::sqrt(double(k));

  WignerGrid out{x, p, Eigen::MatrixXd::Zero(p.points, x.points)};
  std::vector<Complex> wl(static_cast<std::size_t>(m_dim));

  for (int ip = 0; ip < p.points; ++ip) {
    for (int ix = 0; ix < x.points; ++ix) {
      const Complex alpha((x.at(ix) - x0) / std::sqrt(2.0),
                          (p.at(ip) - p0) / std::sqrt(2.0));
      const Complex two_a = 2.0 * alpha;
      const Complex two_ac = std::conj(two_a);
      // wl[n] holds the kernel of |m><n| for the current row m.
      wl[0] = std::exp(-2.0 * std::norm(alpha)) / kPi;
      double w = std::real(r(0, 0)) * wl[0].real();
      for (int n = 1; n < m_dim; ++n) {
        wl[n] = two_a * wl[n - 1] / sqrt_n[n];
        w += 2.0 * std::real(r(0, n) * wl[n]);
      }
      for (int m = 1; m < m_dim; ++m) {
        Complex prev = wl[m];
        wl[m] = (two_ac * prev - sqrt_n[m] * wl[m - 1]) / sqrt_n[m];
        w += std::real(r(m, m) * wl[m]);
        for (int n = m + 1; n < m_dim; ++n) {
          const Complex next = (two_a * wl[n - 1] - sqrt_n[m] * prev) / sqrt_n[n];
          prev = wl[n];
          wl[n] = next;
          w += 2.0 * std::real(r(m, n) * wl[n]);
        }
      }
      out.values(ip, ix) = w;
    }
  }
  return out;
}

UniformGrid default_wigner_axis(const DensityMatrix& rho) {
  const double radius = std::sqrt(2.0 * std::max(moments(rho).number, 0.0)) + 5.0;
  return UniformGrid{-radius, radius, 201};
}

double negativity_volume(const WignerGrid& w) {
  const double v = w.values.cwiseAbs().sum() * w.x.step() * w.p.step() - 1.0;
  return std::max(v, 0.0);
}

// ---------------------------------------------------------------------------
// Phase distribution

double PhaseDistribution::integral() const {
  if (phi.size() < 2) return 0.0;
  const double dphi = 2.0 * kPi / static_cast<double>(phi.size());
  double s = 0.0;
  for (double v : values) s += v;
  return s * dphi;
}

double PhaseDistribution::peak_position() const {
  const auto it = std::max_element(values.begin(), values.end());
  return phi[static_cast<std::size_t>(it - values.begin())];
}

double PhaseDistribution::peak_height() const {
  return *std::max_element(values.begin(), values.end());
}

double PhaseDistribution::peak_width() const {
  const auto n = static_cast<long>(values.size());
  const long k0 = std::max_element(values.begin(), values.end()) - values.begin();
  const double half = 0.5 * values[static_cast<std::size_t>(k0)];
  const double dphi = 2.0 * kPi / static_cast<double>(n);
  auto at = [&](long k) { return values[static_cast<std::size_t>(((k % n) + n) % n)]; };
  auto walk = [&](long dir) -> double {
    for (long s = 1; s < n; ++s) {
      const double v = at(k0 + dir * s);
      if (v < half) {
        const double vp = at(k0 + dir * (s - 1));
        const double frac = (vp - half) / (vp - v);
        return (static_cast<double>(s - 1) + frac) * dphi;
      }
    }
    return kPi;
  };
  return std::min(walk(1) + walk(-1), 2.0 * kPi);
}

int PhaseDistribution::count_peaks(double rel_prominence) const {
  const auto n = static_cast<long>(values.size());
  auto at = [&](long k) { return values[static_cast<std::size_t>(((k % n) + n) % n)]; };
  const double thresh = rel_prominence * peak_height();
  int count = 0;
  for (long k = 0; k < n; ++k) {
    const double v = at(k);
    if (!(v > at(k - 1) && v >= at(k + 1))) continue;
    // Prominence: smallest descent needed before reaching higher ground.
    double prom = std::numeric_limits<double>::infinity();
    for (long dir : {-1L, 1L}) {
      double lowest = v;
      for (long s = 1; s < n; ++s) {
        const double u = at(k + dir * s);
        if (u > v) break;
        lowest = std::min(lowest, u);
      }
      // Without higher ground the walk covers the whole circle.
      prom = std::min(prom, v - lowest);
    }
    if (prom > thresh) ++count;
  }
  return count;
}

PhaseDistribution phase_distribution(const DensityMatrix& rho, int n_phi) {
  if (n_phi < 8) {
    throw InvalidArgument("n_phi: must be >= 8");
  }
  const DensityMatrix lab = rho.space().is_displaced()
                                ? to_lab_frame(rho, suggested_lab_truncation(rho.space()))
                                : rho;
  const Eigen::MatrixXcd& r = lab.matrix();
  const int n = lab.dim();
  PhaseDistribution out;
  out.phi.resize(static_cast<std::size_t>(n_phi));
  out.values.resize(static_cast<std::size_t>(n_phi));
  Eigen::VectorXcd v(n);
  for (int k = 0; k < n_phi; ++k) {
    const double phi = 2.0 * kPi * k / n_phi;
    for (int j = 0; j < n; ++j) v(j) = std::polar(1.0, j * phi);
    const Complex q = v.dot(r * v);  // v^dag rho v
    out.phi[static_cast<std::size_t>(k)] = phi;
    out.values[static_cast<std::size_t>(k)] = q.real() / (2.0 * kPi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moments

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw InvalidArgument("expectation: operator dimension does not match state");
  }
  return (rho.matrix() * op).trace();
}

Moments moments(const DensityMatrix& rho) {
  const Eigen::MatrixXcd& r = rho.matrix();
  const int n = rho.dim();
  Complex a1 = 0.0, a2 = 0.0;
  double num = 0.0;
  for (int k = 0; k < n; ++k) {
    num += k * std::real(r(k, k));
    if (k + 1 < n) a1 += std::sqrt(double(k + 1)) * r(k + 1, k);
    if (k + 2 < n) a2 += std::sqrt(double(k + 1) * (k + 2)) * r(k + 2, k);
  }
  const Complex c = rho.space().center();
  const Complex tr = r.trace();
  Moments m;
  m.mean = c * tr + a1;
  m.number = std::norm(c) * tr.real() + 2.0 * std::real(std::conj(c) * a1) + num;
  m.second = c * c * tr + 2.0 * c * a1 + a2;
  return m;
}

Eigen::Matrix2d covariance_from_state(const DensityMatrix& rho) {
  const Moments m = moments(rho);
  const Complex d2 = m.second - m.mean * m.mean;
  const double dn = m.number - std::norm(m.mean);
  Eigen::Matrix2d s;
  s(0, 0) = d2.real() + dn + 0.5;
  s(1, 1) = -d2.real() + dn + 0.5;
  s(0, 1) = s(1, 0) = d2.imag();
  return s;
}

// ---------------------------------------------------------------------------
// Phase deviations

Complex QuadratureFrame::radial_weight() const { return std::polar(1.0, phi_ss); }

OperatorMatrix QuadratureFrame::r_op(const FockSpace& space) const {
  const OperatorMatrix b = annihilation(space);
  const Complex w = std::conj(radial_weight());
  return 0.5 * (w * b + std::conj(w) * b.adjoint());
}

OperatorMatrix QuadratureFrame::r_perp_op(const FockSpace& space) const {
  const OperatorMatrix b = annihilation(space);
  const Complex w = Complex(0.0, 1.0) * std::conj(radial_weight());
  return 0.5 * (w * b + std::conj(w) * b.adjoint());
}

PhaseDeviation phase_deviation_series(std::span<const DensityMatrix> snapshots,
                                      const QuadratureFrame& frame, double r_ss) {
  if (!(r_ss > 0)) {
    throw InvalidArgument("R_ss: must be > 0");
  }
  PhaseDeviation out;
  const Complex e = std::conj(frame.radial_weight());
  for (const auto& rho : snapshots) {
    const Moments m = moments(rho);
    const double mean = -std::imag(e * m.mean);
    const double second =
        -0.25 * (2.0 * std::real(e * e * m.second) - 2.0 * m.number - 1.0);
    out.r_perp_mean.push_back(mean);
    out.r_perp_variance.push_back(second - mean * mean);
    out.delta_phi.push_back(-mean / r_ss);
  }
  return out;
}

}  // namespace qvdp
