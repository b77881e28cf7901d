// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "parallel.hpp"
#include "qvdp/error.hpp"

namespace qvdp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// L + i omega with row 0 replaced by the trace functional. The right-hand
// side is traceless, so for omega != 0 the solution is unchanged and at
// omega = 0 the traceless solution is selected.
SparseMatrix shifted_system(const SparseMatrix& lm, int dim, double omega) {
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(lm.nonZeros()) + 2 * lm.rows());
  for (Eigen::Index k = 0; k < lm.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(lm, k); it; ++it) {
      if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index k = 1; k < lm.rows(); ++k) {
    trip.emplace_back(k, k, Complex(0.0, omega));
  }
  for (int d = 0; d < dim; ++d) {
    trip.emplace_back(0, d + static_cast<Eigen::Index>(d) * dim, 1.0);
  }
  SparseMatrix a(lm.rows(), lm.cols());
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

}  // namespace

double SpectrumTrace::sum_rule() const {
  double acc = 0.0;
  for (std::size_t k = 1; k < omega.size(); ++k) {
    acc += 0.5 * (values[k] + values[k - 1]) * (omega[k] - omega[k - 1]);
  }
  return acc / (2.0 * M_PI) + coherent_weight;
}

std::vector<double> SpectrumTrace::peak_positions(double rel_prominence) const {
  return find_peaks(omega, values, rel_prominence);
}

std::vector<double> find_peaks(std::span<const double> x,
                               std::span<const double> y,
                               double rel_prominence) {
  std::vector<double> out;
  const std::size_t n = y.size();
  if (n < 3 || x.size() != n) return out;
  double ymax = -std::numeric_limits<double>::infinity();
  for (double v : y) ymax = std::max(ymax, v);
  const double thresh = rel_prominence * ymax;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(y[k] > y[k - 1] && y[k] >= y[k + 1])) continue;
    // Prominence against the lower of the two bases.
    double base_l = y[k], base_r = y[k];
    for (std::size_t j = k; j-- > 0;) {
      if (y[j] > y[k]) break;
      base_l = std::min(base_l, y[j]);
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      if (y[j] > y[k]) break;
      base_r = std::min(base_r, y[j]);
    }
    if (y[k] - std::max(base_l, base_r) <= thresh) continue;
    const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
    const double h = 0.5 * (x[k + 1] - x[k - 1]);
    const double denom = y0 - 2.0 * y1 + y2;
    double shift = denom != 0 ? 0.5 * (y0 - y2) / denom : 0.0;
    shift = std::clamp(shift, -1.0, 1.0);
    out.push_back(x[k] + shift * h);
  }
  return out;
}

UniformGrid default_omega_grid(double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw InvalidArgument("omega scale: must be positive and finite");
  }
  return UniformGrid{-4.0 * scale, 4.0 * scale, 2048};
}

SpectrumTrace spectrum_full(const Liouvillian& L, const DensityMatrix& rho_ss,
                            std::span<const double> omega,
                            const SpectrumOptions& options) {
  if (!(rho_ss.space() == L.space())) {
    throw InvalidArgument("rho_ss: state space does not match the Liouvillian");
  }
  for (double w : omega) {
    if (!std::isfinite(w)) throw InvalidArgument("omega: values must be finite");
  }
  const int dim = L.dim();
  const Moments m = moments(rho_ss);
  const MatrixXcd db =
      annihilation(L.space()) - m.mean * MatrixXcd::Identity(dim, dim);
  VectorXcd rhs = vectorize(db * rho_ss.matrix());
  rhs(0) = 0.0;
  // Tr[db^dag X] = sum_ij conj(db)_ij X_ij.
  const VectorXcd probe = vectorize(db.conjugate());

  SpectrumTrace out;
  out.omega.assign(omega.begin(), omega.end());
  out.values.assign(omega.size(), std::numeric_limits<double>::quiet_NaN());
  out.coherent_weight = std::norm(m.mean);
  std::vector<char> ok(omega.size(), 0);

  detail::parallel_for(omega.size(), options.workers, [&](std::size_t k) {
    const SparseMatrix a = shifted_system(L.matrix(), dim, omega[k]);
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return;
    VectorXcd x = lu.solve(rhs);
    // One refinement step keeps sharp peaks accurate.
    x += lu.solve(VectorXcd(rhs - a * x));
    if (!x.allFinite()) return;
    out.values[k] = -2.0 * std::real(probe.cwiseProduct(x).sum());
    ok[k] = 1;
  });
  for (std::size_t k = 0; k < ok.size(); ++k) {
    if (!ok[k]) out.failed.push_back(k);
  }
  return out;
}

std::vector<Complex> correlation_function(const Liouvillian& L,
                                          const DensityMatrix& rho_ss,
                                          std::span<const double> times,
                                          bool subtract_mean,
                                          const EvolveOptions& options) {
  if (!(rho_ss.space() == L.space())) {
    throw InvalidArgument("rho_ss: state space does not match the Liouvillian");
  }
  const int dim = L.dim();
  MatrixXcd b = annihilation(L.space());
  if (subtract_mean) {
    b -= moments(rho_ss).mean * MatrixXcd::Identity(dim, dim);
  }
  const auto xs = propagate(L, b * rho_ss.matrix(), times, options);
  std::vector<Complex> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back((b.adjoint() * x).trace());
  return out;
}

}  // namespace qvdp
