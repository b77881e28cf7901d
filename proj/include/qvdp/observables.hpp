// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qvdp/lindblad.hpp"

namespace qvdp {

/// Uniform 1-D grid.
struct UniformGrid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  double step() const { return points > 1 ? (max - min) / (points - 1) : 0.0; }
  double at(int k) const { return min + k * step(); }
  std::vector<double> values() const;
  void validate(const char* name) const;
};

/// Wigner density sampled on a quadrature grid, values(ip, ix) = W(x_ix, p_ip).
/// Quadratures are x = (b + b^dag)/sqrt(2), p = -i(b - b^dag)/sqrt(2), so the
/// vacuum is exp(-x^2 - p^2)/pi.
struct WignerGrid {
  UniformGrid x;
  UniformGrid p;
  Eigen::MatrixXd values;

  /// Riemann sum of W dx dp.
  double integral() const;
};

/// Wigner transform from the Laguerre-kernel series, evaluated with upward
/// recurrences. Displaced-frame states are shifted back to lab coordinates.
WignerGrid wigner(const DensityMatrix& rho, const UniformGrid& x,
                  const UniformGrid& p);

/// Default axis: 201 points spanning +-(sqrt(2 <b^dag b>) + 5) quadrature units.
UniformGrid default_wigner_axis(const DensityMatrix& rho);

/// Sum |W| dx dp - 1, clipped at zero.
double negativity_volume(const WignerGrid& w);

/// P(phi) per radian on phi_k = 2 pi k / n.
struct PhaseDistribution {
  std::vector<double> phi;
  std::vector<double> values;

  double integral() const;
  /// Location and value of the global maximum.
  double peak_position() const;
  double peak_height() const;
  /// Full width at half maximum around the main peak (radians).
  double peak_width() const;
  /// Number of strict local maxima on the periodic grid whose prominence
  /// exceeds rel_prominence * peak height.
  int count_peaks(double rel_prominence = 1e-3) const;
};

/// P(phi) = sum_{n,m} exp(i(m - n) phi) <n|rho|m> / 2 pi over the lab-frame
/// Fock basis; displaced-frame states are first re-expressed in the lab frame.
PhaseDistribution phase_distribution(const DensityMatrix& rho, int n_phi);

/// Tr[rho O].
Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);

/// <b>, <b^dag b>, <b^2> of the physical mode (frame shift included); the
/// moment <b^dag b> is evaluated with exact commutation relations.
struct Moments {
  Complex mean;
  double number;
  Complex second;
};
Moments moments(const DensityMatrix& rho);

/// sigma_ij = <{dX_i, dX_j}>/2 about the state's own mean, with
/// X1 = (db + db^dag)/sqrt(2), X2 = -i(db - db^dag)/sqrt(2).
Eigen::Matrix2d covariance_from_state(const DensityMatrix& rho);

/// Radial and tangential quadratures at the steady-state phase, normalized so
/// that a coherent amplitude R e^{i phi} gives <r> = R cos(phi - phi_ss) and
/// <r_perp> = -R sin(phi - phi_ss).
struct QuadratureFrame {
  double phi_ss = 0.0;

  Complex radial_weight() const;  ///< r = Re(conj(w) b) with w = e^{i phi_ss}
  OperatorMatrix r_op(const FockSpace& space) const;
  OperatorMatrix r_perp_op(const FockSpace& space) const;
};

struct PhaseDeviation {
  std::vector<double> delta_phi;  ///< -<r_perp> / R_ss
  std::vector<double> r_perp_mean;
  std::vector<double> r_perp_variance;
};

PhaseDeviation phase_deviation_series(std::span<const DensityMatrix> snapshots,
                                      const QuadratureFrame& frame,
                                      double r_ss);

}  // namespace qvdp
