// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qvdp/params.hpp"
#include "qvdp/spectrum.hpp"

namespace qvdp {

/// Mean-field equation of motion:
/// d beta/dt = (i Delta + gamma1/2 - gamma2 |beta|^2) beta - F.
Complex classical_rhs(const SystemParams& p, Complex beta);

/// Jacobian of classical_rhs in (Re beta, Im beta) coordinates.
Eigen::Matrix2d drift_matrix(const SystemParams& p, Complex beta);

/// Quadrature diffusion matrix of the linearized fluctuations,
/// (gamma1/2 + 2 gamma2 |beta|^2) * I.
Eigen::Matrix2d diffusion_matrix(const SystemParams& p, Complex beta);

struct FixedPoint {
  Complex beta;
  Complex lambda1;  ///< -2 gamma2 u + gamma1/2 + sqrt(gamma2^2 u^2 - Delta^2)
  Complex lambda2;  ///< same with the minus sign
  bool stable = false;
  double residual = 0.0;  ///< |classical_rhs(beta)|

  double radius() const { return std::abs(beta); }
  double phase() const { return std::arg(beta); }
};

struct FixedPointSet {
  std::vector<FixedPoint> points;  ///< sorted by increasing |beta|
  /// Free-running limit-cycle radius sqrt(gamma1 / 2 gamma2), set when F = 0.
  std::optional<double> limit_cycle_radius;

  int stable_count() const;
  /// The stable point; when rounding produces several, the one with the
  /// smallest residual.
  std::optional<FixedPoint> stable() const;
};

/// All fixed points from the real roots u = |beta|^2 of
/// gamma2^2 u^3 - gamma1 gamma2 u^2 + (gamma1^2/4 + Delta^2) u - F^2 = 0.
FixedPointSet classical_fixed_points(const SystemParams& p);

/// Completes a fixed point from a trial amplitude (Newton polish and
/// classification).
FixedPoint make_fixed_point(const SystemParams& p, Complex beta);

struct BogoliubovData {
  double A = 0.0;      ///< |gamma2 beta^2| / 2
  double theta = 0.0;  ///< A e^{i theta} = -i gamma2 beta^2 / 2
  double gamma = 0.0;  ///< 4 gamma2 |beta|^2 - gamma1
  double n_bar = 0.0;  ///< gamma1 / gamma
  bool overdamped = false;
  // Defined only when Delta^2 > 4 A^2.
  std::optional<double> chi;
  std::optional<double> omega_eff;
  std::optional<double> gamma_up;
  std::optional<double> gamma_down;
  std::optional<double> gamma_deph;
  std::optional<double> n_eff;
  std::optional<double> quality;  ///< omega_eff / gamma_deph
};

/// Throws InstabilityError when gamma <= 0.
BogoliubovData bogoliubov(const SystemParams& p, Complex beta);

struct CovarianceResult {
  Eigen::Matrix2d sigma;
  Eigen::Vector2d eigenvalues;  ///< ascending
  double asymmetry = 1.0;       ///< max / min eigenvalue
  bool below_shot_noise = false;
  double principal_angle = 0.0;  ///< direction of the major axis, radians
  double residual = 0.0;         ///< |M s + s M^T + D| / |D|
};

/// Stationary covariance of the linearized fluctuations around beta.
/// Throws InstabilityError when the drift matrix is not Hurwitz.
CovarianceResult lyapunov_covariance(const SystemParams& p, Complex beta);

/// Closed-form fluctuation spectrum
/// S(w) = Gamma [g^2 + n_bar((Gamma/2)^2 + g^2 + (w + Delta)^2)]
///        / |Omega_eff^2 - (w + i Gamma/2)^2|^2,  g = gamma2 |beta|^2.
/// Throws InstabilityError when gamma <= 0.
SpectrumTrace effective_spectrum(const SystemParams& p, Complex beta,
                                 std::span<const double> omega);

struct PhaseEquationParams {
  double gamma = 0.0;     ///< 4 gamma2 R^2 - gamma1
  double omega_sq = 0.0;  ///< Delta^2 + (gamma2 R^2 - gamma1/2)(3 gamma2 R^2 - gamma1/2)
  /// omega_sq - gamma^2 / 4, equal to Delta^2 - gamma2^2 R^4.
  double omega_eff_sq() const { return omega_sq - 0.25 * gamma * gamma; }
};

PhaseEquationParams second_order_phase_params(const SystemParams& p,
                                              Complex beta);

enum class RegimeLabel {
  NoStableFixedPoint,
  Overdamped,
  Underdamped,
  QuantumCoherent,
};

std::string_view to_string(RegimeLabel label);

struct EffectiveSummary {
  SystemParams params;
  RegimeLabel regime = RegimeLabel::NoStableFixedPoint;
  FixedPointSet fixed_points;
  std::optional<FixedPoint> stable;
  std::optional<BogoliubovData> rates;
  std::optional<CovarianceResult> covariance;
  std::optional<PhaseEquationParams> phase;
};

EffectiveSummary classify_regime(const SystemParams& p);

}  // namespace qvdp
