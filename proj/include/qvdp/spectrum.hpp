// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "qvdp/lindblad.hpp"
#include "qvdp/observables.hpp"

namespace qvdp {

/// Incoherent emission spectrum S(omega) per unit angular frequency, with the
/// elastic weight |<b>|^2 reported separately.
struct SpectrumTrace {
  std::vector<double> omega;
  std::vector<double> values;
  double coherent_weight = 0.0;
  /// Indices whose resolvent solve failed; their values are NaN.
  std::vector<std::size_t> failed;

  /// Trapezoidal sum of S d omega / 2 pi plus the coherent weight.
  double sum_rule() const;
  /// Local maxima with prominence above rel_prominence * max S, refined by a
  /// parabola through the three grid points around each maximum.
  std::vector<double> peak_positions(double rel_prominence = 0.01) const;
};

/// Local maxima of y(x) on a nonperiodic grid, as in SpectrumTrace.
std::vector<double> find_peaks(std::span<const double> x,
                               std::span<const double> y,
                               double rel_prominence);

/// 2048 points spanning +-4 * scale.
UniformGrid default_omega_grid(double scale);

struct SpectrumOptions {
  int workers = 0;  ///< 0 picks the hardware concurrency
};

/// S(omega) = 2 Re int_0^inf dt e^{i omega t} <db^dag(t) db(0)>, evaluated as
/// -2 Re Tr[db^dag (L + i omega)^{-1} (db rho_ss)] with db = b - <b>_ss.
SpectrumTrace spectrum_full(const Liouvillian& L, const DensityMatrix& rho_ss,
                            std::span<const double> omega,
                            const SpectrumOptions& options = {});

/// <b^dag(t) b(0)> = Tr[b^dag e^{L t}(b rho_ss)] at the requested times; with
/// subtract_mean the fluctuation operator db is used on both sides.
std::vector<Complex> correlation_function(const Liouvillian& L,
                                          const DensityMatrix& rho_ss,
                                          std::span<const double> times,
                                          bool subtract_mean = false,
                                          const EvolveOptions& options = {});

}  // namespace qvdp
