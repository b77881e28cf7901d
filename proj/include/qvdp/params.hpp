// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

namespace qvdp {

using Complex = std::complex<double>;

/// Rates of the driven quantum Van der Pol oscillator.
///
/// All rates share one unit; the CLI works with gamma1 = 1.
struct SystemParams {
  double gamma1 = 1.0;    ///< one-quantum gain
  double gamma2 = 0.1;    ///< two-quantum loss
  double drive = 0.0;     ///< drive strength F
  double detuning = 0.0;  ///< Delta = omega_d - omega_0

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

}  // namespace qvdp
