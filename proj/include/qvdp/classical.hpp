// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qvdp/params.hpp"

namespace qvdp {

struct ClassicalTrajectory {
  std::vector<double> times;
  std::vector<Complex> beta;

  std::vector<double> radius() const;
  /// arg beta, unwrapped along the trajectory.
  std::vector<double> phase() const;
};

/// Integrates the mean-field equation from beta0 (at t = 0) and samples it at
/// the requested nondecreasing times. Throws SolverError on blow-up.
ClassicalTrajectory integrate_classical(const SystemParams& p, Complex beta0,
                                        std::span<const double> times,
                                        double rtol = 1e-10);

/// F^2 at which two fixed points merge, one value per root of the
/// discriminant condition. Requires gamma1^2 >= 12 Delta^2.
struct SaddleNodeBoundary {
  double f2_outer = 0.0;  ///< merger at gamma2 u = (2 gamma1 + s) / 6
  double f2_inner = 0.0;  ///< merger at gamma2 u = (2 gamma1 - s) / 6
};
SaddleNodeBoundary boundary_saddle_node(const SystemParams& p, double delta);

/// F^2 where the stable node turns into a focus; requires |Delta| > gamma1/4.
double boundary_belyakov_devaney(const SystemParams& p, double delta);

/// F^2 where the stable focus loses stability; requires |Delta| > gamma1/4.
double boundary_hopf(const SystemParams& p, double delta);

enum class CellLabel {
  SyncOverdamped,
  SyncUnderdamped,
  LimitCycle,
  PhaseSelfOscillation,
  Unresolved,
};

std::string_view to_string(CellLabel label);

struct DiagramCell {
  double drive = 0.0;
  double detuning = 0.0;
  CellLabel label = CellLabel::Unresolved;
  int winding = 0;       ///< turns of beta about the origin per period
  double period = 0.0;   ///< attractor period, 0 for fixed points
  int fixed_points = 0;
};

struct AttractorOptions {
  double transient = 50.0;   ///< in units of 1/gamma1
  double window = 50.0;      ///< observation window after the transient
  double budget = 1000.0;    ///< total integration time before giving up
  double recurrence_tol = 1e-6;
  int workers = 0;
};

/// Follows the trajectory from beta0 to its attractor and classifies it.
DiagramCell classify_attractor(const SystemParams& p, Complex beta0,
                               const AttractorOptions& options = {});

/// Cells in row-major order (F outer, Delta inner). gamma1 and gamma2 are
/// taken from base; cells with a stable fixed point get the analytic label.
std::vector<DiagramCell> scan_phase_diagram(const SystemParams& base,
                                            std::span<const double> drives,
                                            std::span<const double> detunings,
                                            const AttractorOptions& options = {});

}  // namespace qvdp
