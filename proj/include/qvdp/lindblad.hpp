// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qvdp/hilbert.hpp"
#include "qvdp/params.hpp"

namespace qvdp {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Tolerances of the DensityMatrix invariants.
struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;
};

/// Density matrix on a truncated Fock space. Construction validates
/// hermiticity, unit trace and positivity.
class DensityMatrix {
 public:
  DensityMatrix(FockSpace space, Eigen::MatrixXcd rho,
                const StateTolerances& tol = {});

  /// Skips validation; used for intermediate results that are checked by the
  /// caller.
  static DensityMatrix unchecked(FockSpace space, Eigen::MatrixXcd rho);

  const FockSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  int dim() const { return space_.dim(); }

  Complex trace() const { return rho_.trace(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  double purity() const;

 private:
  DensityMatrix(FockSpace space, Eigen::MatrixXcd rho, bool);

  FockSpace space_;
  Eigen::MatrixXcd rho_;
};

DensityMatrix vacuum_state(const FockSpace& space);
DensityMatrix fock_state(const FockSpace& space, int n);

/// Pure coherent state |amplitude> (lab-frame amplitude). Throws DomainError
/// when the truncated space captures less than 1 - 1e-6 of its norm.
DensityMatrix coherent_state(const FockSpace& space, Complex amplitude);

/// Even superposition |center + offset> + |center - offset>, normalized.
/// Amplitudes are lab-frame; displaced spaces get the correct relative phase.
DensityMatrix cat_state(const FockSpace& space, Complex center, Complex offset);

/// Re-expresses a displaced-frame state in a lab-frame space with the given
/// truncation; lab-frame inputs are re-truncated.
DensityMatrix to_lab_frame(const DensityMatrix& rho, int n_max_lab);

/// Lab-frame truncation large enough to hold a displaced-frame state.
int suggested_lab_truncation(const FockSpace& space);

/// Which generator a Liouvillian implements.
enum class GeneratorKind {
  Full,        ///< the full nonlinear master equation
  Linearized,  ///< quadratic fluctuation model around a classical fixed point
};

/// Memory guard applied before any superoperator allocation.
struct ResourceLimits {
  std::size_t max_bytes = std::size_t{3} << 30;
};

/// Superoperator acting on column-stacked density matrices.
class Liouvillian {
 public:
  Liouvillian(FockSpace space, SystemParams params, GeneratorKind kind,
              SparseMatrix matrix, ResourceLimits limits);

  const FockSpace& space() const { return space_; }
  const SystemParams& params() const { return params_; }
  GeneratorKind kind() const { return kind_; }
  const SparseMatrix& matrix() const { return matrix_; }
  const ResourceLimits& limits() const { return limits_; }
  int dim() const { return space_.dim(); }
  Eigen::Index size() const { return matrix_.rows(); }

  /// L applied to vec(rho).
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

  /// max_j sum_i |L_ij|.
  double norm1() const;

  /// |vec(I)^T L|_inf / |L|_1.
  double trace_preservation_residual() const;

 private:
  FockSpace space_;
  SystemParams params_;
  GeneratorKind kind_;
  SparseMatrix matrix_;
  ResourceLimits limits_;
};

/// Full master equation: H = -Delta b^dag b + i F (b - b^dag), jump operators
/// sqrt(gamma1) b^dag and sqrt(gamma2) b^2, with b taken in the space's frame.
Liouvillian build_liouvillian(const SystemParams& params, const FockSpace& space,
                              const ResourceLimits& limits = {});

/// Quadratic fluctuation model for delta b around the classical fixed point
/// beta_ss: H = -Delta db^dag db - i gamma2/2 (beta^2 db^dag^2 - h.c.), with
/// gain gamma1 D[db^dag] and loss 4 gamma2 |beta|^2 D[db]. The space must be a
/// lab frame (it is the fluctuation Fock space).
Liouvillian build_linearized_liouvillian(const SystemParams& params,
                                         Complex beta_ss, int n_max,
                                         const ResourceLimits& limits = {});

/// Column-stacking helpers.
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim);

struct SteadyStateReport {
  double residual = 0.0;       ///< |L vec(rho)| / |L|_1
  double tolerance = 0.0;      ///< residual target actually used
  double gap_estimate = 0.0;   ///< smallest nonzero |eigenvalue| estimate
  int refinement_steps = 0;
};

/// Unique steady state from the trace-constrained linear system.
DensityMatrix steady_state(const Liouvillian& L,
                           SteadyStateReport* report = nullptr);

/// Steady state from a dense eigendecomposition (cross-check, small spaces).
/// Sets null_space_dim to the number of eigenvalues with |lambda| below
/// 1e-9 |L|_1.
DensityMatrix steady_state_eigen(const Liouvillian& L,
                                 int* null_space_dim = nullptr);

struct EvolveOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  bool validate_snapshots = true;
};

/// Density matrices at the requested (nonnegative, increasing) times, from an
/// adaptive Dormand-Prince integration of the vectorized master equation. No
/// trace renormalization is applied.
std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                  std::span<const double> times,
                                  const EvolveOptions& options = {});

/// Same integrator on an arbitrary operator (not necessarily a state).
std::vector<Eigen::MatrixXcd> propagate(const Liouvillian& L,
                                        const Eigen::MatrixXcd& x0,
                                        std::span<const double> times,
                                        const EvolveOptions& options = {});

struct TruncationReport {
  double top_population = 0.0;  ///< weight on the two highest Fock levels
  bool flagged = false;         ///< top_population > threshold
  double threshold = 1e-6;
};

TruncationReport truncation_check(const DensityMatrix& rho,
                                  double threshold = 1e-6);

}  // namespace qvdp
