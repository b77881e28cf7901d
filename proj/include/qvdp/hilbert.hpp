// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "qvdp/params.hpp"

namespace qvdp {

/// Dense operator on a truncated Fock space.
using OperatorMatrix = Eigen::MatrixXcd;

/// Truncated Fock space {|0>, ..., |n_max>}, optionally representing
/// fluctuations around a displaced center (b = center + a).
class FockSpace {
 public:
  static FockSpace lab(int n_max);
  static FockSpace displaced(int n_max, Complex center);

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }
  bool is_displaced() const { return displaced_; }
  /// Frame center; zero in the lab frame.
  Complex center() const { return center_; }

  bool operator==(const FockSpace&) const = default;

 private:
  FockSpace(int n_max, bool displaced, Complex center);

  int n_max_;
  bool displaced_;
  Complex center_;
};

/// Physical annihilation operator b in the space's frame: the ladder matrix a
/// in the lab frame, center * I + a in a displaced frame.
OperatorMatrix annihilation(const FockSpace& space);

/// The bare ladder matrix a regardless of frame.
OperatorMatrix ladder(const FockSpace& space);

/// a^dagger a, i.e. diag(0, 1, ..., n_max).
OperatorMatrix number_operator(const FockSpace& space);

OperatorMatrix adjoint(const OperatorMatrix& op);

/// Matrix product with a dimension check.
OperatorMatrix matmul(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

}  // namespace qvdp
