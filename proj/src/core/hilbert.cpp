// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/hilbert.hpp"

#include <cmath>
#include <sstream>

#include "qvdp/error.hpp"

namespace qvdp {

void SystemParams::validate() const {
  auto fail = [](const char* field, const char* why) {
    std::ostringstream msg;
    msg << field << ": " << why;
    throw InvalidArgument(msg.str());
  };
  if (!std::isfinite(gamma1)) fail("gamma1", "must be finite");
  if (!std::isfinite(gamma2)) fail("gamma2", "must be finite");
  if (!std::isfinite(drive)) fail("F", "must be finite");
  if (!std::isfinite(detuning)) fail("Delta", "must be finite");
  if (gamma1 <= 0) fail("gamma1", "must be > 0");
  if (gamma2 <= 0) fail("gamma2", "must be > 0");
  if (drive < 0) fail("F", "must be >= 0");
}

FockSpace::FockSpace(int n_max, bool displaced, Complex center)
    : n_max_(n_max), displaced_(displaced), center_(center) {
  if (n_max < 2) {
    throw InvalidArgument("n_max: must be >= 2");
  }
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag())) {
    throw InvalidArgument("center: must be finite");
  }
}

FockSpace FockSpace::lab(int n_max) { return FockSpace(n_max, false, 0.0); }

FockSpace FockSpace::displaced(int n_max, Complex center) {
  return FockSpace(n_max, true, center);
}

OperatorMatrix ladder(const FockSpace& space) {
  const int n = space.dim();
  OperatorMatrix a = OperatorMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    a(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  return a;
}

OperatorMatrix annihilation(const FockSpace& space) {
  OperatorMatrix b = ladder(space);
  if (space.is_displaced()) {
    b.diagonal().array() += space.center();
  }
  return b;
}

OperatorMatrix number_operator(const FockSpace& space) {
  const int n = space.dim();
  OperatorMatrix num = OperatorMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    num(k, k) = static_cast<double>(k);
  }
  return num;
}

OperatorMatrix adjoint(const OperatorMatrix& op) { return op.adjoint(); }

OperatorMatrix matmul(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    std::ostringstream msg;
    msg << "matmul: dimension mismatch (" << lhs.rows() << "x" << lhs.cols()
        << " times " << rhs.rows() << "x" << rhs.cols() << ")";
    throw InvalidArgument(msg.str());
  }
  return lhs * rhs;
}

}  // namespace qvdp
