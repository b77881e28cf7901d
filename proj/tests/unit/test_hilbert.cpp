// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "qvdp/error.hpp"
#include "qvdp/hilbert.hpp"

using namespace qvdp;

TEST_CASE("lab ladder operator entries") {
  const OperatorMatrix a = annihilation(FockSpace::lab(2));
  CHECK(a.rows() == 3);
  CHECK(a(0, 1) == Complex(1.0));
  CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK((a.cwiseAbs().array() > 0).count() == 2);
}

TEST_CASE("displaced operator is the lab matrix plus a multiple of identity") {
  const Complex c(2.0, 0.0);
  const OperatorMatrix lab = annihilation(FockSpace::lab(2));
  const OperatorMatrix shifted = annihilation(FockSpace::displaced(2, c));
  const OperatorMatrix expect = lab + c * OperatorMatrix::Identity(3, 3);
  CHECK((shifted - expect).norm() == 0.0);

  const Complex z(-1.5, 0.25);
  const OperatorMatrix s2 = annihilation(FockSpace::displaced(7, z));
  CHECK((s2 - annihilation(FockSpace::lab(7)) - z * OperatorMatrix::Identity(8, 8)).norm() == 0.0);
}

TEST_CASE("commutator is exact below the truncation edge") {
  const FockSpace s = FockSpace::lab(10);
  const OperatorMatrix a = annihilation(s);
  const OperatorMatrix comm = matmul(a, adjoint(a)) - matmul(adjoint(a), a);
  const OperatorMatrix defect = comm.topLeftCorner(10, 10) - OperatorMatrix::Identity(10, 10);
  CHECK(defect.norm() < 1e-13);
  // The top level carries the truncation artefact.
  CHECK(std::abs(comm(10, 10) - Complex(-10.0)) < 1e-12);
}

TEST_CASE("adjoint, number operator and products") {
  const FockSpace s2 = FockSpace::lab(2);
  const OperatorMatrix ad = adjoint(annihilation(s2));
  CHECK(ad(1, 0) == Complex(1.0));
  CHECK(std::abs(ad(2, 1) - std::sqrt(2.0)) < 1e-15);

  const FockSpace s = FockSpace::lab(12);
  const OperatorMatrix a = annihilation(s);
  const OperatorMatrix n = number_operator(s);
  CHECK((n - matmul(adjoint(a), a)).norm() < 1e-13);
  for (int k = 0; k <= 12; ++k) CHECK(n(k, k) == Complex(k));

  const OperatorMatrix b2 = matmul(annihilation(FockSpace::lab(3)), annihilation(FockSpace::lab(3)));
  CHECK(std::abs(b2(0, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(b2(1, 3) - std::sqrt(6.0)) < 1e-15);
}

TEST_CASE("invalid spaces and shapes are rejected") {
  CHECK_THROWS_AS(FockSpace::lab(1), InvalidArgument);
  CHECK_THROWS_AS(FockSpace::displaced(4, Complex(NAN, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(matmul(OperatorMatrix::Zero(2, 3), OperatorMatrix::Zero(2, 3)), InvalidArgument);
}

TEST_CASE("parameter validation names the field") {
  SystemParams p;
  p.gamma2 = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("gamma2"), InvalidArgument);
  p.gamma2 = 0.1;
  p.drive = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("F"), InvalidArgument);
  p.drive = 1.0;
  p.detuning = INFINITY;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("Delta"), InvalidArgument);
}
