// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "qvdp/effective.hpp"
#include "qvdp/error.hpp"
#include "qvdp/lindblad.hpp"
#include "qvdp/observables.hpp"

using namespace qvdp;
using Eigen::MatrixXcd;

namespace {

SystemParams params(double g2, double f, double d) {
  SystemParams p;
  p.gamma2 = g2;
  p.drive = f;
  p.detuning = d;
  return p;
}

MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m + m.adjoint();
}

MatrixXcd random_state(int n, unsigned seed) {
  const MatrixXcd h = random_hermitian(n, seed);
  MatrixXcd rho = h * h;
  return rho / rho.trace();
}

MatrixXcd dissipate(const MatrixXcd& c, const MatrixXcd& rho) {
  const MatrixXcd cd = c.adjoint();
  return c * rho * cd - 0.5 * (cd * c * rho + rho * cd * c);
}

// Master-equation right-hand side written out with dense operator products.
MatrixXcd direct_rhs(const SystemParams& p, const FockSpace& s, const MatrixXcd& rho) {
  const MatrixXcd b = annihilation(s);
  const MatrixXcd bd = b.adjoint();
  const Complex i(0.0, 1.0);
  const MatrixXcd h = -p.detuning * bd * b + i * p.drive * (b - bd);
  return -i * (h * rho - rho * h) + p.gamma1 * dissipate(bd, rho) +
         p.gamma2 * dissipate(b * b, rho);
}

MatrixXcd dense(const Liouvillian& L) { return MatrixXcd(L.matrix()); }

}  // namespace

TEST_CASE("superoperator matches the direct operator form") {
  const SystemParams p = params(0.3, 1.7, -0.8);
  for (const FockSpace& s : {FockSpace::lab(7), FockSpace::displaced(7, Complex(1.2, -0.4))}) {
    const Liouvillian L = build_liouvillian(p, s);
    const MatrixXcd rho = random_hermitian(s.dim(), 3);
    const MatrixXcd expect = direct_rhs(p, s, rho);
    CHECK((L.apply(rho) - expect).norm() < 1e-12 * expect.norm());
  }
}

TEST_CASE("column stacking round trip") {
  const MatrixXcd m = random_hermitian(5, 11);
  const Eigen::VectorXcd v = vectorize(m);
  CHECK(v(1) == m(1, 0));
  CHECK(v(5) == m(0, 1));
  CHECK((unvectorize(v, 5) - m).norm() == 0.0);
}

TEST_CASE("trace is preserved for arbitrary Hermitian input") {
  const SystemParams p = params(0.1, 4.0, 1.8);
  for (int n : {4, 10, 20}) {
    const Liouvillian L = build_liouvillian(p, FockSpace::lab(n));
    CHECK(L.trace_preservation_residual() < 1e-13);
    for (unsigned seed = 0; seed < 3; ++seed) {
      const MatrixXcd rho = random_hermitian(n + 1, seed);
      CHECK(std::abs(L.apply(rho).trace()) < 1e-11 * rho.norm() * L.norm1());
    }
  }
  const Liouvillian lin = build_linearized_liouvillian(p, Complex(2.0, 1.0), 12);
  CHECK(lin.trace_preservation_residual() < 1e-13);
}

TEST_CASE("spectrum lies in the closed left half-plane with one zero mode") {
  for (const SystemParams& p : {params(0.1, 0.0, 0.0), params(0.5, 2.0, 1.0), params(0.1, 4.0, 1.8)}) {
    const Liouvillian L = build_liouvillian(p, FockSpace::lab(6));
    Eigen::ComplexEigenSolver<MatrixXcd> es(dense(L));
    const Eigen::VectorXd re = es.eigenvalues().real();
    CHECK(re.maxCoeff() < 1e-10 * L.norm1());
    int zeros = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      if (std::abs(es.eigenvalues()(k)) < 1e-9 * L.norm1()) ++zeros;
    CHECK(zeros == 1);
  }
}

TEST_CASE("steady state agrees with the eigenvector solution") {
  const SystemParams p = params(0.2, 1.5, 0.7);
  const Liouvillian L = build_liouvillian(p, FockSpace::lab(14));
  SteadyStateReport rep;
  const DensityMatrix a = steady_state(L, &rep);
  int nulls = -1;
  const DensityMatrix b = steady_state_eigen(L, &nulls);
  CHECK(nulls == 1);
  CHECK((a.matrix() - b.matrix()).norm() < 1e-9);
  CHECK(rep.residual <= rep.tolerance);
  CHECK(rep.gap_estimate > 0.0);
  CHECK(std::abs(a.trace() - 1.0) < 1e-12);
  CHECK(a.min_eigenvalue() > -1e-10);
}

TEST_CASE("undriven steady state has no coherence") {
  const Liouvillian L = build_liouvillian(params(0.1, 0.0, 0.7), FockSpace::lab(30));
  const DensityMatrix rho = steady_state(L);
  CHECK(std::abs(moments(rho).mean) < 1e-10);
  // Off-diagonal elements vanish identically.
  MatrixXcd off = rho.matrix();
  off.diagonal().setZero();
  CHECK(off.norm() < 1e-10);
  // Mean photon number close to the free limit-cycle value gamma1 / 2 gamma2.
  CHECK(moments(rho).number == doctest::Approx(5.0).epsilon(0.15));
}

TEST_CASE("lab and displaced frames describe the same steady state") {
  const SystemParams p = params(0.1, 4.0, 1.8);
  const auto fp = classical_fixed_points(p).stable();
  REQUIRE(fp);
  const DensityMatrix lab = steady_state(build_liouvillian(p, FockSpace::lab(60)));
  const DensityMatrix disp =
      steady_state(build_liouvillian(p, FockSpace::displaced(50, fp->beta)));
  const Moments ml = moments(lab);
  const Moments md = moments(disp);
  CHECK(std::abs(ml.mean - md.mean) < 1e-6);
  CHECK(std::abs(ml.number - md.number) < 1e-6);
  CHECK(std::abs(ml.second - md.second) < 1e-6);
  CHECK(truncation_check(lab).top_population < 1e-10);
  CHECK(truncation_check(disp).top_population < 1e-10);
}

TEST_CASE("quantum mean follows the classical fixed point at large amplitude") {
  for (double d : {0.0, 0.5, 1.0}) {
    const SystemParams p = params(0.1, 10.0, d);
    const auto fp = classical_fixed_points(p).stable();
    REQUIRE(fp);
    const DensityMatrix rho =
        steady_state(build_liouvillian(p, FockSpace::displaced(30, fp->beta)));
    const Complex mean = moments(rho).mean;
    CHECK(std::abs(mean - fp->beta) < 0.15 * std::abs(fp->beta));
  }
}

TEST_CASE("evolution leaves the steady state fixed") {
  const SystemParams p = params(0.2, 1.0, 0.5);
  const Liouvillian L = build_liouvillian(p, FockSpace::lab(16));
  const DensityMatrix rho = steady_state(L);
  const std::vector<double> t{0.0, 1.0, 10.0};
  const auto out = evolve(L, rho, t);
  REQUIRE(out.size() == 3);
  for (const auto& s : out) CHECK((s.matrix() - rho.matrix()).norm() < 1e-8);
}

TEST_CASE("adaptive evolution matches fixed-step RK4") {
  const SystemParams p = params(0.4, 1.3, -0.6);
  const FockSpace s = FockSpace::lab(7);
  const Liouvillian L = build_liouvillian(p, s);
  const MatrixXcd Ld = dense(L);
  const MatrixXcd rho0 = random_state(s.dim(), 5);
  Eigen::VectorXcd v = vectorize(rho0);
  const double t_end = 2.0;
  const int steps = 20000;
  const double h = t_end / steps;
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXcd k1 = Ld * v;
    const Eigen::VectorXcd k2 = Ld * (v + 0.5 * h * k1);
    const Eigen::VectorXcd k3 = Ld * (v + 0.5 * h * k2);
    const Eigen::VectorXcd k4 = Ld * (v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const std::vector<double> t{0.0, t_end};
  const auto out = evolve(L, DensityMatrix(s, rho0), t);
  CHECK((out[0].matrix() - rho0).norm() < 1e-14);
  CHECK((vectorize(out[1].matrix()) - v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("undriven growth from vacuum is monotonic") {
  const SystemParams p = params(0.1, 0.0, 0.0);
  const FockSpace s = FockSpace::lab(30);
  const Liouvillian L = build_liouvillian(p, s);
  std::vector<double> t;
  for (int k = 0; k <= 40; ++k) t.push_back(0.25 * k);
  const auto out = evolve(L, vacuum_state(s), t);
  double prev = -1.0;
  for (const auto& rho : out) {
    const double n = moments(rho).number;
    CHECK(n >= prev - 1e-12);
    prev = n;
    CHECK(std::abs(rho.trace() - 1.0) < 1e-9);
  }
}

TEST_CASE("truncation check flags a space that is too small") {
  const SystemParams p = params(0.1, 10.0, 0.0);
  const DensityMatrix small = steady_state(build_liouvillian(p, FockSpace::lab(5)));
  const TruncationReport rep = truncation_check(small);
  CHECK(rep.flagged);
  CHECK(rep.top_population > 1e-6);
  const DensityMatrix ok = steady_state(build_liouvillian(p, FockSpace::displaced(30, -5.0)));
  CHECK_FALSE(truncation_check(ok).flagged);
}

TEST_CASE("state constructors") {
  const FockSpace s = FockSpace::lab(40);
  const DensityMatrix f = fock_state(s, 3);
  CHECK(moments(f).number == doctest::Approx(3.0));
  CHECK(f.purity() == doctest::Approx(1.0));

  const Complex alpha(1.5, -0.5);
  const DensityMatrix c = coherent_state(s, alpha);
  CHECK(std::abs(moments(c).mean - alpha) < 1e-10);
  CHECK(moments(c).number == doctest::Approx(std::norm(alpha)).epsilon(1e-10));

  // Even cat: only even Fock levels populated, mean amplitude zero.
  const DensityMatrix cat = cat_state(s, 0.0, Complex(2.0, 0.0));
  double odd = 0.0;
  for (int k = 1; k < s.dim(); k += 2) odd += std::real(cat.matrix()(k, k));
  CHECK(odd < 1e-14);
  CHECK(std::abs(moments(cat).mean) < 1e-12);
  const double tanh4 = std::tanh(4.0);
  CHECK(moments(cat).number == doctest::Approx(4.0 * tanh4).epsilon(1e-10));

  // Displaced cat matches the lab-frame one after the frame change.
  const Complex center(0.8, 0.3);
  const DensityMatrix cd = cat_state(FockSpace::displaced(40, center), center, Complex(0.0, 2.0));
  const DensityMatrix cl = cat_state(s, center, Complex(0.0, 2.0));
  CHECK((to_lab_frame(cd, 40).matrix() - cl.matrix()).norm() < 1e-8);
}

TEST_CASE("frame change maps coherent states onto coherent states") {
  const Complex center(2.0, -1.0);
  const Complex alpha(2.5, 0.5);
  const DensityMatrix d = coherent_state(FockSpace::displaced(30, center), alpha);
  const DensityMatrix l = coherent_state(FockSpace::lab(50), alpha);
  const DensityMatrix back = to_lab_frame(d, 50);
  CHECK((back.matrix() - l.matrix()).norm() < 1e-9);
  CHECK(suggested_lab_truncation(d.space()) >= 30);
  CHECK_THROWS_AS(to_lab_frame(coherent_state(FockSpace::displaced(20, 6.0), 6.0), 5), DomainError);
}

TEST_CASE("density matrix validation") {
  const FockSpace s = FockSpace::lab(3);
  MatrixXcd bad = MatrixXcd::Zero(4, 4);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(DensityMatrix(s, bad), InvalidArgument);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(s, bad), InvalidArgument);
  CHECK_THROWS_AS(fock_state(FockSpace::displaced(3, 1.0), 0), InvalidArgument);
  CHECK_THROWS_AS(fock_state(s, 4), InvalidArgument);
}

TEST_CASE("errors carry the offending key") {
  CHECK_THROWS_WITH_AS(coherent_state(FockSpace::lab(5), 4.0), doctest::Contains("n_max"), DomainError);
  ResourceLimits tiny;
  tiny.max_bytes = 1 << 20;
  CHECK_THROWS_WITH_AS(build_liouvillian(params(0.1, 1.0, 0.0), FockSpace::lab(60), tiny),
                       doctest::Contains("n_max"), ResourceError);
  CHECK_THROWS_WITH_AS(build_liouvillian(params(-0.1, 1.0, 0.0), FockSpace::lab(6)),
                       doctest::Contains("gamma2"), InvalidArgument);
}
