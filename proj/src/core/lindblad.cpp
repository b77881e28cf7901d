// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvdp/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "ode.hpp"
#include "qvdp/error.hpp"

namespace qvdp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

SparseMatrix to_sparse(const MatrixXcd& m) {
  return m.sparseView(Complex(0.0), 1.0).pruned(Complex(0.0));
}

SparseMatrix identity(int n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

// vec(A X) = (I (x) A) vec(X).
SparseMatrix left(const MatrixXcd& a) {
  return Eigen::kroneckerProduct(identity(static_cast<int>(a.rows())),
                                 to_sparse(a))
      .eval();
}

// vec(X B) = (B^T (x) I) vec(X).
SparseMatrix right(const MatrixXcd& b) {
  return Eigen::kroneckerProduct(to_sparse(b.transpose()),
                                 identity(static_cast<int>(b.rows())))
      .eval();
}

SparseMatrix commutator_term(const MatrixXcd& h) {
  const Complex i(0.0, 1.0);
  return SparseMatrix(-i * left(h) + i * right(h));
}

// D[O] rho = O rho O^dag - {O^dag O, rho}/2, with O^dag O formed from the
// (truncated) matrix itself.
SparseMatrix dissipator(const MatrixXcd& op) {
  const MatrixXcd od_o = matmul(adjoint(op), op);
  SparseMatrix jump =
      Eigen::kroneckerProduct(to_sparse(op.conjugate()), to_sparse(op)).eval();
  return SparseMatrix(jump - 0.5 * left(od_o) - 0.5 * right(od_o));
}

void check_budget(int dim, const ResourceLimits& limits) {
  const double n = static_cast<double>(dim) * dim;
  // Matrix storage plus a banded-LU fill estimate (bandwidth ~ 2 dim).
  const double bytes = n * 25.0 * 20.0 + n * 8.0 * dim * 16.0;
  if (bytes > static_cast<double>(limits.max_bytes)) {
    std::ostringstream msg;
    msg << "n_max: superoperator for dimension " << dim << " needs ~"
        << static_cast<long long>(bytes / (1 << 20)) << " MiB, budget is "
        << (limits.max_bytes >> 20) << " MiB";
    throw ResourceError(msg.str());
  }
}

double max_abs(const MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Coefficients of a coherent state as seen from the space's frame, including
// the phase picked up by shifting the frame origin.
VectorXcd coherent_vector(const FockSpace& space, Complex amplitude) {
  const Complex local = amplitude - space.center();
  const int n = space.dim();
  VectorXcd c(n);
  c(0) = std::exp(-0.5 * std::norm(local));
  for (int k = 1; k < n; ++k) {
    c(k) = c(k - 1) * local / std::sqrt(static_cast<double>(k));
  }
  const double captured = c.squaredNorm();
  if (1.0 - captured > 1e-6) {
    std::ostringstream msg;
    msg << "n_max: coherent amplitude " << amplitude << " keeps only "
        << captured << " of its norm in a space of dimension " << n;
    throw DomainError(msg.str());
  }
  if (space.is_displaced()) {
    const double phase = -std::imag(space.center() * std::conj(local));
    c *= std::polar(1.0, phase);
  }
  return c;
}

double estimate_gap(const Eigen::SparseLU<SparseMatrix>& lu, Eigen::Index n,
                    int dim) {
  // Power iteration on the inverse of L restricted to traceless operators;
  // the bordered factorization solves L y = x, tr y = 0 when x[0] = 0.
  VectorXcd x = VectorXcd::Zero(n);
  for (Eigen::Index k = 1; k < n; ++k) {
    x(k) = Complex(std::cos(0.37 * k), std::sin(0.11 * k));
  }
  for (int d = 0; d < dim; ++d) x(d + static_cast<Eigen::Index>(d) * dim) = 0;
  double growth = 0.0;
  for (int it = 0; it < 12; ++it) {
    x(0) = 0;
    x /= x.norm();
    VectorXcd y = lu.solve(x);
    growth = y.norm();
    // Project back onto the traceless subspace.
    Complex tr = 0;
    for (int d = 0; d < dim; ++d) tr += y(d + static_cast<Eigen::Index>(d) * dim);
    for (int d = 0; d < dim; ++d)
      y(d + static_cast<Eigen::Index>(d) * dim) -= tr / static_cast<double>(dim);
    x = y;
  }
  return growth > 0 ? 1.0 / growth : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(FockSpace space, Eigen::MatrixXcd rho, bool)
    : space_(space), rho_(std::move(rho)) {
  if (rho_.rows() != space_.dim() || rho_.cols() != space_.dim()) {
    throw InvalidArgument("density matrix: dimension does not match space");
  }
}

DensityMatrix::DensityMatrix(FockSpace space, Eigen::MatrixXcd rho,
                             const StateTolerances& tol)
    : DensityMatrix(space, std::move(rho), true) {
  const double herm = hermiticity_defect();
  if (herm > tol.hermiticity) {
    std::ostringstream msg;
    msg << "density matrix: hermiticity defect " << herm;
    throw InvalidArgument(msg.str());
  }
  const Complex tr = trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream msg;
    msg << "density matrix: trace " << tr << " differs from 1";
    throw InvalidArgument(msg.str());
  }
  const double lmin = min_eigenvalue();
  if (lmin < tol.min_eigenvalue) {
    std::ostringstream msg;
    msg << "density matrix: minimum eigenvalue " << lmin;
    throw InvalidArgument(msg.str());
  }
}

DensityMatrix DensityMatrix::unchecked(FockSpace space, Eigen::MatrixXcd rho) {
  return DensityMatrix(space, std::move(rho), true);
}

double DensityMatrix::hermiticity_defect() const {
  return max_abs(rho_ - rho_.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  const MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double DensityMatrix::purity() const {
  return std::real((rho_ * rho_).trace());
}

DensityMatrix vacuum_state(const FockSpace& space) {
  return coherent_state(space, 0.0);
}

DensityMatrix fock_state(const FockSpace& space, int n) {
  if (space.is_displaced()) {
    throw InvalidArgument("fock_state: only defined in the lab frame");
  }
  if (n < 0 || n >= space.dim()) {
    throw InvalidArgument("fock_state: level outside the truncated space");
  }
  MatrixXcd rho = MatrixXcd::Zero(space.dim(), space.dim());
  rho(n, n) = 1.0;
  return DensityMatrix(space, rho);
}

DensityMatrix coherent_state(const FockSpace& space, Complex amplitude) {
  VectorXcd c = coherent_vector(space, amplitude);
  c.normalize();
  return DensityMatrix(space, c * c.adjoint());
}

DensityMatrix cat_state(const FockSpace& space, Complex center,
                        Complex offset) {
  VectorXcd psi =
      coherent_vector(space, center + offset) +
      coherent_vector(space, center - offset);
  psi.normalize();
  return DensityMatrix(space, psi * psi.adjoint());
}

int suggested_lab_truncation(const FockSpace& space) {
  if (!space.is_displaced()) return space.n_max();
  const double r = std::abs(space.center()) +
                   std::sqrt(static_cast<double>(space.dim())) + 6.0;
  return static_cast<int>(std::ceil(r * r));
}

DensityMatrix to_lab_frame(const DensityMatrix& rho, int n_max_lab) {
  const FockSpace lab = FockSpace::lab(n_max_lab);
  const int n_frame = rho.dim();
  const int n_lab = lab.dim();
  if (!rho.space().is_displaced()) {
    MatrixXcd out = MatrixXcd::Zero(n_lab, n_lab);
    const int m = std::min(n_lab, n_frame);
    out.topLeftCorner(m, m) = rho.matrix().topLeftCorner(m, m);
    return DensityMatrix::unchecked(lab, out);
  }
  // D(c) on an enlarged space; only the block mapping frame levels onto lab
  // levels is kept.
  const int n_big = std::max(n_lab, n_frame) + 40;
  const FockSpace big = FockSpace::lab(n_big - 1);
  const MatrixXcd a = ladder(big);
  const Complex c = rho.space().center();
  const MatrixXcd gen = c * a.adjoint() - std::conj(c) * a;
  const MatrixXcd disp = gen.exp();
  const MatrixXcd block = disp.topLeftCorner(n_lab, n_frame);
  MatrixXcd out = block * rho.matrix() * block.adjoint();
  const double kept = std::real(out.trace());
  if (std::abs(1.0 - kept) > 1e-6) {
    std::ostringstream msg;
    msg << "n_max_lab: lab-frame truncation " << n_max_lab << " keeps only "
        << kept << " of the state";
    throw DomainError(msg.str());
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::unchecked(lab, out);
}

// ---------------------------------------------------------------------------
// Liouvillian

Liouvillian::Liouvillian(FockSpace space, SystemParams params,
                         GeneratorKind kind, SparseMatrix matrix,
                         ResourceLimits limits)
    : space_(space),
      params_(params),
      kind_(kind),
      matrix_(std::move(matrix)),
      limits_(limits) {
  matrix_.makeCompressed();
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
  return unvectorize(matrix_ * vectorize(rho), dim());
}

double Liouvillian::norm1() const {
  double best = 0.0;
  for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      col += std::abs(it.value());
    }
    best = std::max(best, col);
  }
  return best;
}

double Liouvillian::trace_preservation_residual() const {
  const int n = dim();
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(size());
  for (int d = 0; d < n; ++d) t(d + static_cast<Eigen::Index>(d) * n) = 1.0;
  const Eigen::RowVectorXcd r = t * matrix_;
  const double scale = norm1();
  return scale > 0 ? r.cwiseAbs().maxCoeff() / scale : 0.0;
}

Liouvillian build_liouvillian(const SystemParams& params,
                              const FockSpace& space,
                              const ResourceLimits& limits) {
  params.validate();
  check_budget(space.dim(), limits);
  const Complex i(0.0, 1.0);
  const MatrixXcd b = annihilation(space);
  const MatrixXcd bd = adjoint(b);
  const MatrixXcd h =
      -params.detuning * matmul(bd, b) + i * params.drive * (b - bd);
  SparseMatrix l = commutator_term(h);
  l += params.gamma1 * dissipator(bd);
  l += params.gamma2 * dissipator(matmul(b, b));
  l.prune(Complex(0.0));
  return Liouvillian(space, params, GeneratorKind::Full, std::move(l), limits);
}

Liouvillian build_linearized_liouvillian(const SystemParams& params,
                                         Complex beta_ss, int n_max,
                                         const ResourceLimits& limits) {
  params.validate();
  const FockSpace space = FockSpace::lab(n_max);
  check_budget(space.dim(), limits);
  const Complex i(0.0, 1.0);
  const MatrixXcd a = ladder(space);
  const MatrixXcd ad = adjoint(a);
  const Complex beta2 = beta_ss * beta_ss;
  const MatrixXcd h =
      -params.detuning * matmul(ad, a) -
      i * (0.5 * params.gamma2) *
          (beta2 * matmul(ad, ad) - std::conj(beta2) * matmul(a, a));
  SparseMatrix l = commutator_term(h);
  l += params.gamma1 * dissipator(ad);
  l += 4.0 * params.gamma2 * std::norm(beta_ss) * dissipator(a);
  l.prune(Complex(0.0));
  return Liouvillian(space, params, GeneratorKind::Linearized, std::move(l),
                     limits);
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw InvalidArgument("unvectorize: size mismatch");
  }
  return Eigen::Map<const MatrixXcd>(v.data(), dim, dim);
}

// ---------------------------------------------------------------------------
// Steady state

DensityMatrix steady_state(const Liouvillian& L, SteadyStateReport* report) {
  const int dim = L.dim();
  const Eigen::Index n = L.size();
  const SparseMatrix& lm = L.matrix();

  // Row 0 of L replaced by the trace functional.
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(lm.nonZeros()) + dim);
  for (Eigen::Index k = 0; k < lm.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(lm, k); it; ++it) {
      if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int d = 0; d < dim; ++d) {
    trip.emplace_back(0, d + static_cast<Eigen::Index>(d) * dim, 1.0);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    int nsd = 2;
    if (n <= 1600) {
      Eigen::ComplexEigenSolver<MatrixXcd> es(MatrixXcd(lm), false);
      const double scale = L.norm1();
      nsd = static_cast<int>(
          (es.eigenvalues().array().abs() < 1e-9 * scale).count());
    }
    std::ostringstream msg;
    msg << "steady_state: trace-constrained system is singular ("
        << lu.lastErrorMessage() << "); null-space dimension " << nsd;
    throw SolverError(msg.str(), nsd);
  }

  const double scale = L.norm1();
  const double gap = estimate_gap(lu, n, dim);
  double tol = 1e-10;
  if (gap < 1e-3 * L.params().gamma1) tol *= 0.1;

  VectorXcd rhs = VectorXcd::Zero(n);
  rhs(0) = 1.0;
  VectorXcd x = lu.solve(rhs);

  auto finalize = [&](const VectorXcd& v) {
    MatrixXcd rho = unvectorize(v, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    return rho;
  };
  auto residual_of = [&](const MatrixXcd& rho) {
    return (lm * vectorize(rho)).norm() / scale;
  };

  MatrixXcd rho = finalize(x);
  double res = residual_of(rho);
  int steps = 0;
  while (res > tol && steps < 6) {
    const VectorXcd r = rhs - a * x;
    x += lu.solve(r);
    rho = finalize(x);
    res = residual_of(rho);
    ++steps;
  }
  if (report) {
    report->residual = res;
    report->tolerance = tol;
    report->gap_estimate = gap;
    report->refinement_steps = steps;
  }
  if (res > tol) {
    std::ostringstream msg;
    msg << "steady_state: residual " << res << " above tolerance " << tol
        << " after " << steps << " refinement steps";
    throw SolverError(msg.str(), 1);
  }
  return DensityMatrix(L.space(), rho);
}

DensityMatrix steady_state_eigen(const Liouvillian& L, int* null_space_dim) {
  if (L.size() > 4096) {
    throw ResourceError("n_max: dense eigen steady state limited to 4096 unknowns");
  }
  Eigen::ComplexEigenSolver<MatrixXcd> es(MatrixXcd(L.matrix()));
  if (es.info() != Eigen::Success) {
    throw SolverError("steady_state_eigen: eigendecomposition failed");
  }
  const auto mags = es.eigenvalues().array().abs().eval();
  Eigen::Index best = 0;
  mags.minCoeff(&best);
  if (null_space_dim) {
    *null_space_dim =
        static_cast<int>((mags < 1e-9 * L.norm1()).count());
  }
  MatrixXcd rho = unvectorize(es.eigenvectors().col(best), L.dim());
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(L.space(), rho);
}

// ---------------------------------------------------------------------------
// Time evolution

std::vector<Eigen::MatrixXcd> propagate(const Liouvillian& L,
                                        const Eigen::MatrixXcd& x0,
                                        std::span<const double> times,
                                        const EvolveOptions& options) {
  if (x0.rows() != L.dim() || x0.cols() != L.dim()) {
    throw InvalidArgument("propagate: operator dimension does not match");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0 || (k > 0 && times[k] < times[k - 1])) {
      throw InvalidArgument("times: must be nonnegative and increasing");
    }
  }
  detail::OdeOptions opt;
  opt.rtol = options.rtol;
  opt.atol = options.atol;
  opt.min_step = options.min_step;
  opt.max_step = options.max_step;

  const SparseMatrix& lm = L.matrix();
  std::vector<MatrixXcd> out(times.size());
  auto rhs = [&lm](double, const VectorXcd& y) -> VectorXcd { return lm * y; };
  detail::integrate_dopri5(rhs, 0.0, vectorize(x0), times, opt,
                           [&](std::size_t idx, const VectorXcd& y) {
                             out[idx] = unvectorize(y, L.dim());
                           });
  return out;
}

std::vector<DensityMatrix> evolve(const Liouvillian& L,
                                  const DensityMatrix& rho0,
                                  std::span<const double> times,
                                  const EvolveOptions& options) {
  if (!(rho0.space() == L.space())) {
    throw InvalidArgument("rho0: state space does not match the Liouvillian");
  }
  const auto raw = propagate(L, rho0.matrix(), times, options);
  std::vector<DensityMatrix> out;
  out.reserve(raw.size());
  const StateTolerances tol;
  const double g1 = L.params().gamma1;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    DensityMatrix snap = DensityMatrix::unchecked(L.space(), raw[k]);
    if (options.validate_snapshots) {
      const double drift = std::abs(snap.trace() - rho0.trace());
      const double herm = snap.hermiticity_defect();
      const double lmin = snap.min_eigenvalue();
      const double drift_tol = tol.trace * std::max(1.0, g1 * times[k]);
      if (drift > drift_tol || herm > tol.hermiticity ||
          lmin < tol.min_eigenvalue) {
        std::ostringstream msg;
        msg << "evolve: invariant violated at t = " << times[k]
            << " (trace drift " << drift << ", hermiticity defect " << herm
            << ", min eigenvalue " << lmin << ")";
        throw SolverError(msg.str());
      }
    }
    out.push_back(std::move(snap));
  }
  return out;
}

TruncationReport truncation_check(const DensityMatrix& rho, double threshold) {
  const int n = rho.dim();
  TruncationReport rep;
  rep.threshold = threshold;
  rep.top_population =
      std::real(rho.matrix()(n - 1, n - 1)) + std::real(rho.matrix()(n - 2, n - 2));
  rep.flagged = rep.top_population > threshold;
  return rep;
}

}  // namespace qvdp
