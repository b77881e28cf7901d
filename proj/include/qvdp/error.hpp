// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace qvdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: invalid parameters, mismatched dimensions, bad grids.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A requested problem does not fit in the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A numerical solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what,
                       std::optional<int> null_space_dim = std::nullopt)
      : Error(what), null_space_dim_(null_space_dim) {}

  /// Estimated dimension of the Liouvillian null space when the failure was
  /// caused by a degenerate steady state.
  std::optional<int> null_space_dim() const { return null_space_dim_; }

 private:
  std::optional<int> null_space_dim_;
};

/// The linearized model is unstable (damping Gamma <= 0).
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression was evaluated outside its validity domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qvdp
