// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

// INI-style run configuration. Every key read is recorded with its resolved
// value so outputs can echo the full configuration; keys never read are
// reported as errors.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace qvdp_cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config load(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt);
  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt);
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt);
  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& key);

  /// Throws ConfigError naming the first key that was never read.
  void reject_unused() const;

  /// Resolved key/value pairs in key order.
  const std::map<std::string, std::string>& resolved() const { return resolved_; }
  void record(const std::string& key, const std::string& value) { resolved_[key] = value; }

 private:
  std::optional<std::string> raw(const std::string& key) const;

  boost::property_tree::ptree tree_;
  std::set<std::string> used_;
  std::map<std::string, std::string> resolved_;
};

/// Shortest text that round-trips to the same double.
std::string format_number(double v);

}  // namespace qvdp_cli
