// Copyright 2026 The qvdp Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace qvdp_cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

// Drops trailing "; comment" and "# comment" fragments from values.
std::string strip_comment(const std::string& v) {
  const auto pos = v.find_first_of(";#");
  return trim(pos == std::string::npos ? v : v.substr(0, pos));
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + s + "'");
  }
  return v;
}

}  // namespace

Config Config::load(const std::string& path) {
  Config c;
  try {
    pt::read_ini(path, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return c;
}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  try {
    pt::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return c;
}

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
  if (!v) return std::nullopt;
  return strip_comment(*v);
}

bool Config::has(const std::string& key) const { return raw(key).has_value(); }

double Config::number(const std::string& key, std::optional<double> fallback) {
  used_.insert(key);
  const auto v = raw(key);
  if (!v) {
    if (!fallback) throw ConfigError(key + ": required key is missing");
    record(key, format_number(*fallback));
    return *fallback;
  }
  const double d = parse_double(key, *v);
  record(key, format_number(d));
  return d;
}

int Config::integer(const std::string& key, std::optional<int> fallback) {
  used_.insert(key);
  const auto v = raw(key);
  if (!v) {
    if (!fallback) throw ConfigError(key + ": required key is missing");
    record(key, std::to_string(*fallback));
    return *fallback;
  }
  int i = 0;
  const auto* end = v->data() + v->size();
  const auto res = std::from_chars(v->data(), end, i);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + *v + "'");
  }
  record(key, std::to_string(i));
  return i;
}

bool Config::boolean(const std::string& key, std::optional<bool> fallback) {
  used_.insert(key);
  const auto v = raw(key);
  bool b = false;
  if (!v) {
    if (!fallback) throw ConfigError(key + ": required key is missing");
    b = *fallback;
  } else if (*v == "true" || *v == "1" || *v == "yes") {
    b = true;
  } else if (*v == "false" || *v == "0" || *v == "no") {
    b = false;
  } else {
    throw ConfigError(key + ": expected true or false, got '" + *v + "'");
  }
  record(key, b ? "true" : "false");
  return b;
}

std::string Config::text(const std::string& key, std::optional<std::string> fallback) {
  used_.insert(key);
  const auto v = raw(key);
  if (!v) {
    if (!fallback) throw ConfigError(key + ": required key is missing");
    record(key, *fallback);
    return *fallback;
  }
  record(key, *v);
  return *v;
}

std::vector<double> Config::numbers(const std::string& key) {
  const std::string s = text(key);
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
  return out;
}

void Config::reject_unused() const {
  for (const auto& [section, body] : tree_) {
    if (body.empty()) {
      if (!used_.count(section)) throw ConfigError(section + ": unknown key");
      continue;
    }
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      if (!used_.count(key)) throw ConfigError(key + ": unknown key");
    }
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace qvdp_cli
