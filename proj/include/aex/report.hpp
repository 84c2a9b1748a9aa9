#pragma once

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aex/rational.hpp"

namespace aex {

inline std::string format_approx(const Rat& v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, to_double(v));
  return buf;
}

// Exact value, with a decimal approximation appended when the exact
// form is a fraction.
inline std::string pretty_rat(const Rat& v) {
  std::string s = format_rat(v);
  if (s.find('/') != std::string::npos) s += " (~" + format_approx(v) + ")";
  return s;
}

inline std::string format_point(const Point& x) {
  std::string s = "(";
  for (size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += format_rat(x[i]);
  }
  return s + ")";
}

// Feature sets print 1-based, matching the usual numbering of x1..xm.
inline std::string format_feature_set(const std::set<size_t>& s) {
  std::string out = "{";
  bool first = true;
  for (size_t f : s) {
    if (!first) out += ", ";
    out += std::to_string(f + 1);
    first = false;
  }
  return out + "}";
}

// Ordered key/value report with two renderings: `structured` is the
// stable machine contract, `human` a readable variant of the same rows.
struct Report {
  std::vector<std::pair<std::string, std::string>> rows;

  void add(std::string key, std::string value) {
    rows.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, const Rat& value) { add(std::move(key), format_rat(value)); }
  void add(std::string key, const Point& value) {
    add(std::move(key), format_point(value));
  }
  void add(std::string key, int64_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, uint64_t value) {
    add(std::move(key), std::to_string(value));
  }

  std::string structured() const {
    std::string out;
    for (const auto& [k, v] : rows) out += k + "=" + v + "\n";
    return out;
  }

  std::string human() const {
    size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    std::string out;
    for (const auto& [k, v] : rows) {
      out += "  " + k;
      out.append(width - k.size(), ' ');
      out += "  " + v + "\n";
    }
    return out;
  }
};

}  // namespace aex
