#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aex/errors.hpp"
#include "aex/rational.hpp"

namespace aex {

// One feature's domain. Discrete kinds expose an ordered value list via
// size()/value_at(); Real is the only continuous kind.
struct Domain {
  enum class Kind { Real, Integer, Binary, Categorical, Quantized };

  Kind kind = Kind::Binary;
  Rat lo = 0, hi = 1;          // Real, Integer, Quantized bounds
  Rat step = 1;                // Quantized grid step (qs > 0)
  std::vector<Rat> values;     // Categorical, ascending

  static Domain real(const Rat& lo, const Rat& hi) {
    if (lo > hi) throw DomainError("real domain with lo > hi");
    Domain d;
    d.kind = Kind::Real;
    d.lo = lo;
    d.hi = hi;
    return d;
  }

  static Domain integer(const Rat& lo, const Rat& hi) {
    if (lo > hi) throw DomainError("integer domain with lo > hi");
    if (denominator(lo) != 1 || denominator(hi) != 1)
      throw DomainError("integer domain bounds must be integers");
    Domain d;
    d.kind = Kind::Integer;
    d.lo = lo;
    d.hi = hi;
    return d;
  }

  static Domain binary() {
    Domain d;
    d.kind = Kind::Binary;
    d.lo = 0;
    d.hi = 1;
    return d;
  }

  static Domain categorical(std::vector<Rat> vals) {
    if (vals.empty()) throw DomainError("categorical domain needs values");
    for (size_t i = 1; i < vals.size(); ++i)
      if (!(vals[i - 1] < vals[i]))
        throw DomainError("categorical values must be strictly ascending");
    Domain d;
    d.kind = Kind::Categorical;
    d.values = std::move(vals);
    d.lo = d.values.front();
    d.hi = d.values.back();
    return d;
  }

  static Domain quantized(const Rat& lo, const Rat& hi, const Rat& qs) {
    if (lo > hi) throw DomainError("quantized domain with lo > hi");
    if (qs <= 0) throw DomainError("quantization step must be positive");
    Domain d;
    d.kind = Kind::Quantized;
    d.lo = lo;
    d.hi = hi;
    d.step = qs;
    return d;
  }

  bool discrete() const { return kind != Kind::Real; }

  // Number of admissible values; discrete kinds only.
  uint64_t size() const {
    switch (kind) {
      case Kind::Binary: return 2;
      case Kind::Integer: return static_cast<uint64_t>(BigInt(rat_floor(hi) - rat_ceil(lo) + 1));
      case Kind::Categorical: return values.size();
      case Kind::Quantized: return static_cast<uint64_t>(rat_floor((hi - lo) / step)) + 1;
      case Kind::Real: break;
    }
    throw DomainError("size() on a continuous domain");
  }

  Rat value_at(uint64_t idx) const {
    switch (kind) {
      case Kind::Binary: return Rat(static_cast<int>(idx));
      case Kind::Integer: return Rat(BigInt(rat_ceil(lo) + BigInt(idx)));
      case Kind::Categorical: return values.at(idx);
      case Kind::Quantized: return lo + Rat(BigInt(idx)) * step;
      case Kind::Real: break;
    }
    throw DomainError("value_at() on a continuous domain");
  }

  std::optional<uint64_t> index_of(const Rat& v) const {
    switch (kind) {
      case Kind::Binary:
        if (v == 0) return 0;
        if (v == 1) return 1;
        return std::nullopt;
      case Kind::Integer: {
        if (denominator(v) != 1 || v < lo || v > hi) return std::nullopt;
        return static_cast<uint64_t>(BigInt(numerator(v) - rat_ceil(lo)));
      }
      case Kind::Categorical: {
        for (size_t i = 0; i < values.size(); ++i)
          if (values[i] == v) return i;
        return std::nullopt;
      }
      case Kind::Quantized: {
        if (v < lo || v > hi) return std::nullopt;
        Rat k = (v - lo) / step;
        if (denominator(k) != 1) return std::nullopt;
        return static_cast<uint64_t>(BigInt(numerator(k)));
      }
      case Kind::Real: break;
    }
    throw DomainError("index_of() on a continuous domain");
  }

  bool contains(const Rat& v) const {
    if (kind == Kind::Real) return lo <= v && v <= hi;
    return index_of(v).has_value();
  }

  // Smallest gap between distinct admissible values; discrete kinds only.
  Rat min_gap() const {
    switch (kind) {
      case Kind::Binary: return 1;
      case Kind::Integer: return 1;
      case Kind::Quantized: return step;
      case Kind::Categorical: {
        if (values.size() < 2) return 1;
        Rat g = values[1] - values[0];
        for (size_t i = 2; i < values.size(); ++i)
          g = rat_min(g, values[i] - values[i - 1]);
        return g;
      }
      case Kind::Real: break;
    }
    throw DomainError("min_gap() on a continuous domain");
  }

  std::string kind_name() const {
    switch (kind) {
      case Kind::Real: return "real";
      case Kind::Integer: return "integer";
      case Kind::Binary: return "binary";
      case Kind::Categorical: return "categorical";
      case Kind::Quantized: return "quantized";
    }
    return "?";
  }
};

// Per-feature closed interval bounds used to restrict queries to a
// region of the space.
struct BoxConstraint {
  std::vector<std::pair<Rat, Rat>> bounds;  // [lo, hi] per feature

  bool contains(const Point& x) const {
    if (x.size() != bounds.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i] < bounds[i].first || x[i] > bounds[i].second) return false;
    return true;
  }
};

// Product of per-feature domains.
struct FeatureSpace {
  std::vector<Domain> domains;

  size_t arity() const { return domains.size(); }

  bool all_discrete() const {
    for (const auto& d : domains)
      if (!d.discrete()) return false;
    return true;
  }

  void check_point(const Point& x) const {
    if (x.size() != domains.size())
      throw DimensionError("point arity " + std::to_string(x.size()) +
                           " != space arity " + std::to_string(domains.size()));
    for (size_t i = 0; i < x.size(); ++i)
      if (!domains[i].contains(x[i]))
        throw DomainError("feature " + std::to_string(i + 1) + " value " +
                          format_rat(x[i]) + " outside its domain");
  }

  bool contains(const Point& x) const {
    if (x.size() != domains.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!domains[i].contains(x[i])) return false;
    return true;
  }
};

}  // namespace aex
