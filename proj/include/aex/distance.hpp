#pragma once

#include <cmath>
#include <cstdint>

#include "aex/domain.hpp"
#include "aex/errors.hpp"
#include "aex/rational.hpp"

namespace aex {

enum class Norm { L0, L1, L2, Linf };

inline const char* norm_name(Norm p) {
  switch (p) {
    case Norm::L0: return "l0";
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::Linf: return "linf";
  }
  return "?";
}

struct DistanceSpec {
  Norm p = Norm::Linf;
  Rat epsilon = 0;
};

namespace detail {
inline void check_same_arity(const Point& x, const Point& y) {
  if (x.size() != y.size())
    throw DimensionError("distance between points of arity " + std::to_string(x.size()) +
                         " and " + std::to_string(y.size()));
}
}  // namespace detail

inline Rat distance_l0(const Point& x, const Point& y) {
  detail::check_same_arity(x, y);
  int n = 0;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) ++n;
  return Rat(n);
}

inline Rat distance_l1(const Point& x, const Point& y) {
  detail::check_same_arity(x, y);
  Rat s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += rat_abs(x[i] - y[i]);
  return s;
}

inline Rat distance_l2_squared(const Point& x, const Point& y) {
  detail::check_same_arity(x, y);
  Rat s = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    Rat d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

inline Rat distance_linf(const Point& x, const Point& y) {
  detail::check_same_arity(x, y);
  Rat s = 0;
  for (size_t i = 0; i < x.size(); ++i) s = rat_max(s, rat_abs(x[i] - y[i]));
  return s;
}

// Numeric distance value (l2 goes through sqrt).
inline double distance(const Point& x, const Point& y, Norm p) {
  switch (p) {
    case Norm::L0: return to_double(distance_l0(x, y));
    case Norm::L1: return to_double(distance_l1(x, y));
    case Norm::L2: return std::sqrt(to_double(distance_l2_squared(x, y)));
    case Norm::Linf: return to_double(distance_linf(x, y));
  }
  return 0;
}

// Exact membership test for the closed ball of radius spec.epsilon
// around v (l2 compares squared values).
inline bool within_ball(const Point& x, const Point& v, const DistanceSpec& spec) {
  switch (spec.p) {
    case Norm::L0: return distance_l0(x, v) <= spec.epsilon;
    case Norm::L1: return distance_l1(x, v) <= spec.epsilon;
    case Norm::L2: return distance_l2_squared(x, v) <= spec.epsilon * spec.epsilon;
    case Norm::Linf: return distance_linf(x, v) <= spec.epsilon;
  }
  return false;
}

// Number of coordinate changes an l0 budget allows.
inline int64_t l0_budget(const Rat& epsilon) {
  if (epsilon < 0) return 0;
  return static_cast<int64_t>(rat_floor(epsilon));
}

// Smallest epsilon for which the ball around any point contains a
// second point of the (fully discrete) space.
inline Rat minimum_meaningful_epsilon(const FeatureSpace& space, Norm p) {
  if (space.arity() == 0) throw NotApplicableError("empty feature space");
  for (const auto& d : space.domains)
    if (!d.discrete())
      throw NotApplicableError("meaningful-epsilon floor needs a discrete space");
  if (p == Norm::L0) return Rat(1);
  bool any = false;
  Rat g = 0;
  for (const auto& d : space.domains) {
    if (d.size() < 2) continue;
    Rat dg = d.min_gap();
    if (!any || dg < g) g = dg;
    any = true;
  }
  if (!any)
    throw NotApplicableError("space has a single point; no epsilon is meaningful");
  return g;  // one grid step: same floor for l1, l2, linf
}

}  // namespace aex
