#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "aex/distance.hpp"
#include "aex/errors.hpp"
#include "aex/model.hpp"

namespace aex {

constexpr uint64_t kDefaultEnumCap = 1u << 20;

// Odometer over a fully discrete feature space.
struct EnumerableSpace {
  const FeatureSpace* space = nullptr;
  std::vector<uint64_t> sizes;
  std::vector<std::vector<Rat>> tables;
  uint64_t total = 1;

  static EnumerableSpace make(const FeatureSpace& s, uint64_t cap = kDefaultEnumCap) {
    EnumerableSpace e;
    e.space = &s;
    for (const auto& d : s.domains) {
      if (!d.discrete()) throw DomainError("enumeration needs a discrete space");
      e.sizes.push_back(d.size());
      if (e.total > cap / std::max<uint64_t>(e.sizes.back(), 1))
        throw TooLargeError("space exceeds enumeration cap of " + std::to_string(cap) +
                            " points");
      e.total *= e.sizes.back();
    }
    e.tables = value_tables(s);
    return e;
  }

  Point materialize(const std::vector<uint32_t>& key) const {
    Point x(key.size());
    for (size_t i = 0; i < key.size(); ++i) x[i] = tables[i][key[i]];
    return x;
  }
};

// Exhaustive adversarial-example search: lexicographically first point x
// with x_i = v_i on the fixed set, dist(x, v) <= eps, and a different
// prediction. Fully independent of the encoding/solver stack.
inline std::optional<Point> brute_find_aex(const Classifier& m, const Instance& inst,
                                           const DistanceSpec& spec,
                                           const std::set<size_t>& fixed,
                                           const BoxConstraint* box = nullptr,
                                           uint64_t cap = kDefaultEnumCap) {
  auto e = EnumerableSpace::make(m.space, cap);
  const size_t arity = m.space.arity();
  std::vector<uint32_t> key(arity, 0);
  std::vector<bool> is_fixed(arity, false);
  for (size_t f : fixed) {
    if (f >= arity) throw PreconditionError("fixed-feature index out of range");
    auto idx = m.space.domains[f].index_of(inst.v[f]);
    if (!idx) throw DomainError("instance value outside its domain");
    key[f] = static_cast<uint32_t>(*idx);
    is_fixed[f] = true;
  }
  uint64_t total_free = 1;
  for (size_t f = 0; f < arity; ++f)
    if (!is_fixed[f]) total_free *= e.sizes[f];
  for (uint64_t it = 0; it < total_free; ++it) {
    Point x = e.materialize(key);
    ClassLabel lbl = evaluate_by_index(m, key, e.tables);
    if ((!box || box->contains(x)) && within_ball(x, inst.v, spec) &&
        !lbl.is_abstain() && lbl != inst.c)
      return x;
    for (size_t i = arity; i-- > 0;) {  // last free feature fastest
      if (is_fixed[i]) continue;
      if (++key[i] < e.sizes[i]) break;
      key[i] = 0;
    }
  }
  return std::nullopt;
}

// Complete explanation listing by exhaustive search, m <= 16 features.
struct BruteListing {
  std::vector<std::set<size_t>> axps, cxps;
};

inline BruteListing brute_enumerate_explanations(const Classifier& m, const Instance& inst,
                                                 const DistanceSpec& spec,
                                                 uint64_t cap = kDefaultEnumCap) {
  const size_t arity = m.space.arity();
  if (arity > 16) throw TooLargeError("listing oracle handles at most 16 features");
  auto e = EnumerableSpace::make(m.space, cap);

  const uint32_t full = (1u << arity) - 1;
  std::vector<char> agree_mask_seen(static_cast<size_t>(1) << arity, 0);
  std::vector<char> diff_mask_seen(static_cast<size_t>(1) << arity, 0);

  std::vector<uint32_t> key(arity, 0);
  std::vector<uint32_t> vkey(arity);
  for (size_t f = 0; f < arity; ++f) {
    auto idx = m.space.domains[f].index_of(inst.v[f]);
    if (!idx) throw DomainError("instance value outside its domain");
    vkey[f] = static_cast<uint32_t>(*idx);
  }
  uint64_t visited = 0;
  for (;;) {
    Point x = e.materialize(key);
    ClassLabel lbl = evaluate_by_index(m, key, e.tables);
    if (within_ball(x, inst.v, spec) && !lbl.is_abstain() && lbl != inst.c) {
      uint32_t agree = 0;
      for (size_t f = 0; f < arity; ++f)
        if (key[f] == vkey[f]) agree |= 1u << f;
      agree_mask_seen[agree] = 1;
      diff_mask_seen[full & ~agree] = 1;
    }
    if (++visited == e.total) break;
    size_t i = arity;
    while (i > 0) {
      --i;
      if (++key[i] < e.sizes[i]) break;
      key[i] = 0;
    }
  }

  // sup[X] = some adversarial point agrees with v on a superset of X
  std::vector<char> sup = agree_mask_seen;
  for (size_t b = 0; b < arity; ++b)
    for (uint32_t x = 0; x <= full; ++x)
      if (!(x & (1u << b)) && sup[x | (1u << b)]) sup[x] = 1;
  // sub[Y] = some adversarial point changes only features inside Y
  std::vector<char> sub = diff_mask_seen;
  for (size_t b = 0; b < arity; ++b)
    for (uint32_t y = 0; y <= full; ++y)
      if ((y & (1u << b)) && sub[y & ~(1u << b)]) sub[y] = 1;

  BruteListing out;
  auto to_set = [arity](uint32_t mask) {
    std::set<size_t> s;
    for (size_t f = 0; f < arity; ++f)
      if (mask & (1u << f)) s.insert(f);
    return s;
  };
  for (uint32_t x = 0; x <= full; ++x) {
    if (sup[x]) continue;  // not even weak
    bool minimal = true;
    for (size_t f = 0; f < arity && minimal; ++f)
      if ((x & (1u << f)) && !sup[x & ~(1u << f)]) minimal = false;
    if (minimal) out.axps.push_back(to_set(x));
  }
  for (uint32_t y = 0; y <= full; ++y) {
    if (!sub[y]) continue;
    bool minimal = true;
    for (size_t f = 0; f < arity && minimal; ++f)
      if ((y & (1u << f)) && sub[y & ~(1u << f)]) minimal = false;
    if (minimal) out.cxps.push_back(to_set(y));
  }
  return out;
}

}  // namespace aex
