#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aex/distance.hpp"
#include "aex/errors.hpp"
#include "aex/model.hpp"

namespace aex {

// Exact interval analysis of linear/guarded-piecewise bodies over boxes,
// used where spaces are continuous (or too large to enumerate/encode).

namespace cf {

struct Ival {
  Rat lo, hi;
  bool lo_open = false, hi_open = false;
};

// Tightest attainable extremes of one feature inside an interval.
struct FeatExt {
  Rat min_v, max_v;
  bool min_att = true, max_att = true;
  Rat width = 0;  // interval width, for inward shifts

  Rat pick_any() const {
    if (min_att) return min_v;
    if (max_att) return max_v;
    return (min_v + max_v) / 2;
  }
};

inline std::optional<FeatExt> feature_extremes(const Domain& d, const Ival& iv) {
  if (iv.lo > iv.hi) return std::nullopt;
  if (iv.lo == iv.hi && (iv.lo_open || iv.hi_open)) return std::nullopt;
  FeatExt e;
  if (d.kind == Domain::Kind::Real) {
    Rat lo = rat_max(iv.lo, d.lo), hi = rat_min(iv.hi, d.hi);
    bool lo_open = iv.lo_open && iv.lo >= d.lo, hi_open = iv.hi_open && iv.hi <= d.hi;
    if (lo > hi || (lo == hi && (lo_open || hi_open))) return std::nullopt;
    e.min_v = lo;
    e.min_att = !lo_open;
    e.max_v = hi;
    e.max_att = !hi_open;
    e.width = hi - lo;
    return e;
  }
  // Discrete: smallest/largest grid value inside the interval.
  std::optional<Rat> lo_val, hi_val;
  if (d.kind == Domain::Kind::Categorical) {
    for (const Rat& v : d.values) {
      if (v < iv.lo || (iv.lo_open && v == iv.lo)) continue;
      if (v > iv.hi || (iv.hi_open && v == iv.hi)) break;
      if (!lo_val) lo_val = v;
      hi_val = v;
    }
  } else {
    const Rat step = d.kind == Domain::Kind::Binary ? Rat(1) : d.min_gap();
    const Rat base = d.kind == Domain::Kind::Binary ? Rat(0) : (d.kind == Domain::Kind::Integer ? Rat(BigInt(rat_ceil(d.lo))) : d.lo);
    const uint64_t n = d.size();
    // lowest index with value inside
    Rat lo_cut = rat_max(iv.lo, d.lo);
    BigInt klo = rat_ceil((lo_cut - base) / step);
    if (iv.lo_open && base + Rat(klo) * step == iv.lo) ++klo;
    if (klo < 0) klo = 0;
    Rat hi_cut = rat_min(iv.hi, d.hi);
    BigInt khi = rat_floor((hi_cut - base) / step);
    if (iv.hi_open && base + Rat(khi) * step == iv.hi) --khi;
    if (khi >= BigInt(n)) khi = BigInt(n) - 1;
    if (klo > khi) return std::nullopt;
    lo_val = base + Rat(klo) * step;
    hi_val = base + Rat(khi) * step;
  }
  if (!lo_val) return std::nullopt;
  e.min_v = *lo_val;
  e.max_v = *hi_val;
  e.width = e.max_v - e.min_v;
  return e;
}

struct Box {
  std::vector<Ival> ivals;
};

inline Box full_box(const FeatureSpace& space) {
  Box b;
  for (const auto& d : space.domains) b.ivals.push_back({d.lo, d.hi, false, false});
  return b;
}

// Range of w.x - bias over the box, with attainability and witnesses.
struct LinRange {
  bool empty = true;
  Rat inf, sup;
  bool inf_att = true, sup_att = true;
  Point argmin, argmax;
  std::vector<bool> argmin_open, argmax_open;  // coordinate sits on an open bound
};

inline LinRange linear_range(const std::vector<Rat>& w, const Rat& bias,
                             const FeatureSpace& space, const Box& box) {
  LinRange r;
  const size_t m = space.arity();
  r.argmin.assign(m, Rat(0));
  r.argmax.assign(m, Rat(0));
  r.argmin_open.assign(m, false);
  r.argmax_open.assign(m, false);
  r.inf = -bias;
  r.sup = -bias;
  for (size_t f = 0; f < m; ++f) {
    auto e = feature_extremes(space.domains[f], box.ivals[f]);
    if (!e) return r;  // empty box
    const Rat& wf = f < w.size() ? w[f] : Rat(0);
    if (wf == 0) {
      r.argmin[f] = r.argmax[f] = e->pick_any();
      continue;
    }
    if (wf > 0) {
      r.inf += wf * e->min_v;
      r.inf_att = r.inf_att && e->min_att;
      r.argmin[f] = e->min_v;
      r.argmin_open[f] = !e->min_att;
      r.sup += wf * e->max_v;
      r.sup_att = r.sup_att && e->max_att;
      r.argmax[f] = e->max_v;
      r.argmax_open[f] = !e->max_att;
    } else {
      r.inf += wf * e->max_v;
      r.inf_att = r.inf_att && e->max_att;
      r.argmin[f] = e->max_v;
      r.argmin_open[f] = !e->max_att;
      r.sup += wf * e->min_v;
      r.sup_att = r.sup_att && e->min_att;
      r.argmax[f] = e->min_v;
      r.argmax_open[f] = !e->min_att;
    }
  }
  r.empty = false;
  return r;
}

// Moves open-bound coordinates strictly inside the box, spending less
// than `margin` of score in the direction that hurts.
inline Point shift_inward(const std::vector<Rat>& w, const FeatureSpace& space, const Box& box,
                          const Point& base, const std::vector<bool>& open_flags,
                          const Rat& margin) {
  size_t k = 0;
  for (bool o : open_flags)
    if (o) ++k;
  if (k == 0) return base;
  Point out = base;
  for (size_t f = 0; f < open_flags.size(); ++f) {
    if (!open_flags[f]) continue;
    auto e = feature_extremes(space.domains[f], box.ivals[f]);
    const Rat wf = rat_abs(w[f]);
    Rat delta = margin / (Rat(2) * Rat(static_cast<int64_t>(k)) * wf);
    delta = rat_min(delta, e->width / 2);
    out[f] = base[f] == e->min_v ? Rat(base[f] + delta) : Rat(base[f] - delta);
  }
  return out;
}

enum class CfState { Found, None, Unknown };

struct CfResult {
  CfState state = CfState::None;
  Point witness;
  std::string reason;

  static CfResult found(Point w) { return {CfState::Found, std::move(w), ""}; }
  static CfResult none() { return {CfState::None, {}, ""}; }
  static CfResult unknown(std::string why) { return {CfState::Unknown, {}, std::move(why)}; }
};

// Witness with score >= 0 (class 1) inside the box, if one exists.
inline CfResult reach_ge(const std::vector<Rat>& w, const Rat& bias, const FeatureSpace& space,
                         const Box& box) {
  auto r = linear_range(w, bias, space, box);
  if (r.empty) return CfResult::none();
  if (r.sup > 0) {
    if (r.sup_att) return CfResult::found(r.argmax);
    return CfResult::found(shift_inward(w, space, box, r.argmax, r.argmax_open, r.sup));
  }
  if (r.sup == 0 && r.sup_att) return CfResult::found(r.argmax);
  return CfResult::none();
}

// Witness with score < 0 (class 0) inside the box, if one exists.
inline CfResult reach_lt(const std::vector<Rat>& w, const Rat& bias, const FeatureSpace& space,
                         const Box& box) {
  auto r = linear_range(w, bias, space, box);
  if (r.empty) return CfResult::none();
  if (r.inf < 0) {
    if (r.inf_att) return CfResult::found(r.argmin);
    return CfResult::found(shift_inward(w, space, box, r.argmin, r.argmin_open, -r.inf));
  }
  return CfResult::none();
}

enum class AtomState { True, False, Mixed };

inline AtomState atom_state(const GuardAtom& g, const FeatureSpace& space, const Box& box) {
  auto r = linear_range(g.weights, g.bias, space, box);
  if (r.empty) return AtomState::True;  // vacuous on an empty box
  const bool inf_pos = r.inf > 0 || (r.inf == 0 && !r.inf_att);   // all s > 0
  const bool sup_neg = r.sup < 0 || (r.sup == 0 && !r.sup_att);   // all s < 0
  switch (g.rel) {
    case Rel::Ge:
      if (r.inf >= 0) return AtomState::True;
      if (sup_neg) return AtomState::False;
      return AtomState::Mixed;
    case Rel::Gt:
      if (inf_pos) return AtomState::True;
      if (r.sup <= 0) return AtomState::False;
      return AtomState::Mixed;
    case Rel::Le:
      if (r.sup <= 0) return AtomState::True;
      if (inf_pos) return AtomState::False;
      return AtomState::Mixed;
    case Rel::Lt:
      if (sup_neg) return AtomState::True;
      if (r.inf >= 0) return AtomState::False;
      return AtomState::Mixed;
    case Rel::Eq:
      if (r.inf == 0 && r.sup == 0 && r.inf_att && r.sup_att) return AtomState::True;
      if (sup_neg || inf_pos) return AtomState::False;
      return AtomState::Mixed;
  }
  return AtomState::Mixed;
}

inline bool box_nonempty(const FeatureSpace& space, const Box& box) {
  for (size_t f = 0; f < space.arity(); ++f)
    if (!feature_extremes(space.domains[f], box.ivals[f])) return false;
  return true;
}

inline CfResult exists_label_ne(const Classifier& m, const Box& box, int avoid, int depth);

inline CfResult branch_search(const Classifier& m, const PiecewiseBody& body, size_t bi,
                              const Box& box, int avoid, int depth) {
  if (depth > 512) return CfResult::unknown("split depth limit");
  if (!box_nonempty(m.space, box)) return CfResult::none();
  if (bi >= body.branches.size())
    return CfResult::none();  // guards are total by construction
  const auto& br = body.branches[bi];

  const GuardAtom* mixed = nullptr;
  for (const auto& atom : br.guard) {
    switch (atom_state(atom, m.space, box)) {
      case AtomState::False:
        return branch_search(m, body, bi + 1, box, avoid, depth + 1);
      case AtomState::Mixed:
        if (!mixed) mixed = &atom;
        break;
      case AtomState::True:
        break;
    }
  }
  if (mixed) {
    size_t f = 0;
    size_t nz = 0;
    for (size_t i = 0; i < mixed->weights.size(); ++i)
      if (mixed->weights[i] != 0) {
        f = i;
        ++nz;
      }
    if (nz != 1)
      return CfResult::unknown("guard atom spans several features over this region");
    const Rat theta = mixed->bias / mixed->weights[f];
    Box below = box, at = box, above = box;
    auto& bl = below.ivals[f];
    if (theta < bl.hi || (theta == bl.hi && !bl.hi_open)) {
      bl.hi = theta;
      bl.hi_open = true;
    }
    auto& av = above.ivals[f];
    if (theta > av.lo || (theta == av.lo && !av.lo_open)) {
      av.lo = theta;
      av.lo_open = true;
    }
    at.ivals[f] = {theta, theta, false, false};
    const Ival& orig = box.ivals[f];
    const bool at_inside = !(theta < orig.lo || theta > orig.hi ||
                             (theta == orig.lo && orig.lo_open) ||
                             (theta == orig.hi && orig.hi_open));
    CfResult acc = CfResult::none();
    for (const Box* piece : {&below, &at, &above}) {
      if (piece == &at && !at_inside) continue;
      auto r = branch_search(m, body, bi, *piece, avoid, depth + 1);
      if (r.state == CfState::Found) return r;
      if (r.state == CfState::Unknown) acc = r;
    }
    return acc;
  }
  // Guard holds across the whole box: the branch body decides.
  return exists_label_ne(*br.sub, box, avoid, depth + 1);
}

inline CfResult exists_label_ne(const Classifier& m, const Box& box, int avoid, int depth) {
  if (depth > 512) return CfResult::unknown("split depth limit");
  if (!box_nonempty(m.space, box)) return CfResult::none();
  if (const auto* lb = std::get_if<LinearBody>(&m.body)) {
    if (avoid == 1) return reach_lt(lb->weights, lb->bias, m.space, box);
    if (avoid == 0) return reach_ge(lb->weights, lb->bias, m.space, box);
    // Any prediction differs from an out-of-range class.
    auto r = linear_range(lb->weights, lb->bias, m.space, box);
    if (r.empty) return CfResult::none();
    return CfResult::found(r.inf_att ? r.argmin
                                     : shift_inward(lb->weights, m.space, box, r.argmin,
                                                    r.argmin_open, Rat(1)));
  }
  if (const auto* pw = std::get_if<PiecewiseBody>(&m.body))
    return branch_search(m, *pw, 0, box, avoid, depth + 1);
  return CfResult::unknown("interval analysis handles linear and guarded bodies only");
}

}  // namespace cf

}  // namespace aex
