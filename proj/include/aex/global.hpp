#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aex/brute.hpp"
#include "aex/closedform.hpp"
#include "aex/distance.hpp"
#include "aex/encode.hpp"
#include "aex/errors.hpp"
#include "aex/model.hpp"
#include "aex/robustness.hpp"
#include "aex/solver.hpp"

namespace aex {

struct NontrivialWitness {
  Point a, b;
  ClassLabel la, lb;
};

// Finds two points with different predictions, proves the classifier
// constant (TrivialClassifierError), or gives up (UnknownResultError).
inline NontrivialWitness find_nontrivial_witness(const Classifier& m,
                                                 const QueryOptions& opts = {}) {
  const FeatureSpace& S = m.space;
  const size_t arity = S.arity();
  if (arity == 0) throw PreconditionError("empty feature space");

  auto low_val = [&](size_t f) {
    const Domain& d = S.domains[f];
    return d.discrete() ? d.value_at(0) : d.lo;
  };
  auto high_val = [&](size_t f) {
    const Domain& d = S.domains[f];
    return d.discrete() ? d.value_at(d.size() - 1) : d.hi;
  };
  auto mid_val = [&](size_t f) {
    const Domain& d = S.domains[f];
    return d.discrete() ? d.value_at(d.size() / 2) : (d.lo + d.hi) / 2;
  };

  Point p0(arity);
  for (size_t f = 0; f < arity; ++f) p0[f] = low_val(f);
  const ClassLabel l0 = evaluate(m, p0);

  auto hit = [&](const Point& x) {
    return NontrivialWitness{p0, x, l0, evaluate(m, x)};
  };

  // cheap deterministic probes
  {
    std::vector<Point> probes;
    Point hi(arity), md(arity);
    for (size_t f = 0; f < arity; ++f) hi[f] = high_val(f), md[f] = mid_val(f);
    probes.push_back(hi);
    probes.push_back(md);
    for (size_t f = 0; f < arity; ++f) {
      Point q = p0;
      q[f] = high_val(f);
      probes.push_back(std::move(q));
    }
    for (const Point& q : probes)
      if (evaluate(m, q) != l0) return hit(q);
  }

  if (const auto* lk = std::get_if<LookupBody>(&m.body)) {
    for (const auto& [key, cls] : lk->table)
      if (cls != l0.idx) {
        Point x(arity);
        for (size_t f = 0; f < arity; ++f) x[f] = S.domains[f].value_at(key[f]);
        return hit(x);
      }
    throw TrivialClassifierError("every table entry carries the same class");
  }

  // interval analysis proves constancy or finds a witness for linear trees
  {
    auto r = cf::exists_label_ne(m, cf::full_box(S), l0.idx, 0);
    if (r.state == cf::CfState::Found) return hit(r.witness);
    if (r.state == cf::CfState::None)
      throw TrivialClassifierError("every point receives the same label");
  }

  if (S.all_discrete()) {
    try {
      Formula F;
      encode_inputs(F, S, Copy::X);
      auto inds = encode_classifier(F, m, Copy::X);
      encode_class_is(F, inds, l0.idx, false);
      SolveResult r = solve(F, opts.budget);
      if (r.status == SolveStatus::Sat) {
        Point x = decode(r, F.vars, Copy::X, S);
        if (evaluate(m, x) == l0)
          throw SoundnessError("claimed witness keeps the prediction");
        return hit(x);
      }
      if (r.status == SolveStatus::Unsat)
        throw TrivialClassifierError("every point receives the same label");
      throw UnknownResultError("nontriviality undecided within the solver budget");
    } catch (const EncodingError&) {
    }
    try {
      auto e = EnumerableSpace::make(S, opts.enum_cap);
      std::vector<uint32_t> key(arity, 0);
      for (uint64_t it = 0; it < e.total; ++it) {
        Point x = e.materialize(key);
        if (evaluate(m, x) != l0) return hit(x);
        for (size_t f = arity; f-- > 0;) {
          if (++key[f] < e.sizes[f]) break;
          key[f] = 0;
        }
      }
      throw TrivialClassifierError("every point receives the same label");
    } catch (const TooLargeError&) {
    }
  }
  throw UnknownResultError("cannot decide whether the classifier is constant");
}

struct TransitionBracket {
  Point below, above;  // predictions differ; linf gap at most the tolerance
  ClassLabel l_below, l_above;
  Rat width;

  // the localized transition point: both classes occur within tol of it
  const Point& z() const { return above; }
};

// Bisects the segment between two differently-labelled points down to a
// bracket of linf width <= tol. Exact rational arithmetic throughout.
inline TransitionBracket find_transition_point(const Classifier& m, const Point& a,
                                               const Point& b, const Rat& tol) {
  if (tol <= 0) throw PrecisionError("tolerance must be positive");
  const ClassLabel la = evaluate(m, a), lb = evaluate(m, b);
  if (la == lb) throw PreconditionError("endpoints share a prediction");
  for (size_t f = 0; f < m.space.arity(); ++f)
    if (a[f] != b[f] && m.space.domains[f].kind != Domain::Kind::Real)
      throw PreconditionError("segment bisection needs real-valued moving features");

  auto at = [&](const Rat& t) {
    Point x(a.size());
    for (size_t f = 0; f < a.size(); ++f) x[f] = a[f] + t * (b[f] - a[f]);
    return x;
  };
  Rat ta(0), tb(1);
  Point pa = a, pb = b;
  ClassLabel ca = la;
  while (distance_linf(pa, pb) > tol) {
    Rat tm = (ta + tb) / 2;
    Point pm = at(tm);
    if (evaluate(m, pm) == ca) {
      ta = tm;
      pa = std::move(pm);
    } else {
      tb = tm;
      pb = std::move(pm);
    }
  }
  ClassLabel cb = evaluate(m, pb);
  return {pa, pb, ca, cb, distance_linf(pa, pb)};
}

struct DiscreteTransitionPair {
  Point below, above;  // differ in one feature by one grid step
  ClassLabel l_below, l_above;
  size_t feature;
};

namespace detail {

// Walks from a to b one coordinate at a time and returns the first
// single-coordinate step at which the prediction changes.
inline std::pair<std::pair<Point, Point>, size_t> label_walk(const Classifier& m,
                                                             const Point& a,
                                                             const Point& b) {
  Point cur = a;
  ClassLabel lc = evaluate(m, cur);
  for (size_t f = 0; f < a.size(); ++f) {
    if (cur[f] == b[f]) continue;
    Point next = cur;
    next[f] = b[f];
    if (evaluate(m, next) != lc) return {{std::move(cur), std::move(next)}, f};
    cur = std::move(next);
  }
  throw PreconditionError("walk endpoints share a prediction");
}

// Index bisection inside one discrete feature down to adjacent values.
inline std::pair<Point, Point> tighten_discrete(const Classifier& m, Point x, Point y,
                                                size_t f) {
  const Domain& d = m.space.domains[f];
  auto ix = d.index_of(x[f]), iy = d.index_of(y[f]);
  if (!ix || !iy) throw PreconditionError("walk point off the feature grid");
  uint64_t i = *ix, j = *iy;
  ClassLabel lx = evaluate(m, x);
  while (i + 1 < j || j + 1 < i) {
    uint64_t mid = i < j ? i + (j - i) / 2 : j + (i - j) / 2;
    Point pm = x;
    pm[f] = d.value_at(mid);
    if (evaluate(m, pm) == lx) {
      i = mid;
      x = std::move(pm);
    } else {
      j = mid;
      y = std::move(pm);
    }
  }
  return {std::move(x), std::move(y)};
}

// Bisection inside one real feature until the pair fits in the ball.
inline std::pair<Point, Point> tighten_real(const Classifier& m, Point x, Point y,
                                            size_t f, const DistanceSpec& spec) {
  ClassLabel lx = evaluate(m, x);
  while (!within_ball(x, y, spec)) {
    Rat mid = (x[f] + y[f]) / 2;
    Point pm = x;
    pm[f] = mid;
    if (evaluate(m, pm) == lx)
      x = std::move(pm);
    else
      y = std::move(pm);
  }
  return {std::move(x), std::move(y)};
}

}  // namespace detail

// Coordinate walk plus index bisection: an adjacent pair of points, one
// grid step apart in a single feature, with different predictions.
inline DiscreteTransitionPair find_discrete_transition_pair(const Classifier& m,
                                                            const Point& a,
                                                            const Point& b) {
  if (!m.space.all_discrete())
    throw PreconditionError("grid transition search needs a discrete space");
  if (evaluate(m, a) == evaluate(m, b))
    throw PreconditionError("endpoints share a prediction");
  auto [pair, f] = detail::label_walk(m, a, b);
  auto [x, y] = detail::tighten_discrete(m, pair.first, pair.second, f);
  return {x, y, evaluate(m, x), evaluate(m, y), f};
}

struct GlobalCounterexample {
  FindStatus status = FindStatus::Unknown;
  Point x, y;  // within the ball of each other, predictions differ
  ClassLabel lx, ly;
  std::string reason;
  SolveStats stats;
  const char* engine = "";
};

namespace detail {

inline void verify_pair(const Classifier& m, const DistanceSpec& spec, const Point& x,
                        const Point& y) {
  m.space.check_point(x);
  m.space.check_point(y);
  ClassLabel lx = evaluate(m, x), ly = evaluate(m, y);
  if (lx.is_abstain() || ly.is_abstain())
    throw SoundnessError("claimed counterexample pair involves a rejected input");
  if (lx == ly)
    throw SoundnessError("claimed counterexample pair shares a prediction");
  if (!within_ball(x, y, spec))
    throw SoundnessError("claimed counterexample pair exceeds the ball");
}

inline GlobalCounterexample found_pair(const Classifier& m, const DistanceSpec& spec,
                                       Point x, Point y, const char* engine) {
  verify_pair(m, spec, x, y);
  GlobalCounterexample g;
  g.status = FindStatus::Found;
  g.lx = evaluate(m, x);
  g.ly = evaluate(m, y);
  g.x = std::move(x);
  g.y = std::move(y);
  g.engine = engine;
  return g;
}

}  // namespace detail

// Refutes an epsilon-robustness certificate: two points within epsilon
// of each other that the classifier labels differently. For a constant
// classifier no such pair exists and TrivialClassifierError is thrown.
inline GlobalCounterexample find_global_counterexample(const Classifier& m,
                                                       const DistanceSpec& spec,
                                                       const QueryOptions& opts = {}) {
  if (spec.epsilon <= 0) throw PreconditionError("epsilon must be positive");
  if (m.space.all_discrete()) {
    Rat floor = minimum_meaningful_epsilon(m.space, spec.p);
    if (spec.epsilon < floor)
      throw PreconditionError("epsilon " + format_rat(spec.epsilon) +
                              " separates no two distinct points; the smallest gap is " +
                              format_rat(floor));
  }

  NontrivialWitness w = find_nontrivial_witness(m, opts);
  if (!w.la.is_abstain() && !w.lb.is_abstain() && within_ball(w.a, w.b, spec))
    return detail::found_pair(m, spec, w.a, w.b, "witness");

  // exact dual-copy decision where the encoding supports it
  auto solver_dual = [&]() -> std::optional<GlobalCounterexample> {
    if (!m.space.all_discrete() || (spec.p != Norm::L0 && spec.p != Norm::Linf))
      return std::nullopt;
    try {
      Formula F;
      encode_inputs(F, m.space, Copy::X);
      encode_inputs(F, m.space, Copy::Y);
      auto ix = encode_classifier(F, m, Copy::X);
      auto iy = encode_classifier(F, m, Copy::Y);
      encode_distance_dual(F, m.space, spec);
      encode_disagree(F, ix, iy);
      SolveResult r = opts.external_cmd.empty() ? solve(F, opts.budget)
                                                : solve_external(F, opts.external_cmd);
      if (r.status == SolveStatus::Sat) {
        Point x = decode(r, F.vars, Copy::X, m.space);
        Point y = decode(r, F.vars, Copy::Y, m.space);
        auto g = detail::found_pair(m, spec, std::move(x), std::move(y), "solver");
        g.stats = r.stats;
        return g;
      }
      if (r.status == SolveStatus::Unsat) {
        GlobalCounterexample g;
        g.status = FindStatus::None;
        g.stats = r.stats;
        g.engine = "solver";
        return g;
      }
      return std::nullopt;  // resource out: try the constructive search
    } catch (const EncodingError&) {
      return std::nullopt;
    }
  };

  if (opts.engine == Engine::Solver || !opts.external_cmd.empty())
    if (auto g = solver_dual()) return *g;

  // constructive: localize the label change onto a single coordinate
  auto [pr, f] = detail::label_walk(m, w.a, w.b);
  const bool clean_flip = !evaluate(m, pr.first).is_abstain() &&
                          !evaluate(m, pr.second).is_abstain();
  if (clean_flip && m.space.domains[f].kind == Domain::Kind::Real) {
    auto [x, y] = detail::tighten_real(m, pr.first, pr.second, f, spec);
    return detail::found_pair(m, spec, std::move(x), std::move(y), "bisection");
  }
  if (clean_flip) {
    auto [x, y] = detail::tighten_discrete(m, pr.first, pr.second, f);
    if (!evaluate(m, x).is_abstain() && !evaluate(m, y).is_abstain() &&
        within_ball(x, y, spec))
      return detail::found_pair(m, spec, std::move(x), std::move(y), "bisection");
  }

  if (opts.engine != Engine::Solver && opts.external_cmd.empty())
    if (auto g = solver_dual()) return *g;

  // last resort on small grids: exact minimum cross-label scan
  if (m.space.all_discrete()) {
    try {
      auto e = EnumerableSpace::make(m.space, 1u << 11);
      std::vector<Point> pts;
      std::vector<ClassLabel> lbl;
      std::vector<uint32_t> key(m.space.arity(), 0);
      for (uint64_t it = 0; it < e.total; ++it) {
        pts.push_back(e.materialize(key));
        lbl.push_back(evaluate(m, pts.back()));
        for (size_t g = key.size(); g-- > 0;) {
          if (++key[g] < e.sizes[g]) break;
          key[g] = 0;
        }
      }
      for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
          if (!lbl[i].is_abstain() && !lbl[j].is_abstain() && lbl[i] != lbl[j] &&
              within_ball(pts[i], pts[j], spec))
            return detail::found_pair(m, spec, pts[i], pts[j], "scan");
      GlobalCounterexample g;
      g.status = FindStatus::None;
      g.engine = "scan";
      return g;
    } catch (const TooLargeError&) {
    }
  }

  GlobalCounterexample g;
  g.status = FindStatus::Unknown;
  g.reason = "nearest label change found exceeds epsilon";
  g.engine = "bisection";
  return g;
}

struct ScoreCounterexample {
  FindStatus status = FindStatus::Unknown;
  Point x, y;  // within the ball, raw scores more than delta apart
  Rat score_x, score_y;
  Rat max_gap;  // largest score difference achievable inside any ball
};

namespace detail {

// Largest |a - b| over values of d at most eps apart, with a witness.
inline std::pair<Rat, std::pair<Rat, Rat>> widest_step(const Domain& d, const Rat& eps) {
  if (!d.discrete()) {
    Rat gap = rat_min(eps, d.hi - d.lo);
    return {gap, {d.lo, d.lo + gap}};
  }
  std::vector<Rat> vals;
  for (uint64_t i = 0; i < d.size(); ++i) vals.push_back(d.value_at(i));
  std::sort(vals.begin(), vals.end());
  Rat best(0);
  std::pair<Rat, Rat> arg{vals[0], vals[0]};
  size_t lo = 0;
  for (size_t hi = 0; hi < vals.size(); ++hi) {
    while (vals[hi] - vals[lo] > eps) ++lo;
    if (vals[hi] - vals[lo] > best) {
      best = vals[hi] - vals[lo];
      arg = {vals[lo], vals[hi]};
    }
  }
  return {best, arg};
}

}  // namespace detail

// Score-gap variant of global robustness for linear models: a pair
// within the ball whose raw scores differ by more than delta, found by
// slope analysis rather than search; a verified None when the largest
// achievable gap stays at or below delta.
inline ScoreCounterexample find_global_counterexample_delta(const Classifier& m,
                                                            const DistanceSpec& spec,
                                                            const Rat& delta) {
  const auto* lin = std::get_if<LinearBody>(&m.body);
  if (!lin) throw NotApplicableError("score-gap analysis needs a linear classifier");
  if (delta <= 0) throw PreconditionError("delta must be positive");
  if (spec.epsilon <= 0) throw PreconditionError("epsilon must be positive");

  const size_t arity = m.space.arity();
  // per-feature: largest score contribution and the value pair attaining it
  std::vector<Rat> gain(arity, Rat(0));
  std::vector<std::pair<Rat, Rat>> arg(arity);
  for (size_t f = 0; f < arity; ++f) {
    const Domain& d = m.space.domains[f];
    Rat w = rat_abs(lin->weights[f]);
    Rat reach = spec.p == Norm::Linf ? spec.epsilon : d.hi - d.lo;
    auto [step, ab] = detail::widest_step(d, reach);
    gain[f] = w * step;
    arg[f] = lin->weights[f] >= 0 ? ab : std::make_pair(ab.second, ab.first);
  }

  Point x(arity), y(arity);
  Rat total(0);
  auto move_feature = [&](size_t f) {
    x[f] = arg[f].first;
    y[f] = arg[f].second;
    total += gain[f];
  };
  auto park_feature = [&](size_t f) { x[f] = y[f] = arg[f].first; };

  if (spec.p == Norm::Linf) {
    for (size_t f = 0; f < arity; ++f) move_feature(f);
  } else if (spec.p == Norm::L0) {
    std::vector<size_t> order(arity);
    for (size_t f = 0; f < arity; ++f) order[f] = f;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return gain[a] > gain[b]; });
    int64_t k = l0_budget(spec.epsilon);
    for (size_t i = 0; i < arity; ++i) {
      if (static_cast<int64_t>(i) < k)
        move_feature(order[i]);
      else
        park_feature(order[i]);
    }
  } else if (spec.p == Norm::L1) {
    // fractional-knapsack allocation of the l1 budget, real features only
    for (size_t f = 0; f < arity; ++f)
      if (m.space.domains[f].discrete())
        throw NotApplicableError("l1 score-gap analysis needs real-valued features");
    std::vector<size_t> order(arity);
    for (size_t f = 0; f < arity; ++f) order[f] = f;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return rat_abs(lin->weights[a]) > rat_abs(lin->weights[b]);
    });
    Rat budget = spec.epsilon;
    for (size_t f : order) {
      const Domain& d = m.space.domains[f];
      Rat step = rat_min(budget, d.hi - d.lo);
      if (step > 0) {
        Rat a = d.lo, b = d.lo + step;
        arg[f] = lin->weights[f] >= 0 ? std::make_pair(a, b) : std::make_pair(b, a);
        gain[f] = rat_abs(lin->weights[f]) * step;
        move_feature(f);
        budget -= step;
      } else {
        park_feature(f);
      }
    }
  } else {
    throw NotApplicableError("l2 score-gap analysis is irrational in general");
  }

  ScoreCounterexample out;
  out.max_gap = total;
  if (total <= delta) {
    out.status = FindStatus::None;
    return out;
  }
  m.space.check_point(x);
  m.space.check_point(y);
  if (!within_ball(x, y, spec))
    throw SoundnessError("constructed score pair exceeds the ball");
  out.score_x = lin->score(x);
  out.score_y = lin->score(y);
  if (rat_abs(out.score_y - out.score_x) <= delta)
    throw SoundnessError("constructed score pair misses the claimed gap");
  out.status = FindStatus::Found;
  out.x = std::move(x);
  out.y = std::move(y);
  return out;
}

struct CertifyDemoRow {
  Point v;
  ClassLabel c;
  bool sampled_found = false;  // sampling located an adversarial example
  int64_t samples = 0;
  Verdict complete = Verdict::Unknown;  // exact per-point verdict
};

struct CertifyDemoReport {
  std::vector<CertifyDemoRow> rows;
  NontrivialWitness witness;
  TransitionBracket bracket;  // continuous transition localization
  bool has_bracket = false;
  DiscreteTransitionPair grid_pair;  // discrete counterpart
  bool has_grid_pair = false;
  GlobalCounterexample pair;  // the certificate refutation
  bool refuted = false;
};

// Contrasts per-point sampled verdicts and exact verdicts with the
// transition-point construction: however robust the evaluated points
// look, the constructed pair refutes an epsilon-certificate claim.
inline CertifyDemoReport certify_demo(const Classifier& m, const DistanceSpec& spec,
                                      const std::vector<Point>& points,
                                      const SamplingConfig& cfg,
                                      const QueryOptions& opts = {},
                                      const Rat& tol = Rat(1, 1000000)) {
  CertifyDemoReport out;
  for (const Point& v : points) {
    CertifyDemoRow row;
    row.v = v;
    row.c = evaluate(m, v);
    auto E = make_problem(m, v);
    auto sv = sample_local_robustness(E, spec, cfg);
    row.sampled_found = sv.found;
    row.samples = sv.tested;
    row.complete = is_locally_robust(E, spec, opts).verdict;
    out.rows.push_back(std::move(row));
  }

  out.witness = find_nontrivial_witness(m, opts);
  bool moving_real = true;
  for (size_t f = 0; f < m.space.arity(); ++f)
    if (out.witness.a[f] != out.witness.b[f] &&
        m.space.domains[f].kind != Domain::Kind::Real)
      moving_real = false;
  if (moving_real) {
    out.bracket = find_transition_point(m, out.witness.a, out.witness.b, tol);
    out.has_bracket = true;
  } else if (m.space.all_discrete()) {
    out.grid_pair = find_discrete_transition_pair(m, out.witness.a, out.witness.b);
    out.has_grid_pair = true;
  }
  out.pair = find_global_counterexample(m, spec, opts);
  out.refuted = out.pair.status == FindStatus::Found;
  return out;
}

}  // namespace aex
