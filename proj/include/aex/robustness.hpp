#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "aex/bridge.hpp"
#include "aex/brute.hpp"
#include "aex/closedform.hpp"
#include "aex/distance.hpp"
#include "aex/encode.hpp"
#include "aex/errors.hpp"
#include "aex/model.hpp"
#include "aex/solver.hpp"

namespace aex {

enum class Engine { Auto, Solver, ClosedForm, Brute };

struct QueryOptions {
  Engine engine = Engine::Auto;
  SolveBudget budget;
  std::string external_cmd;  // non-empty: route solver queries externally
  uint64_t enum_cap = kDefaultEnumCap;
  uint64_t* oracle_calls = nullptr;  // incremented per find_aex when set
};

enum class FindStatus { Found, None, Unknown };

struct FindAExResult {
  FindStatus status = FindStatus::Unknown;
  std::optional<Point> witness;
  std::string reason;
  SolveStats stats;
  const char* engine = "";
};

namespace detail {

inline void verify_aex(const ExplanationProblem& E, const DistanceSpec& spec,
                       const std::set<size_t>& fixed, const BoxConstraint* box,
                       const Point& x) {
  ClassLabel lx = evaluate(*E.model, x);
  if (lx == E.inst.c || lx.is_abstain())
    throw SoundnessError("claimed adversarial example keeps or rejects the prediction");
  if (!within_ball(x, E.inst.v, spec))
    throw SoundnessError("claimed adversarial example leaves the ball");
  for (size_t f : fixed)
    if (x[f] != E.inst.v[f])
      throw SoundnessError("claimed adversarial example moves a fixed feature");
  if (box && !box->contains(x))
    throw SoundnessError("claimed adversarial example leaves the constraint region");
}

inline void encode_box(Formula& F, const FeatureSpace& space, const BoxConstraint& box,
                       Copy c) {
  for (size_t f = 0; f < space.arity(); ++f) {
    const Domain& d = space.domains[f];
    for (uint64_t k = 0; k < d.size(); ++k) {
      Rat v = d.value_at(k);
      if (v < box.bounds[f].first || v > box.bounds[f].second)
        F.add_clause({~value_lit(F.vars, c, f, k)});
    }
  }
}

inline FindAExResult find_aex_solver(const ExplanationProblem& E, const DistanceSpec& spec,
                                     const std::set<size_t>& fixed, const QueryOptions& opts,
                                     const BoxConstraint* box) {
  const Classifier& m = *E.model;
  Formula F;
  encode_inputs(F, m.space, Copy::X);
  auto inds = encode_classifier(F, m, Copy::X);
  encode_distance_center(F, m.space, spec, E.inst.v, Copy::X);
  encode_fixed(F, m.space, E.inst.v, fixed, Copy::X);
  if (box) encode_box(F, m.space, *box, Copy::X);
  encode_class_is(F, inds, E.inst.c.idx, false);

  SolveResult r = opts.external_cmd.empty() ? solve(F, opts.budget)
                                            : solve_external(F, opts.external_cmd);
  FindAExResult out;
  out.stats = r.stats;
  out.engine = "solver";
  if (r.status == SolveStatus::ResourceOut) {
    out.status = FindStatus::Unknown;
    out.reason = "solver budget exhausted";
    return out;
  }
  if (r.status == SolveStatus::Unsat) {
    out.status = FindStatus::None;
    return out;
  }
  Point x = decode(r, F.vars, Copy::X, m.space);
  verify_aex(E, spec, fixed, box, x);
  out.status = FindStatus::Found;
  out.witness = std::move(x);
  return out;
}

inline FindAExResult find_aex_brute(const ExplanationProblem& E, const DistanceSpec& spec,
                                    const std::set<size_t>& fixed, const QueryOptions& opts,
                                    const BoxConstraint* box) {
  FindAExResult out;
  out.engine = "brute";
  auto x = brute_find_aex(*E.model, E.inst, spec, fixed, box, opts.enum_cap);
  if (x) {
    verify_aex(E, spec, fixed, box, *x);
    out.status = FindStatus::Found;
    out.witness = std::move(*x);
  } else {
    out.status = FindStatus::None;
  }
  return out;
}

// Closed-form search: build per-feature windows for the ball/fixed/box
// restrictions, then ask the interval analysis for a differing label.
inline FindAExResult find_aex_closedform(const ExplanationProblem& E, const DistanceSpec& spec,
                                         const std::set<size_t>& fixed,
                                         const BoxConstraint* box) {
  const Classifier& m = *E.model;
  const size_t arity = m.space.arity();
  FindAExResult out;
  out.engine = "interval";

  cf::Box base = cf::full_box(m.space);
  if (box)
    for (size_t f = 0; f < arity; ++f) {
      base.ivals[f].lo = rat_max(base.ivals[f].lo, box->bounds[f].first);
      base.ivals[f].hi = rat_min(base.ivals[f].hi, box->bounds[f].second);
    }
  std::vector<bool> is_fixed(arity, false);
  for (size_t f : fixed) {
    is_fixed[f] = true;
    base.ivals[f] = {E.inst.v[f], E.inst.v[f], false, false};
  }

  auto run = [&](const cf::Box& b) {
    return cf::exists_label_ne(m, b, E.inst.c.idx, 0);
  };

  cf::CfResult res = cf::CfResult::none();
  if (spec.p == Norm::Linf) {
    cf::Box b = base;
    for (size_t f = 0; f < arity; ++f) {
      if (is_fixed[f]) continue;
      b.ivals[f].lo = rat_max(b.ivals[f].lo, E.inst.v[f] - spec.epsilon);
      b.ivals[f].hi = rat_min(b.ivals[f].hi, E.inst.v[f] + spec.epsilon);
    }
    res = run(b);
  } else if (spec.p == Norm::L0) {
    std::vector<size_t> free;
    for (size_t f = 0; f < arity; ++f)
      if (!is_fixed[f]) free.push_back(f);
    const size_t kk = static_cast<size_t>(
        std::min<int64_t>(l0_budget(spec.epsilon), static_cast<int64_t>(free.size())));
    if (kk == 0) {
      cf::Box b = base;
      for (size_t f : free) b.ivals[f] = {E.inst.v[f], E.inst.v[f], false, false};
      res = run(b);
    } else {
      // allow exactly kk coordinates to move; subsets in ascending order
      std::vector<size_t> pick(kk);
      for (size_t i = 0; i < kk; ++i) pick[i] = i;
      uint64_t guard = 0;
      for (;;) {
        if (++guard > 200'000) {
          res = cf::CfResult::unknown("too many coordinate subsets");
          break;
        }
        cf::Box b = base;
        std::vector<bool> moving(arity, false);
        for (size_t i : pick) moving[free[i]] = true;
        for (size_t f : free)
          if (!moving[f]) b.ivals[f] = {E.inst.v[f], E.inst.v[f], false, false};
        auto r = run(b);
        if (r.state == cf::CfState::Found) {
          res = r;
          break;
        }
        if (r.state == cf::CfState::Unknown) res = r;
        // next combination
        size_t i = kk;
        while (i > 0) {
          --i;
          if (pick[i] + (kk - i) < free.size()) {
            ++pick[i];
            for (size_t j = i + 1; j < kk; ++j) pick[j] = pick[j - 1] + 1;
            break;
          }
          if (i == 0) {
            i = kk + 1;
            break;
          }
        }
        if (i == kk + 1) break;
      }
    }
  } else {
    // l1 / l2: exact only when a single coordinate may move.
    std::vector<size_t> free;
    for (size_t f = 0; f < arity; ++f)
      if (!is_fixed[f]) free.push_back(f);
    if (free.size() == 1) {
      cf::Box b = base;
      const size_t f = free[0];
      b.ivals[f].lo = rat_max(b.ivals[f].lo, E.inst.v[f] - spec.epsilon);
      b.ivals[f].hi = rat_min(b.ivals[f].hi, E.inst.v[f] + spec.epsilon);
      res = run(b);
    } else {
      res = cf::CfResult::unknown("interval analysis supports " +
                                  std::string(norm_name(spec.p)) +
                                  " only with a single moving feature");
    }
  }

  if (res.state == cf::CfState::Found) {
    verify_aex(E, spec, fixed, box, res.witness);
    out.status = FindStatus::Found;
    out.witness = std::move(res.witness);
  } else if (res.state == cf::CfState::None) {
    out.status = FindStatus::None;
  } else {
    out.status = FindStatus::Unknown;
    out.reason = res.reason;
  }
  return out;
}

}  // namespace detail

// Adversarial-example oracle: searches the epsilon-ball around the
// instance, holding the `fixed` features at their instance values, for a
// point the classifier labels differently.
inline FindAExResult find_aex(const ExplanationProblem& E, const DistanceSpec& spec,
                              const std::set<size_t>& fixed = {},
                              const QueryOptions& opts = {},
                              const BoxConstraint* box = nullptr) {
  const Classifier& m = *E.model;
  if (opts.oracle_calls) ++*opts.oracle_calls;
  if (spec.epsilon < 0) throw PreconditionError("negative epsilon");
  for (size_t f : fixed)
    if (f >= m.space.arity()) throw PreconditionError("fixed-feature index out of range");
  if (box && box->bounds.size() != m.space.arity())
    throw PreconditionError("constraint arity mismatch");

  switch (opts.engine) {
    case Engine::Solver:
      return detail::find_aex_solver(E, spec, fixed, opts, box);
    case Engine::Brute:
      return detail::find_aex_brute(E, spec, fixed, opts, box);
    case Engine::ClosedForm:
      return detail::find_aex_closedform(E, spec, fixed, box);
    case Engine::Auto:
      break;
  }

  if (m.space.all_discrete()) {
    try {
      return detail::find_aex_solver(E, spec, fixed, opts, box);
    } catch (const EncodingError&) {
      // fall through to enumeration / interval analysis
    }
    try {
      return detail::find_aex_brute(E, spec, fixed, opts, box);
    } catch (const TooLargeError&) {
    }
  }
  auto cfr = detail::find_aex_closedform(E, spec, fixed, box);
  if (cfr.status != FindStatus::Unknown) return cfr;
  // Last resort for small mixed spaces is not available; report honestly.
  return cfr;
}

enum class Verdict { Robust, NotRobust, Unknown };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Robust: return "robust";
    case Verdict::NotRobust: return "not-robust";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

struct RobustnessVerdict {
  Verdict verdict = Verdict::Unknown;
  std::optional<Point> witness;  // adversarial example when NotRobust
  std::string reason;
  SolveStats stats;
  const char* engine = "";
};

// Checks that some point of the space satisfies the box.
inline void validate_box(const FeatureSpace& space, const BoxConstraint& box) {
  if (box.bounds.size() != space.arity())
    throw PreconditionError("constraint arity mismatch");
  for (size_t f = 0; f < space.arity(); ++f) {
    cf::Ival iv{box.bounds[f].first, box.bounds[f].second, false, false};
    if (!cf::feature_extremes(space.domains[f], iv))
      throw PreconditionError("constraint region excludes every value of feature " +
                              std::to_string(f + 1));
  }
}

// Decides epsilon-local robustness of the prediction at E.inst.
inline RobustnessVerdict is_locally_robust(const ExplanationProblem& E,
                                           const DistanceSpec& spec,
                                           const QueryOptions& opts = {},
                                           const BoxConstraint* box = nullptr) {
  if (spec.epsilon <= 0) throw PreconditionError("local robustness needs epsilon > 0");
  if (box) validate_box(E.model->space, *box);
  auto r = find_aex(E, spec, {}, opts, box);
  RobustnessVerdict v;
  v.stats = r.stats;
  v.engine = r.engine;
  v.reason = r.reason;
  switch (r.status) {
    case FindStatus::Found:
      v.verdict = Verdict::NotRobust;
      v.witness = r.witness;
      break;
    case FindStatus::None:
      v.verdict = Verdict::Robust;
      break;
    case FindStatus::Unknown:
      v.verdict = Verdict::Unknown;
      break;
  }
  return v;
}

enum class SampleDist { Ball, Space, Dataset };

struct SamplingConfig {
  SampleDist dist = SampleDist::Ball;
  int64_t n = 100;
  uint64_t seed = 1;
  double confidence = 0;  // reported, never used to claim robustness
  const std::vector<Point>* dataset = nullptr;
};

// Sampling can refute robustness but can never certify it: the result
// type has no "robust" state, only found / not-found-in-n-samples.
struct SamplingVerdict {
  bool found = false;
  std::optional<Point> witness;
  int64_t tested = 0;
  int64_t in_ball = 0;
};

inline SamplingVerdict sample_local_robustness(const ExplanationProblem& E,
                                               const DistanceSpec& spec,
                                               const SamplingConfig& cfg) {
  if (cfg.n < 1) throw PreconditionError("sample count must be at least 1");
  if (cfg.dist == SampleDist::Dataset && (!cfg.dataset || cfg.dataset->empty()))
    throw PreconditionError("dataset sampling needs a dataset");
  const Classifier& m = *E.model;
  const size_t arity = m.space.arity();
  std::mt19937_64 rng(cfg.seed);
  SamplingVerdict out;

  auto sample_feature = [&rng](const Domain& d, const Rat& lo, const Rat& hi) -> Rat {
    if (d.kind == Domain::Kind::Real) {
      std::uniform_real_distribution<double> u(to_double(lo), to_double(hi));
      Rat x(u(rng));
      return rat_min(rat_max(x, lo), hi);
    }
    auto e = cf::feature_extremes(d, {lo, hi, false, false});
    if (!e) return lo;  // empty window; caller's ball check rejects
    uint64_t a = *d.index_of(e->min_v), b = *d.index_of(e->max_v);
    std::uniform_int_distribution<uint64_t> u(a, b);
    return d.value_at(u(rng));
  };

  for (int64_t i = 0; i < cfg.n; ++i) {
    Point x(arity);
    if (cfg.dist == SampleDist::Dataset) {
      std::uniform_int_distribution<size_t> u(0, cfg.dataset->size() - 1);
      x = (*cfg.dataset)[u(rng)];
    } else if (cfg.dist == SampleDist::Space) {
      for (size_t f = 0; f < arity; ++f)
        x[f] = sample_feature(m.space.domains[f], m.space.domains[f].lo,
                              m.space.domains[f].hi);
    } else {
      // Ball: sample inside the linf box, reject to the lp ball.
      Rat width = spec.p == Norm::L0 ? Rat(0) : spec.epsilon;
      if (spec.p == Norm::L0) {
        x = E.inst.v;
        std::vector<size_t> idx(arity);
        for (size_t f = 0; f < arity; ++f) idx[f] = f;
        const size_t kk = static_cast<size_t>(
            std::min<int64_t>(l0_budget(spec.epsilon), static_cast<int64_t>(arity)));
        for (size_t j = 0; j < kk; ++j) {
          std::uniform_int_distribution<size_t> u(j, arity - 1);
          std::swap(idx[j], idx[u(rng)]);
          const size_t f = idx[j];
          x[f] = sample_feature(m.space.domains[f], m.space.domains[f].lo,
                                m.space.domains[f].hi);
        }
      } else {
        for (size_t f = 0; f < arity; ++f) {
          const Domain& d = m.space.domains[f];
          x[f] = sample_feature(d, rat_max(d.lo, E.inst.v[f] - width),
                                rat_min(d.hi, E.inst.v[f] + width));
        }
      }
    }
    ++out.tested;
    if (!m.space.contains(x)) continue;
    if (!within_ball(x, E.inst.v, spec)) continue;  // outside: vacuous
    ++out.in_ball;
    if (evaluate(m, x) != E.inst.c) {
      out.found = true;
      out.witness = std::move(x);
      return out;
    }
  }
  return out;
}

}  // namespace aex
