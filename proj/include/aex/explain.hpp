#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "aex/distance.hpp"
#include "aex/errors.hpp"
#include "aex/formula.hpp"
#include "aex/model.hpp"
#include "aex/robustness.hpp"
#include "aex/solver.hpp"

namespace aex {

// A ball that covers the whole feature space: plain (distance-free)
// explanations are the restricted ones at this spec.
inline DistanceSpec unrestricted_spec(const Classifier& m) {
  return {Norm::L0, Rat(static_cast<int64_t>(m.space.arity()))};
}

inline std::set<size_t> feature_complement(size_t arity, const std::set<size_t>& s) {
  std::set<size_t> out;
  for (size_t f = 0; f < arity; ++f)
    if (!s.count(f)) out.insert(f);
  return out;
}

// S is a weak abductive explanation iff fixing S to the instance values
// leaves no adversarial example inside the ball.
inline bool is_weak_axp(const ExplanationProblem& E, const DistanceSpec& spec,
                        const std::set<size_t>& s, const QueryOptions& opts = {}) {
  auto r = find_aex(E, spec, s, opts);
  if (r.status == FindStatus::Unknown)
    throw UnknownResultError("oracle could not decide: " + r.reason);
  return r.status == FindStatus::None;
}

// S is a weak contrastive explanation iff changing only S reaches an
// adversarial example inside the ball.
inline bool is_weak_cxp(const ExplanationProblem& E, const DistanceSpec& spec,
                        const std::set<size_t>& s, const QueryOptions& opts = {}) {
  auto r = find_aex(E, spec, feature_complement(E.model->space.arity(), s), opts);
  if (r.status == FindStatus::Unknown)
    throw UnknownResultError("oracle could not decide: " + r.reason);
  return r.status == FindStatus::Found;
}

namespace detail {

template <typename Weak>
std::set<size_t> shrink_to_minimal(std::set<size_t> s, Weak weak) {
  // deletion-based minimization, ascending feature order for determinism
  std::vector<size_t> order(s.begin(), s.end());
  for (size_t f : order) {
    s.erase(f);
    if (!weak(s)) s.insert(f);
  }
  return s;
}

}  // namespace detail

// Subset-minimal weak abductive explanation, optionally shrunk from a
// caller-supplied weak set.
inline std::set<size_t> find_axp(const ExplanationProblem& E, const DistanceSpec& spec,
                                 const std::optional<std::set<size_t>>& seed = std::nullopt,
                                 const QueryOptions& opts = {}) {
  std::set<size_t> s =
      seed ? *seed : feature_complement(E.model->space.arity(), {});
  if (seed && !is_weak_axp(E, spec, s, opts))
    throw PreconditionError("seed is not a weak abductive explanation");
  return detail::shrink_to_minimal(
      s, [&](const std::set<size_t>& t) { return is_weak_axp(E, spec, t, opts); });
}

// Subset-minimal weak contrastive explanation.
inline std::set<size_t> find_cxp(const ExplanationProblem& E, const DistanceSpec& spec,
                                 const std::optional<std::set<size_t>>& seed = std::nullopt,
                                 const QueryOptions& opts = {}) {
  std::set<size_t> s =
      seed ? *seed : feature_complement(E.model->space.arity(), {});
  if (!is_weak_cxp(E, spec, s, opts))
    throw PreconditionError(seed ? "seed is not a weak contrastive explanation"
                                 : "prediction is robust: no contrastive explanation");
  return detail::shrink_to_minimal(
      s, [&](const std::set<size_t>& t) { return is_weak_cxp(E, spec, t, opts); });
}

// An adversarial example witnesses that its changed-feature set is a
// weak contrastive explanation.
inline std::set<size_t> cxp_from_aex(const ExplanationProblem& E, const DistanceSpec& spec,
                                     const Point& x) {
  E.model->space.check_point(x);
  std::set<size_t> diff;
  for (size_t f = 0; f < x.size(); ++f)
    if (x[f] != E.inst.v[f]) diff.insert(f);
  if (diff.empty()) throw EmptyChangeError("adversarial example changes no feature");
  if (evaluate(*E.model, x) == E.inst.c)
    throw PreconditionError("point keeps the prediction; not an adversarial example");
  if (!within_ball(x, E.inst.v, spec))
    throw PreconditionError("point lies outside the ball");
  return diff;
}

// A weak contrastive explanation yields an adversarial example through
// the oracle restricted to it.
inline Point aex_from_cxp(const ExplanationProblem& E, const DistanceSpec& spec,
                          const std::set<size_t>& s, const QueryOptions& opts = {}) {
  auto r = find_aex(E, spec, feature_complement(E.model->space.arity(), s), opts);
  if (r.status == FindStatus::Unknown)
    throw UnknownResultError("oracle could not decide: " + r.reason);
  if (r.status == FindStatus::None)
    throw PreconditionError("set is not a weak contrastive explanation");
  return *r.witness;
}

struct ExplanationListing {
  std::vector<std::set<size_t>> axps, cxps;
  bool complete = true;
};

// Exhaustive dual enumeration over a map solver: every candidate seed
// either shrinks to an abductive explanation (blocking its supersets)
// or its complement shrinks to a contrastive one (blocking the seeds
// that miss it). Map unsat means both families are complete.
inline ExplanationListing enumerate_explanations(const ExplanationProblem& E,
                                                 const DistanceSpec& spec,
                                                 size_t limit = 0,
                                                 const QueryOptions& opts = {}) {
  const size_t m = E.model->space.arity();
  ExplanationListing out;
  std::vector<Clause> map_clauses;

  for (;;) {
    if (limit && out.axps.size() + out.cxps.size() >= limit) {
      out.complete = false;
      return out;
    }
    Solver map(static_cast<int>(m));
    for (const Clause& c : map_clauses) map.add_clause(c);
    SolveResult r = map.solve();
    if (r.status == SolveStatus::Unsat) return out;
    if (r.status != SolveStatus::Sat)
      throw UnknownResultError("map solver exceeded its budget");

    std::set<size_t> seed;
    for (size_t f = 0; f < m; ++f)
      if (r.value(static_cast<int>(f) + 1)) seed.insert(f);

    try {
      if (is_weak_axp(E, spec, seed, opts)) {
        auto x = detail::shrink_to_minimal(seed, [&](const std::set<size_t>& t) {
          return is_weak_axp(E, spec, t, opts);
        });
        Clause block;  // drop at least one member in future seeds
        for (size_t f : x) block.push_back(neg_lit(static_cast<int>(f) + 1));
        map_clauses.push_back(std::move(block));
        out.axps.push_back(std::move(x));
      } else {
        auto comp = feature_complement(m, seed);
        auto y = detail::shrink_to_minimal(comp, [&](const std::set<size_t>& t) {
          return is_weak_cxp(E, spec, t, opts);
        });
        Clause block;  // future seeds must fix at least one member
        for (size_t f : y) block.push_back(pos_lit(static_cast<int>(f) + 1));
        map_clauses.push_back(std::move(block));
        out.cxps.push_back(std::move(y));
      }
    } catch (const UnknownResultError&) {
      out.complete = false;
      return out;
    }
  }
}

// Minimal-hitting-set duality between the two families; meaningful only
// for complete listings over at most 64 features.
inline bool check_mhs_duality(const ExplanationListing& l, size_t arity) {
  if (!l.complete) throw NotApplicableError("duality check needs a complete listing");
  if (arity > 64) throw TooLargeError("duality check supports up to 64 features");
  auto mask = [](const std::set<size_t>& s) {
    uint64_t v = 0;
    for (size_t f : s) v |= uint64_t(1) << f;
    return v;
  };
  std::vector<uint64_t> a, c;
  for (const auto& s : l.axps) a.push_back(mask(s));
  for (const auto& s : l.cxps) c.push_back(mask(s));
  auto hits_all = [](uint64_t s, const std::vector<uint64_t>& fam) {
    for (uint64_t t : fam)
      if (!(s & t)) return false;
    return true;
  };
  auto is_mhs = [&](uint64_t s, const std::vector<uint64_t>& fam) {
    if (!hits_all(s, fam)) return false;
    for (uint64_t rem = s; rem;) {
      uint64_t f = rem & (~rem + 1);
      rem ^= f;
      if (hits_all(s ^ f, fam)) return false;
    }
    return true;
  };
  for (uint64_t s : a)
    if (!is_mhs(s, c)) return false;
  for (uint64_t s : c)
    if (!is_mhs(s, a)) return false;
  return true;
}

}  // namespace aex
