#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "aex/domain.hpp"
#include "aex/errors.hpp"
#include "aex/rational.hpp"

namespace aex {

// Class label; index() is a position into Classifier::classes.
struct ClassLabel {
  int idx = -1;  // -1 = abstain

  ClassLabel() = default;
  explicit ClassLabel(int i) : idx(i) {}
  static ClassLabel abstain() { return ClassLabel(); }

  bool is_abstain() const { return idx < 0; }
  bool operator==(const ClassLabel& o) const { return idx == o.idx; }
  bool operator!=(const ClassLabel& o) const { return idx != o.idx; }
};

// Binary threshold rule: class 1 iff w.x - b >= 0 (non-strict).
struct LinearBody {
  std::vector<Rat> weights;
  Rat bias = 0;

  Rat score(const Point& x) const {
    Rat s = -bias;
    for (size_t i = 0; i < weights.size(); ++i) s += weights[i] * x[i];
    return s;
  }
};

enum class Rel { Le, Lt, Ge, Gt, Eq };

inline const char* rel_name(Rel r) {
  switch (r) {
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
    case Rel::Eq: return "==";
  }
  return "?";
}

// Guard atom: (w.x - b) REL 0.
struct GuardAtom {
  std::vector<Rat> weights;
  Rat bias = 0;
  Rel rel = Rel::Ge;

  bool holds(const Point& x) const {
    Rat s = -bias;
    for (size_t i = 0; i < weights.size(); ++i) s += weights[i] * x[i];
    switch (rel) {
      case Rel::Le: return s <= 0;
      case Rel::Lt: return s < 0;
      case Rel::Ge: return s >= 0;
      case Rel::Gt: return s > 0;
      case Rel::Eq: return s == 0;
    }
    return false;
  }

  // Number of features with nonzero weight.
  size_t support() const {
    size_t n = 0;
    for (const auto& w : weights)
      if (w != 0) ++n;
    return n;
  }
};

struct Classifier;

// Ordered guarded branches; first branch whose guard conjunction holds
// fires. The last branch must have an empty (always-true) guard so the
// body is total.
struct PiecewiseBody {
  struct Branch {
    std::vector<GuardAtom> guard;  // conjunction; empty = true
    std::shared_ptr<const Classifier> sub;
  };
  std::vector<Branch> branches;
};

// Signed-binary network: inputs in {-1,+1} (binary features 0/1 are
// mapped to -1/+1), hidden neurons fire sign(sum w*a - t) with
// non-strict >=, output scores argmax with lowest index winning ties.
struct BnnBody {
  struct Layer {
    // weights[j][i] in {-1,+1}: input i -> neuron j
    std::vector<std::vector<int8_t>> weights;
    std::vector<int64_t> thresholds;  // one per neuron
  };
  std::vector<Layer> hidden;
  std::vector<std::vector<int8_t>> output_weights;  // [class][last hidden]
};

// Total lookup table over a discrete space, keyed by per-feature value
// indices.
struct LookupBody {
  std::map<std::vector<uint32_t>, int> table;
};

using Body = std::variant<LinearBody, PiecewiseBody, BnnBody, LookupBody>;

struct Classifier {
  FeatureSpace space;
  std::vector<std::string> classes;  // |classes| >= 2
  Body body;
  std::string name = "model";
};

namespace detail {

inline ClassLabel eval_body(const Classifier& m, const Point& x);

inline ClassLabel eval_linear(const Classifier& m, const LinearBody& b, const Point& x) {
  if (b.weights.size() != x.size()) throw DimensionError("weight arity mismatch");
  return ClassLabel(b.score(x) >= 0 ? 1 : 0);
}

inline ClassLabel eval_piecewise(const Classifier&, const PiecewiseBody& b, const Point& x) {
  for (const auto& br : b.branches) {
    bool ok = true;
    for (const auto& g : br.guard)
      if (!g.holds(x)) {
        ok = false;
        break;
      }
    if (ok) return eval_body(*br.sub, x);
  }
  throw DomainError("piecewise guards do not cover the point");
}

inline ClassLabel eval_bnn(const Classifier& m, const BnnBody& b, const Point& x) {
  std::vector<int64_t> act(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (m.space.domains[i].kind != Domain::Kind::Binary)
      throw DomainError("signed-binary body needs binary features");
    act[i] = x[i] == 1 ? 1 : -1;
  }
  for (const auto& layer : b.hidden) {
    std::vector<int64_t> next(layer.weights.size());
    for (size_t j = 0; j < layer.weights.size(); ++j) {
      if (layer.weights[j].size() != act.size())
        throw DimensionError("layer width mismatch");
      int64_t s = 0;
      for (size_t i = 0; i < act.size(); ++i) s += layer.weights[j][i] * act[i];
      next[j] = s >= layer.thresholds[j] ? 1 : -1;
    }
    act = std::move(next);
  }
  int best = 0;
  int64_t best_score = 0;
  for (size_t k = 0; k < b.output_weights.size(); ++k) {
    if (b.output_weights[k].size() != act.size())
      throw DimensionError("output width mismatch");
    int64_t s = 0;
    for (size_t i = 0; i < act.size(); ++i) s += b.output_weights[k][i] * act[i];
    if (k == 0 || s > best_score) {
      best = static_cast<int>(k);
      best_score = s;
    }
  }
  return ClassLabel(best);
}

inline ClassLabel eval_lookup(const Classifier& m, const LookupBody& b, const Point& x) {
  std::vector<uint32_t> key(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    auto idx = m.space.domains[i].index_of(x[i]);
    if (!idx) throw DomainError("lookup key outside domain");
    key[i] = static_cast<uint32_t>(*idx);
  }
  auto it = b.table.find(key);
  if (it == b.table.end()) throw DomainError("lookup table is not total");
  return ClassLabel(it->second);
}

inline ClassLabel eval_body(const Classifier& m, const Point& x) {
  return std::visit(
      [&](const auto& b) -> ClassLabel {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, LinearBody>) return eval_linear(m, b, x);
        else if constexpr (std::is_same_v<T, PiecewiseBody>) return eval_piecewise(m, b, x);
        else if constexpr (std::is_same_v<T, BnnBody>) return eval_bnn(m, b, x);
        else return eval_lookup(m, b, x);
      },
      m.body);
}

}  // namespace detail

inline ClassLabel evaluate(const Classifier& m, const Point& x) {
  m.space.check_point(x);
  return detail::eval_body(m, x);
}

// Evaluation by per-feature value indices (discrete spaces).
inline ClassLabel evaluate_by_index(const Classifier& m, const std::vector<uint32_t>& key,
                                    const std::vector<std::vector<Rat>>& value_tables) {
  if (const auto* lb = std::get_if<LookupBody>(&m.body)) {
    auto it = lb->table.find(key);
    if (it == lb->table.end()) throw DomainError("lookup table is not total");
    return ClassLabel(it->second);
  }
  Point x(key.size());
  for (size_t i = 0; i < key.size(); ++i) x[i] = value_tables[i][key[i]];
  return detail::eval_body(m, x);
}

// Per-feature admissible value lists for a fully discrete space.
inline std::vector<std::vector<Rat>> value_tables(const FeatureSpace& space) {
  std::vector<std::vector<Rat>> t(space.arity());
  for (size_t i = 0; i < space.arity(); ++i) {
    const Domain& d = space.domains[i];
    if (!d.discrete()) throw DomainError("value tables need a discrete space");
    uint64_t n = d.size();
    t[i].reserve(n);
    for (uint64_t k = 0; k < n; ++k) t[i].push_back(d.value_at(k));
  }
  return t;
}

struct Instance {
  Point v;
  ClassLabel c;
};

// An explanation problem fixes a classifier together with one of its
// own predictions.
struct ExplanationProblem {
  std::shared_ptr<const Classifier> model;
  Instance inst;
};

inline ExplanationProblem make_problem(std::shared_ptr<const Classifier> m, Point v) {
  ClassLabel c = evaluate(*m, v);
  return ExplanationProblem{std::move(m), Instance{std::move(v), c}};
}

inline ExplanationProblem make_problem(std::shared_ptr<const Classifier> m, Point v,
                                       ClassLabel c) {
  ClassLabel actual = evaluate(*m, v);
  if (actual != c)
    throw InvalidInstanceError("instance label " + std::to_string(c.idx) +
                               " but classifier yields " + std::to_string(actual.idx));
  return ExplanationProblem{std::move(m), Instance{std::move(v), c}};
}

inline ExplanationProblem make_problem(const Classifier& m, Point v) {
  return make_problem(std::make_shared<Classifier>(m), std::move(v));
}

}  // namespace aex
