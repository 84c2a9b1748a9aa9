#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "aex/distance.hpp"
#include "aex/errors.hpp"
#include "aex/formula.hpp"
#include "aex/model.hpp"
#include "aex/solver.hpp"

namespace aex {

constexpr uint64_t kMaxEncodedDomain = 4096;
constexpr uint64_t kMaxEncodedLookup = 1u << 16;

namespace detail {

// Integer scaling of a rational list: returns coefficients c_i with
// c_i = L * r_i for the smallest common denominator L.
struct ScaledInts {
  std::vector<int64_t> coefs;
  BigInt scale = 1;
};

inline int64_t to_i64_checked(const BigInt& v) {
  static const BigInt lim = BigInt(1) << 60;
  if (v > lim || v < -lim) throw EncodingError("scaled coefficient overflow");
  return v.convert_to<int64_t>();
}

inline ScaledInts scale_rationals(const std::vector<Rat>& rs) {
  ScaledInts out;
  for (const auto& r : rs) out.scale = lcm(out.scale, BigInt(denominator(r)));
  out.coefs.reserve(rs.size());
  for (const auto& r : rs)
    out.coefs.push_back(to_i64_checked(BigInt(numerator(r)) * (out.scale / BigInt(denominator(r)))));
  return out;
}

inline void exactly_one(Formula& F, const std::vector<int>& vars) {
  Clause at_least;
  for (int v : vars) at_least.push_back(pos_lit(v));
  F.add_clause(at_least);
  if (vars.size() <= 64) {
    for (size_t i = 0; i < vars.size(); ++i)
      for (size_t j = i + 1; j < vars.size(); ++j)
        F.add_clause({neg_lit(vars[i]), neg_lit(vars[j])});
  } else {
    PbConstraint pb;
    pb.rel = PbRel::Le;
    pb.bound = 1;
    for (int v : vars) pb.terms.push_back({1, pos_lit(v)});
    F.add_pb(pb);
  }
}

// Literal that is true iff feature f of copy c takes value index k.
inline Lit value_lit(const VarMap& vars, Copy c, size_t f, uint64_t k) {
  if (!vars.registered(c, f))
    throw EncodingError("feature " + std::to_string(f + 1) +
                        " used before encode_inputs registered it");
  const auto& slot = vars.input_layout(c)[f];
  if (!slot.onehot) return k == 1 ? pos_lit(slot.vars[0]) : neg_lit(slot.vars[0]);
  return pos_lit(slot.vars.at(static_cast<size_t>(k)));
}

}  // namespace detail

// Registers input variables for one copy and constrains one-hot blocks.
inline void encode_inputs(Formula& F, const FeatureSpace& space, Copy c) {
  for (size_t f = 0; f < space.arity(); ++f) {
    const Domain& d = space.domains[f];
    if (!d.discrete())
      throw EncodingError("feature " + std::to_string(f + 1) +
                          " is continuous; solver encodings need a discrete space");
    if (F.vars.registered(c, f)) continue;
    if (d.kind == Domain::Kind::Binary) {
      F.vars.binary_input(c, f);
      continue;
    }
    uint64_t n = d.size();
    if (n > kMaxEncodedDomain)
      throw EncodingError("feature " + std::to_string(f + 1) + " has " +
                          std::to_string(n) + " values; too large to encode");
    auto vars = F.vars.onehot_input(c, f, n);
    detail::exactly_one(F, vars);
  }
}

namespace detail {

// Reifies  sum terms >= bound  into indicator `g`:
//   g -> sum >= bound    and    ~g -> sum <= bound - 1.
// min_sum/max_sum bound the reachable values of the term sum.
inline void reify_ge(Formula& F, std::vector<PbTerm> terms, int64_t bound, int64_t min_sum,
                     int64_t max_sum, int g) {
  if (bound <= min_sum) {
    F.add_unit(pos_lit(g));
    return;
  }
  if (bound > max_sum) {
    F.add_unit(neg_lit(g));
    return;
  }
  {
    PbConstraint fwd;
    fwd.terms = terms;
    fwd.terms.push_back({bound - min_sum, neg_lit(g)});
    fwd.rel = PbRel::Ge;
    fwd.bound = bound;
    F.add_pb(std::move(fwd));
  }
  {
    PbConstraint bwd;
    bwd.terms = std::move(terms);
    bwd.terms.push_back({bound - 1 - max_sum, pos_lit(g)});
    bwd.rel = PbRel::Le;
    bwd.bound = bound - 1;
    F.add_pb(std::move(bwd));
  }
}

inline std::vector<int> encode_linear(Formula& F, const Classifier& m, const LinearBody& body,
                                      Copy c) {
  if (m.classes.size() != 2)
    throw EncodingError("threshold rule encodes only two-class models");
  if (body.weights.size() != m.space.arity())
    throw DimensionError("weight arity mismatch");
  // Collect w_f * value for every admissible value, plus the bias.
  std::vector<Rat> rats;
  for (size_t f = 0; f < m.space.arity(); ++f) {
    const Domain& d = m.space.domains[f];
    for (uint64_t k = 0; k < d.size(); ++k) rats.push_back(body.weights[f] * d.value_at(k));
  }
  rats.push_back(body.bias);
  auto scaled = scale_rationals(rats);
  const int64_t B = scaled.coefs.back();  // L * bias

  std::vector<PbTerm> terms;
  int64_t min_sum = 0, max_sum = 0, offset = 0;
  size_t pos = 0;
  for (size_t f = 0; f < m.space.arity(); ++f) {
    const Domain& d = m.space.domains[f];
    const uint64_t n = d.size();
    if (d.kind == Domain::Kind::Binary) {
      // value 0 contributes coefs[pos], value 1 contributes coefs[pos+1]
      const int64_t c0 = scaled.coefs[pos], c1 = scaled.coefs[pos + 1];
      offset += c0;
      if (c1 != c0) terms.push_back({c1 - c0, value_lit(F.vars, c, f, 1)});
      min_sum += std::min(c0, c1);
      max_sum += std::max(c0, c1);
    } else {
      int64_t lo = scaled.coefs[pos], hi = scaled.coefs[pos];
      for (uint64_t k = 0; k < n; ++k) {
        const int64_t ck = scaled.coefs[pos + k];
        if (ck != 0) terms.push_back({ck, value_lit(F.vars, c, f, k)});
        lo = std::min(lo, ck);
        hi = std::max(hi, ck);
      }
      min_sum += lo;
      max_sum += hi;
    }
    pos += n;
  }

  auto inds = F.vars.class_indicators(c, 2);
  exactly_one(F, inds);
  reify_ge(F, std::move(terms), B - offset, min_sum, max_sum, inds[1]);
  return inds;
}

inline std::vector<int> encode_lookup(Formula& F, const Classifier& m, const LookupBody& body,
                                      Copy c) {
  uint64_t total = 1;
  for (const auto& d : m.space.domains) {
    total *= d.size();
    if (total > kMaxEncodedLookup)
      throw EncodingError("lookup table too large to encode");
  }
  if (body.table.size() != total) throw EncodingError("lookup table is not total");
  auto inds = F.vars.class_indicators(c, m.classes.size());
  exactly_one(F, inds);
  for (const auto& [key, label] : body.table) {
    if (label < 0 || static_cast<size_t>(label) >= m.classes.size())
      throw EncodingError("lookup label out of range");
    Clause cl;
    for (size_t f = 0; f < key.size(); ++f)
      cl.push_back(~value_lit(F.vars, c, f, key[f]));
    cl.push_back(pos_lit(inds[static_cast<size_t>(label)]));
    F.add_clause(std::move(cl));
  }
  return inds;
}

inline std::vector<int> encode_bnn(Formula& F, const Classifier& m, const BnnBody& body,
                                   Copy c) {
  // Activation literals: layer 0 = inputs mapped 0/1 -> -1/+1.
  std::vector<Lit> act;
  for (size_t f = 0; f < m.space.arity(); ++f) {
    if (m.space.domains[f].kind != Domain::Kind::Binary)
      throw EncodingError("signed-binary body needs binary features");
    act.push_back(value_lit(F.vars, c, f, 1));
  }
  for (const auto& layer : body.hidden) {
    std::vector<Lit> next;
    for (size_t j = 0; j < layer.weights.size(); ++j) {
      const auto& w = layer.weights[j];
      if (w.size() != act.size()) throw EncodingError("layer width mismatch");
      const int64_t d = static_cast<int64_t>(w.size());
      // Fires iff U >= K where U counts sign-aligned inputs:
      // sum w*a = 2U - d, so the threshold test is U >= ceil((t+d)/2).
      const int64_t td = layer.thresholds[j] + d;
      const int64_t K = td >= 0 ? (td + 1) / 2 : -((-td) / 2);
      std::vector<PbTerm> terms;
      for (size_t i = 0; i < w.size(); ++i)
        terms.push_back({1, w[i] > 0 ? act[i] : ~act[i]});
      const int o = F.vars.fresh();
      reify_ge(F, std::move(terms), K, 0, d, o);
      next.push_back(pos_lit(o));
    }
    act = std::move(next);
  }

  const size_t K = m.classes.size();
  if (body.output_weights.size() != K) throw EncodingError("output class count mismatch");
  auto inds = F.vars.class_indicators(c, K);
  exactly_one(F, inds);
  // Pairwise score comparisons on the differing weight positions:
  // s_k - s_j = 2 * sum_{i in diff} ({+1 if w_k=+1} a_i - ...), expressed
  // over activation lits with coefficients +-2 and a constant.
  for (size_t k = 0; k < K; ++k) {
    std::vector<Lit> gs;
    for (size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      std::vector<PbTerm> terms;
      int64_t constant = 0, min_sum = 0, max_sum = 0;
      for (size_t i = 0; i < act.size(); ++i) {
        const int wk = body.output_weights[k][i], wj = body.output_weights[j][i];
        if (wk == wj) continue;
        // contribution (wk - wj) * a_i = +-2 * a_i with a_i = 2 lit - 1
        if (wk > wj) {
          terms.push_back({4, act[i]});
          constant += -2;
          max_sum += 4;
        } else {
          terms.push_back({-4, act[i]});
          constant += 2;
          min_sum += -4;
        }
      }
      // s_k - s_j = sum(terms) + constant; need >= 1 for j < k, >= 0 otherwise.
      const int64_t need = (j < k ? 1 : 0) - constant;
      const int g = F.vars.fresh();
      reify_ge(F, std::move(terms), need, min_sum, max_sum, g);
      gs.push_back(pos_lit(g));
    }
    Clause back;
    for (const Lit& g : gs) {
      F.add_clause({neg_lit(inds[k]), g});
      back.push_back(~g);
    }
    back.push_back(pos_lit(inds[k]));
    F.add_clause(std::move(back));
  }
  return inds;
}

}  // namespace detail

// Encodes one copy of the classifier; returns the class indicator vars.
// encode_inputs must have been called for the same copy.
inline std::vector<int> encode_classifier(Formula& F, const Classifier& m, Copy c) {
  for (size_t f = 0; f < m.space.arity(); ++f)
    if (!m.space.domains[f].discrete())
      throw EncodingError("feature " + std::to_string(f + 1) +
                          " is continuous; solver encodings need a discrete space");
  return std::visit(
      [&](const auto& b) -> std::vector<int> {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, LinearBody>) return detail::encode_linear(F, m, b, c);
        else if constexpr (std::is_same_v<T, LookupBody>) return detail::encode_lookup(F, m, b, c);
        else if constexpr (std::is_same_v<T, BnnBody>) return detail::encode_bnn(F, m, b, c);
        else
          throw EncodingError("guarded piecewise bodies are handled by interval analysis, not encoding");
      },
      m.body);
}

// Restricts copy `c` to the closed epsilon-ball around center v.
inline void encode_distance_center(Formula& F, const FeatureSpace& space,
                                   const DistanceSpec& spec, const Point& v, Copy c) {
  const size_t m = space.arity();
  if (spec.p == Norm::L0) {
    const int64_t k = l0_budget(spec.epsilon);
    if (k >= static_cast<int64_t>(m)) return;
    if (k <= 0) {
      for (size_t f = 0; f < m; ++f)
        F.add_clause({detail::value_lit(F.vars, c, f, *space.domains[f].index_of(v[f]))});
      return;
    }
    PbConstraint pb;
    pb.rel = PbRel::Le;
    pb.bound = k;
    for (size_t f = 0; f < m; ++f)
      pb.terms.push_back({1, ~detail::value_lit(F.vars, c, f, *space.domains[f].index_of(v[f]))});
    F.add_pb(std::move(pb));
    return;
  }
  if (spec.p == Norm::Linf) {
    for (size_t f = 0; f < m; ++f) {
      const Domain& d = space.domains[f];
      for (uint64_t k = 0; k < d.size(); ++k)
        if (rat_abs(d.value_at(k) - v[f]) > spec.epsilon)
          F.add_clause({~detail::value_lit(F.vars, c, f, k)});
    }
    return;
  }
  // L1 / L2: weighted PB over per-value deviations, exact scaling.
  std::vector<Rat> devs;
  for (size_t f = 0; f < m; ++f) {
    const Domain& d = space.domains[f];
    for (uint64_t k = 0; k < d.size(); ++k) {
      Rat dd = rat_abs(d.value_at(k) - v[f]);
      devs.push_back(spec.p == Norm::L1 ? dd : dd * dd);
    }
  }
  devs.push_back(spec.p == Norm::L1 ? spec.epsilon : spec.epsilon * spec.epsilon);
  auto scaled = detail::scale_rationals(devs);
  PbConstraint pb;
  pb.rel = PbRel::Le;
  pb.bound = scaled.coefs.back();
  size_t pos = 0;
  for (size_t f = 0; f < m; ++f) {
    const Domain& d = space.domains[f];
    for (uint64_t k = 0; k < d.size(); ++k) {
      if (scaled.coefs[pos] != 0)
        pb.terms.push_back({scaled.coefs[pos], detail::value_lit(F.vars, c, f, k)});
      ++pos;
    }
  }
  F.add_pb(std::move(pb));
}

// Links two input copies so that their distance stays within the ball.
inline void encode_distance_dual(Formula& F, const FeatureSpace& space,
                                 const DistanceSpec& spec) {
  const size_t m = space.arity();
  if (spec.p == Norm::L0) {
    const int64_t k = l0_budget(spec.epsilon);
    if (k >= static_cast<int64_t>(m)) return;
    PbConstraint pb;
    pb.rel = PbRel::Le;
    pb.bound = std::max<int64_t>(k, 0);
    for (size_t f = 0; f < m; ++f) {
      const Domain& d = space.domains[f];
      const int diff = F.vars.fresh();
      if (d.kind == Domain::Kind::Binary) {
        Lit x = detail::value_lit(F.vars, Copy::X, f, 1);
        Lit y = detail::value_lit(F.vars, Copy::Y, f, 1);
        F.add_clause({pos_lit(diff), ~x, y});
        F.add_clause({pos_lit(diff), x, ~y});
        F.add_clause({neg_lit(diff), x, y});
        F.add_clause({neg_lit(diff), ~x, ~y});
      } else {
        for (uint64_t kv = 0; kv < d.size(); ++kv) {
          Lit x = detail::value_lit(F.vars, Copy::X, f, kv);
          Lit y = detail::value_lit(F.vars, Copy::Y, f, kv);
          F.add_clause({pos_lit(diff), ~x, y});
          F.add_clause({pos_lit(diff), x, ~y});
        }
      }
      pb.terms.push_back({1, pos_lit(diff)});
    }
    F.add_pb(std::move(pb));
    return;
  }
  if (spec.p != Norm::Linf)
    throw EncodingError("dual-copy distance supports l0 and linf");
  for (size_t f = 0; f < m; ++f) {
    const Domain& d = space.domains[f];
    const uint64_t n = d.size();
    if (n * n > 200'000) throw EncodingError("domain too large for pairwise distance clauses");
    for (uint64_t a = 0; a < n; ++a)
      for (uint64_t b = 0; b < n; ++b)
        if (rat_abs(d.value_at(a) - d.value_at(b)) > spec.epsilon)
          F.add_clause({~detail::value_lit(F.vars, Copy::X, f, a),
                        ~detail::value_lit(F.vars, Copy::Y, f, b)});
  }
}

// Fixes the features in Q of copy `c` to their values in v.
inline void encode_fixed(Formula& F, const FeatureSpace& space, const Point& v,
                         const std::set<size_t>& q, Copy c) {
  for (size_t f : q) {
    if (f >= space.arity()) throw PreconditionError("fixed-feature index out of range");
    auto idx = space.domains[f].index_of(v[f]);
    if (!idx) throw DomainError("fixed value outside its domain");
    F.add_clause({detail::value_lit(F.vars, c, f, *idx)});
  }
}

// Requires / forbids one predicted class for a copy.
inline void encode_class_is(Formula& F, const std::vector<int>& inds, int class_idx,
                            bool equal) {
  if (class_idx < 0 || static_cast<size_t>(class_idx) >= inds.size())
    throw PreconditionError("class index out of range");
  F.add_unit(equal ? pos_lit(inds[static_cast<size_t>(class_idx)])
                   : neg_lit(inds[static_cast<size_t>(class_idx)]));
}

// Requires the two copies to be classified differently.
inline void encode_disagree(Formula& F, const std::vector<int>& inds_x,
                            const std::vector<int>& inds_y) {
  if (inds_x.size() != inds_y.size()) throw EncodingError("class indicator arity mismatch");
  for (size_t k = 0; k < inds_x.size(); ++k)
    F.add_clause({neg_lit(inds_x[k]), neg_lit(inds_y[k])});
}

// Reads one input copy back out of a model.
inline Point decode(const SolveResult& res, const VarMap& vars, Copy c,
                    const FeatureSpace& space) {
  if (res.status != SolveStatus::Sat) throw PreconditionError("decode needs a Sat result");
  const auto& layout = vars.input_layout(c);
  if (layout.size() < space.arity()) throw PreconditionError("copy has no registered inputs");
  Point x(space.arity());
  for (size_t f = 0; f < space.arity(); ++f) {
    const auto& slot = layout[f];
    if (slot.vars.empty()) throw PreconditionError("feature without variables");
    if (!slot.onehot) {
      x[f] = space.domains[f].value_at(res.value(slot.vars[0]) ? 1 : 0);
      continue;
    }
    int found = -1;
    for (size_t k = 0; k < slot.vars.size(); ++k) {
      if (res.value(slot.vars[k])) {
        if (found >= 0) throw SoundnessError("one-hot block with two true values");
        found = static_cast<int>(k);
      }
    }
    if (found < 0) throw SoundnessError("one-hot block with no true value");
    x[f] = space.domains[f].value_at(static_cast<uint64_t>(found));
  }
  return x;
}

// Predicted class of a copy according to its indicator block.
inline ClassLabel decode_class(const SolveResult& res, const VarMap& vars, Copy c) {
  const auto& inds = vars.class_indicators(c);
  int found = -1;
  for (size_t k = 0; k < inds.size(); ++k) {
    if (res.value(inds[k])) {
      if (found >= 0) throw SoundnessError("two class indicators set");
      found = static_cast<int>(k);
    }
  }
  if (found < 0) throw SoundnessError("no class indicator set");
  return ClassLabel(found);
}

}  // namespace aex
