#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "aex/errors.hpp"
#include "aex/formula.hpp"

namespace aex {

// A constraint brought to the form  sum c_i * l_i >= bound  with all
// c_i > 0, saturated at the bound and gcd-reduced.
struct NormalizedPb {
  enum class Status { Normal, Taut, Contra };
  Status status = Status::Normal;
  std::vector<PbTerm> terms;  // sorted by coef desc, then var asc
  int64_t bound = 0;

  bool cardinality() const {
    for (const auto& t : terms)
      if (t.coef != terms[0].coef) return false;
    return true;
  }
};

namespace detail {

inline NormalizedPb normalize_ge(std::vector<PbTerm> terms, int64_t bound) {
  NormalizedPb out;
  // Flip negative coefficients onto negated literals.
  for (auto& t : terms) {
    if (t.coef == 0) continue;
    if (t.coef < 0) {
      t.coef = -t.coef;
      t.lit = ~t.lit;
      bound += t.coef;
    }
    out.terms.push_back(t);
  }
  if (bound <= 0) {
    out.status = NormalizedPb::Status::Taut;
    return out;
  }
  __int128 total = 0;
  for (auto& t : out.terms) {
    if (t.coef > bound) t.coef = bound;  // saturation
    total += t.coef;
  }
  if (total < bound) {
    out.status = NormalizedPb::Status::Contra;
    return out;
  }
  int64_t g = bound;
  for (const auto& t : out.terms) g = std::gcd(g, t.coef);
  if (g > 1) {
    for (auto& t : out.terms) t.coef /= g;
    bound = (bound + g - 1) / g;
  }
  out.bound = bound;
  std::sort(out.terms.begin(), out.terms.end(), [](const PbTerm& a, const PbTerm& b) {
    return a.coef != b.coef ? a.coef > b.coef : a.lit.var < b.lit.var;
  });
  return out;
}

}  // namespace detail

// Normalizes to >= form; Eq yields two entries, tautologies yield none.
inline std::vector<NormalizedPb> normalize_pb(const PbConstraint& pb) {
  pb.check_no_dup();
  std::vector<NormalizedPb> out;
  auto push = [&out](NormalizedPb n) {
    if (n.status != NormalizedPb::Status::Taut) out.push_back(std::move(n));
  };
  if (pb.rel == PbRel::Ge || pb.rel == PbRel::Eq)
    push(detail::normalize_ge(pb.terms, pb.bound));
  if (pb.rel == PbRel::Le || pb.rel == PbRel::Eq) {
    std::vector<PbTerm> flipped = pb.terms;
    for (auto& t : flipped) t.coef = -t.coef;
    push(detail::normalize_ge(std::move(flipped), -pb.bound));
  }
  return out;
}

namespace detail {

// Sinz sequential counter for  sum v_i <= k  (0 < k < n).
inline void seq_counter_le(const std::vector<Lit>& v, int64_t k, VarMap& vars,
                           std::vector<Clause>& out) {
  const size_t n = v.size();
  if (k >= static_cast<int64_t>(n)) return;  // vacuous
  if (k <= 0) {
    for (const Lit& l : v) out.push_back({~l});
    return;
  }
  // s[i][j], i in [1, n-1], j in [1, k]: "at least j of v_1..v_i are true"
  std::vector<std::vector<int>> s(n);
  for (size_t i = 1; i <= n - 1; ++i) {
    s[i].resize(static_cast<size_t>(k) + 1);
    for (int64_t j = 1; j <= k; ++j) s[i][static_cast<size_t>(j)] = vars.fresh();
  }
  auto S = [&s](size_t i, int64_t j) { return pos_lit(s[i][static_cast<size_t>(j)]); };

  out.push_back({~v[0], S(1, 1)});
  for (int64_t j = 2; j <= k; ++j) out.push_back({~S(1, j)});
  for (size_t i = 2; i <= n - 1; ++i) {
    out.push_back({~v[i - 1], S(i, 1)});
    out.push_back({~S(i - 1, 1), S(i, 1)});
    for (int64_t j = 2; j <= k; ++j) {
      out.push_back({~v[i - 1], ~S(i - 1, j - 1), S(i, j)});
      out.push_back({~S(i - 1, j), S(i, j)});
    }
    out.push_back({~v[i - 1], ~S(i - 1, k)});
  }
  out.push_back({~v[n - 1], ~S(n - 1, k)});
}

// Sequential weighted counter for  sum c_i v_i <= k  (all c_i > 0, k >= 1).
inline void seq_weighted_le(const std::vector<PbTerm>& tv, int64_t k, VarMap& vars,
                            std::vector<Clause>& out) {
  const size_t n = tv.size();
  if ((static_cast<__int128>(n) * k) > 4'000'000)
    throw EncodingError("PB translation too large; keep the constraint native");
  std::vector<std::vector<int>> s(n);  // s[i][j] "prefix sum over v_1..v_i >= j"
  for (size_t i = 1; i <= n - 1; ++i) {
    s[i].resize(static_cast<size_t>(k) + 1);
    for (int64_t j = 1; j <= k; ++j) s[i][static_cast<size_t>(j)] = vars.fresh();
  }
  auto S = [&s](size_t i, int64_t j) { return pos_lit(s[i][static_cast<size_t>(j)]); };

  for (size_t i = 1; i <= n; ++i) {
    const Lit vi = tv[i - 1].lit;
    const int64_t ci = tv[i - 1].coef;
    if (ci > k) {
      out.push_back({~vi});
      continue;
    }
    if (i <= n - 1) {
      for (int64_t j = 1; j <= std::min(ci, k); ++j) out.push_back({~vi, S(i, j)});
      if (i >= 2) {
        for (int64_t j = 1; j <= k; ++j) out.push_back({~S(i - 1, j), S(i, j)});
        for (int64_t j = 1; j + ci <= k; ++j)
          out.push_back({~vi, ~S(i - 1, j), S(i, j + ci)});
      }
    }
    if (i >= 2) out.push_back({~vi, ~S(i - 1, k + 1 - ci)});
  }
}

inline void translate_normalized(const NormalizedPb& n, VarMap& vars,
                                 std::vector<Clause>& out) {
  if (n.status == NormalizedPb::Status::Taut) return;
  if (n.status == NormalizedPb::Status::Contra) {
    out.push_back({});  // empty clause
    return;
  }
  std::vector<Lit> lits;
  lits.reserve(n.terms.size());
  for (const auto& t : n.terms) lits.push_back(t.lit);
  const int64_t nn = static_cast<int64_t>(lits.size());

  if (n.cardinality()) {
    const int64_t c0 = n.terms[0].coef;
    const int64_t need = (n.bound + c0 - 1) / c0;
    if (need >= nn) {
      for (const Lit& l : lits) out.push_back({l});
      return;
    }
    if (need == 1) {
      out.push_back(lits);
      return;
    }
    if (need == nn - 1) {
      // at most one of the negations may hold
      for (size_t i = 0; i < lits.size(); ++i)
        for (size_t j = i + 1; j < lits.size(); ++j)
          out.push_back({lits[i], lits[j]});
      return;
    }
    std::vector<Lit> flipped;
    flipped.reserve(lits.size());
    for (const Lit& l : lits) flipped.push_back(~l);
    seq_counter_le(flipped, nn - need, vars, out);
    return;
  }

  // Weighted: translate  sum c * ~l <= total - bound.
  __int128 total = 0;
  for (const auto& t : n.terms) total += t.coef;
  const int64_t slack = static_cast<int64_t>(total - n.bound);
  std::vector<PbTerm> flipped = n.terms;
  for (auto& t : flipped) t.lit = ~t.lit;
  if (slack == 0) {
    for (const auto& t : flipped) out.push_back({~t.lit});
    return;
  }
  seq_weighted_le(flipped, slack, vars, out);
}

}  // namespace detail

// Clause translation of one PB constraint; auxiliary variables are drawn
// from `vars`.
inline std::vector<Clause> pb_to_cnf(const PbConstraint& pb, VarMap& vars) {
  std::vector<Clause> out;
  for (const auto& n : normalize_pb(pb)) detail::translate_normalized(n, vars, out);
  return out;
}

// Replaces every PB constraint of the formula with clauses.
inline void translate_pbs(Formula& f) {
  std::vector<PbConstraint> pbs;
  pbs.swap(f.pbs);
  for (const auto& pb : pbs) {
    auto cls = pb_to_cnf(pb, f.vars);
    for (auto& c : cls) f.clauses.push_back(std::move(c));
  }
}

}  // namespace aex
