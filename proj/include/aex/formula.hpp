#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aex/domain.hpp"
#include "aex/errors.hpp"

namespace aex {

// Propositional literal over positive variable indices 1..n.
struct Lit {
  int var = 0;
  bool pos = true;

  Lit() = default;
  Lit(int v, bool p) : var(v), pos(p) {}

  Lit operator~() const { return Lit(var, !pos); }
  int dimacs() const { return pos ? var : -var; }
  bool operator==(const Lit& o) const { return var == o.var && pos == o.pos; }
  bool operator<(const Lit& o) const {
    return var != o.var ? var < o.var : pos < o.pos;
  }
};

inline Lit pos_lit(int v) { return Lit(v, true); }
inline Lit neg_lit(int v) { return Lit(v, false); }

using Clause = std::vector<Lit>;

enum class PbRel { Ge, Le, Eq };

struct PbTerm {
  int64_t coef = 0;
  Lit lit;
};

// Linear pseudo-Boolean constraint: sum coef_i * lit_i REL bound.
// Coefficients may be negative; normalization happens at use sites.
struct PbConstraint {
  std::vector<PbTerm> terms;
  PbRel rel = PbRel::Ge;
  int64_t bound = 0;

  void check_no_dup() const {
    std::vector<int> vars;
    vars.reserve(terms.size());
    for (const auto& t : terms) vars.push_back(t.lit.var);
    std::sort(vars.begin(), vars.end());
    for (size_t i = 1; i < vars.size(); ++i)
      if (vars[i] == vars[i - 1])
        throw EncodingError("duplicate variable in PB constraint");
  }
};

// Which copy of the input a variable belongs to in dual-copy queries.
enum class Copy { X, Y };

// Allocates solver variables and remembers how input features map onto
// them: binary features get one variable (true = value index 1), wider
// discrete features get a one-hot block (one variable per value index).
class VarMap {
 public:
  int count() const { return next_ - 1; }

  int fresh() { return next_++; }

  bool has_inputs(Copy c) const { return !inputs(c).empty(); }

  // Registers feature `f` of a binary domain; idempotent.
  int binary_input(Copy c, size_t f) {
    auto& slot = inputs(c);
    ensure_slot(slot, f);
    if (slot[f].vars.empty()) {
      slot[f].onehot = false;
      slot[f].vars.push_back(fresh());
    }
    return slot[f].vars[0];
  }

  // Registers feature `f` with a one-hot block of `n` values; idempotent.
  const std::vector<int>& onehot_input(Copy c, size_t f, uint64_t n) {
    auto& slot = inputs(c);
    ensure_slot(slot, f);
    if (slot[f].vars.empty()) {
      slot[f].onehot = true;
      for (uint64_t k = 0; k < n; ++k) slot[f].vars.push_back(fresh());
    } else if (slot[f].vars.size() != n || !slot[f].onehot) {
      throw EncodingError("conflicting input registration");
    }
    return slot[f].vars;
  }

  struct InputVars {
    bool onehot = false;
    std::vector<int> vars;
  };

  const std::vector<InputVars>& input_layout(Copy c) const { return inputs(c); }

  bool registered(Copy c, size_t f) const {
    const auto& slot = inputs(c);
    return f < slot.size() && !slot[f].vars.empty();
  }

  // Class indicator variables, one block per copy.
  const std::vector<int>& class_indicators(Copy c, size_t nclasses) {
    auto& ind = c == Copy::X ? class_x_ : class_y_;
    if (ind.empty())
      for (size_t k = 0; k < nclasses; ++k) ind.push_back(fresh());
    else if (ind.size() != nclasses)
      throw EncodingError("conflicting class indicator registration");
    return ind;
  }

  const std::vector<int>& class_indicators(Copy c) const {
    return c == Copy::X ? class_x_ : class_y_;
  }

 private:
  std::vector<InputVars>& inputs(Copy c) { return c == Copy::X ? in_x_ : in_y_; }
  const std::vector<InputVars>& inputs(Copy c) const {
    return c == Copy::X ? in_x_ : in_y_;
  }
  static void ensure_slot(std::vector<InputVars>& v, size_t f) {
    if (f >= v.size()) v.resize(f + 1);
  }

  int next_ = 1;
  std::vector<InputVars> in_x_, in_y_;
  std::vector<int> class_x_, class_y_;
};

// CNF clauses plus native PB constraints over one variable map.
struct Formula {
  VarMap vars;
  std::vector<Clause> clauses;
  std::vector<PbConstraint> pbs;

  void add_clause(Clause c) { clauses.push_back(std::move(c)); }
  void add_unit(Lit l) { clauses.push_back({l}); }
  void add_pb(PbConstraint pb) {
    pb.check_no_dup();
    pbs.push_back(std::move(pb));
  }
};

}  // namespace aex
