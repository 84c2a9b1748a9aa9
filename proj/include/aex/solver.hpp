#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

#include "aex/errors.hpp"
#include "aex/formula.hpp"
#include "aex/pb2cnf.hpp"

namespace aex {

enum class SolveStatus { Sat, Unsat, ResourceOut };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    case SolveStatus::ResourceOut: return "resource-out";
  }
  return "?";
}

struct SolveBudget {
  int64_t max_conflicts = 2'000'000;  // <= 0: unlimited
  double max_seconds = 0;             // <= 0: unlimited
};

struct SolveStats {
  int64_t decisions = 0;
  int64_t conflicts = 0;
  int64_t propagations = 0;
  int64_t restarts = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::ResourceOut;
  std::vector<uint8_t> model;  // indexed by var, [0] unused
  SolveStats stats;

  bool value(int var) const { return model[static_cast<size_t>(var)] != 0; }
};

// True iff `model` (indexed by var) satisfies every clause and PB
// constraint of the formula.
inline bool check_model(const Formula& f, const std::vector<uint8_t>& model) {
  auto sat = [&model](const Lit& l) {
    if (l.var <= 0 || static_cast<size_t>(l.var) >= model.size()) return false;
    return (model[static_cast<size_t>(l.var)] != 0) == l.pos;
  };
  for (const auto& c : f.clauses) {
    bool ok = false;
    for (const auto& l : c)
      if (sat(l)) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  for (const auto& pb : f.pbs) {
    __int128 s = 0;
    for (const auto& t : pb.terms)
      if (sat(t.lit)) s += t.coef;
    switch (pb.rel) {
      case PbRel::Ge:
        if (s < pb.bound) return false;
        break;
      case PbRel::Le:
        if (s > pb.bound) return false;
        break;
      case PbRel::Eq:
        if (s != pb.bound) return false;
        break;
    }
  }
  return true;
}

// Conflict-driven clause learning with watched literals, first-UIP
// learning, phase saving, Luby restarts, and counter-based propagation
// for native PB constraints (lazy reason clauses). Deterministic: static
// ascending branching order, initial phase false.
class Solver {
 public:
  explicit Solver(int nvars) { grow_to(nvars); }

  void grow_to(int nvars) {
    if (nvars < nvars_) return;
    nvars_ = nvars;
    assign_.resize(static_cast<size_t>(nvars_) + 1, kUndef);
    phase_.resize(static_cast<size_t>(nvars_) + 1, 0);
    level_.resize(static_cast<size_t>(nvars_) + 1, 0);
    pos_.resize(static_cast<size_t>(nvars_) + 1, 0);
    reason_kind_.resize(static_cast<size_t>(nvars_) + 1, kNoReason);
    reason_idx_.resize(static_cast<size_t>(nvars_) + 1, 0);
    watches_.resize(2 * static_cast<size_t>(nvars_) + 2);
    occ_.resize(2 * static_cast<size_t>(nvars_) + 2);
  }

  void add_clause(const Clause& c) {
    if (!ok_) return;
    std::vector<int> lits;
    lits.reserve(c.size());
    for (const Lit& l : c) {
      if (l.var <= 0) throw EncodingError("literal with nonpositive variable");
      grow_to(l.var);
      lits.push_back(ilit(l));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (size_t i = 1; i < lits.size(); ++i)
      if ((lits[i] ^ 1) == lits[i - 1]) return;  // tautology
    if (lits.empty()) {
      ok_ = false;
      return;
    }
    if (lits.size() == 1) {
      units_.push_back(lits[0]);
      return;
    }
    int cref = static_cast<int>(clauses_.size());
    clauses_.push_back({std::move(lits)});
    attach(cref);
  }

  void add_pb(const PbConstraint& pb) {
    if (!ok_) return;
    for (const auto& t : pb.terms) {
      if (t.lit.var <= 0) throw EncodingError("literal with nonpositive variable");
      grow_to(t.lit.var);
    }
    for (const auto& n : normalize_pb(pb)) {
      if (n.status == NormalizedPb::Status::Contra) {
        ok_ = false;
        return;
      }
      const int64_t c0 = n.terms[0].coef;
      const int64_t need = (n.bound + c0 - 1) / c0;
      const int64_t nn = static_cast<int64_t>(n.terms.size());
      if (n.cardinality() && need == 1) {
        Clause cl;
        for (const auto& t : n.terms) cl.push_back(t.lit);
        add_clause(cl);
        continue;
      }
      if (n.cardinality() && need >= nn) {
        for (const auto& t : n.terms) add_clause({t.lit});
        continue;
      }
      PbC p;
      __int128 total = 0;
      for (const auto& t : n.terms) {
        p.coefs.push_back(t.coef);
        p.lits.push_back(ilit(t.lit));
        total += t.coef;
      }
      if (total > (static_cast<__int128>(1) << 62))
        throw EncodingError("PB constraint weight overflow");
      p.bound = n.bound;
      p.slack = static_cast<int64_t>(total) - n.bound;
      int pbi = static_cast<int>(pbs_.size());
      for (size_t t = 0; t < p.lits.size(); ++t)
        occ_[static_cast<size_t>(p.lits[t] ^ 1)].push_back({pbi, static_cast<int>(t)});
      pbs_.push_back(std::move(p));
    }
  }

  void add_formula(const Formula& f) {
    grow_to(f.vars.count());
    for (const auto& c : f.clauses) add_clause(c);
    for (const auto& pb : f.pbs) add_pb(pb);
  }

  SolveResult solve(const SolveBudget& budget = {}) {
    SolveResult res;
    start_ = std::chrono::steady_clock::now();
    budget_ = budget;
    if (!ok_) {
      res.status = SolveStatus::Unsat;
      res.stats = stats_;
      return res;
    }
    for (int u : units_)
      if (!enqueue(u, kNoReason, 0)) {
        res.status = SolveStatus::Unsat;
        res.stats = stats_;
        return res;
      }
    // Initial PB propagation (units implied with nothing assigned yet).
    for (size_t i = 0; i < pbs_.size(); ++i)
      if (!pb_propagate_all(static_cast<int>(i))) {
        res.status = SolveStatus::Unsat;
        res.stats = stats_;
        return res;
      }

    int64_t restart_budget = luby_unit_ * luby(1);
    int64_t restart_seq = 1;
    int64_t conflicts_in_run = 0;

    for (;;) {
      int confl_kind = 0, confl_idx = 0;
      if (!propagate(confl_kind, confl_idx)) {
        ++stats_.conflicts;
        ++conflicts_in_run;
        if (level() == 0) {
          res.status = SolveStatus::Unsat;
          res.stats = stats_;
          return res;
        }
        std::vector<int> learnt;
        int bl = analyze(confl_kind, confl_idx, learnt);
        backtrack(bl);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason, 0);
        } else {
          int cref = static_cast<int>(clauses_.size());
          clauses_.push_back({learnt});
          attach(cref);
          enqueue(learnt[0], kClauseReason, cref);
        }
        if (out_of_budget()) {
          res.status = SolveStatus::ResourceOut;
          res.stats = stats_;
          return res;
        }
        if (conflicts_in_run >= restart_budget) {
          ++stats_.restarts;
          conflicts_in_run = 0;
          restart_budget = luby_unit_ * luby(++restart_seq);
          backtrack(0);
        }
        continue;
      }
      // Pick the lowest-index unassigned variable.
      int v = next_decision();
      if (v == 0) {
        res.status = SolveStatus::Sat;
        res.model.assign(static_cast<size_t>(nvars_) + 1, 0);
        for (int var = 1; var <= nvars_; ++var)
          res.model[static_cast<size_t>(var)] = assign_[static_cast<size_t>(var)] == kTrue;
        res.stats = stats_;
        verify_internal(res.model);
        return res;
      }
      ++stats_.decisions;
      if ((stats_.decisions & 4095) == 0 && budget_.max_seconds > 0) {
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
        if (dt.count() >= budget_.max_seconds) {
          res.status = SolveStatus::ResourceOut;
          res.stats = stats_;
          return res;
        }
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(phase_[static_cast<size_t>(v)] ? make_ilit(v, true) : make_ilit(v, false),
              kNoReason, 0);
    }
  }

  const SolveStats& stats() const { return stats_; }

 private:
  static constexpr int8_t kUndef = 0, kTrue = 1, kFalse = 2;
  static constexpr int kNoReason = 0, kClauseReason = 1, kPbReason = 2;

  struct Cls {
    std::vector<int> lits;
  };
  struct PbC {
    std::vector<int64_t> coefs;  // sorted desc, parallel to lits
    std::vector<int> lits;
    int64_t bound = 0;
    int64_t slack = 0;
  };
  struct Watch {
    int cref;
    int blocker;
  };

  static int make_ilit(int var, bool pos) { return var * 2 + (pos ? 0 : 1); }
  static int ilit(const Lit& l) { return make_ilit(l.var, l.pos); }
  static int ivar(int il) { return il >> 1; }
  static bool ipos(int il) { return (il & 1) == 0; }

  int8_t value(int il) const {
    int8_t a = assign_[static_cast<size_t>(ivar(il))];
    if (a == kUndef) return kUndef;
    return (a == kTrue) == ipos(il) ? kTrue : kFalse;
  }

  int level() const { return static_cast<int>(trail_lim_.size()); }

  void attach(int cref) {
    const auto& c = clauses_[static_cast<size_t>(cref)].lits;
    watches_[static_cast<size_t>(c[0] ^ 1)].push_back({cref, c[1]});
    watches_[static_cast<size_t>(c[1] ^ 1)].push_back({cref, c[0]});
  }

  bool enqueue(int il, int rkind, int ridx) {
    int8_t v = value(il);
    if (v == kTrue) return true;
    if (v == kFalse) return false;
    int var = ivar(il);
    assign_[static_cast<size_t>(var)] = ipos(il) ? kTrue : kFalse;
    phase_[static_cast<size_t>(var)] = ipos(il);
    level_[static_cast<size_t>(var)] = level();
    pos_[static_cast<size_t>(var)] = static_cast<int>(trail_.size());
    reason_kind_[static_cast<size_t>(var)] = rkind;
    reason_idx_[static_cast<size_t>(var)] = ridx;
    trail_.push_back(il);
    // Keep PB slacks in sync with assignments (not with queue
    // processing), so backtracking can restore them symmetrically.
    for (const auto& [pbi, ti] : occ_[static_cast<size_t>(il)])
      pbs_[static_cast<size_t>(pbi)].slack -= pbs_[static_cast<size_t>(pbi)].coefs[static_cast<size_t>(ti)];
    return true;
  }

  // Propagates everything on the trail; false on conflict, with the
  // conflicting constraint in (kind, idx).
  bool propagate(int& kind, int& idx) {
    while (qhead_ < trail_.size()) {
      const int p = trail_[qhead_++];
      ++stats_.propagations;

      auto& wl = watches_[static_cast<size_t>(p)];
      size_t keep = 0;
      for (size_t w = 0; w < wl.size(); ++w) {
        const int cref = wl[w].cref;
        const int blocker = wl[w].blocker;
        if (value(blocker) == kTrue) {
          wl[keep++] = wl[w];
          continue;
        }
        auto& lits = clauses_[static_cast<size_t>(cref)].lits;
        const int false_lit = p ^ 1;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        if (value(lits[0]) == kTrue) {
          wl[keep++] = {cref, lits[0]};
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches_[static_cast<size_t>(lits[1] ^ 1)].push_back({cref, lits[0]});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        // Unit or conflict on lits[0].
        wl[keep++] = {cref, lits[0]};
        if (value(lits[0]) == kFalse) {
          for (size_t r = w + 1; r < wl.size(); ++r) wl[keep++] = wl[r];
          wl.resize(keep);
          qhead_ = trail_.size();
          kind = kClauseReason;
          idx = cref;
          return false;
        }
        enqueue(lits[0], kClauseReason, cref);
      }
      wl.resize(keep);

      for (const auto& [pbi, ti] : occ_[static_cast<size_t>(p)]) {
        (void)ti;  // slack already updated at enqueue time
        PbC& pb = pbs_[static_cast<size_t>(pbi)];
        if (pb.slack < 0) {
          kind = kPbReason;
          idx = pbi;
          return false;
        }
        for (size_t t = 0; t < pb.lits.size() && pb.coefs[t] > pb.slack; ++t) {
          if (value(pb.lits[t]) == kUndef)
            enqueue(pb.lits[t], kPbReason, pbi);
        }
      }
    }
    return true;
  }

  bool pb_propagate_all(int pbi) {
    PbC& pb = pbs_[static_cast<size_t>(pbi)];
    if (pb.slack < 0) return false;
    // A false literal here is no conflict: its loss is already counted
    // in the slack. Only undefined literals are forced.
    for (size_t t = 0; t < pb.lits.size() && pb.coefs[t] > pb.slack; ++t)
      if (value(pb.lits[t]) == kUndef && !enqueue(pb.lits[t], kPbReason, pbi))
        return false;
    return true;
  }

  // Clause view of the constraint that propagated/conflicted.
  void constraint_lits(int kind, int idx, int skip_var, std::vector<int>& out) {
    out.clear();
    if (kind == kClauseReason) {
      for (int l : clauses_[static_cast<size_t>(idx)].lits)
        if (ivar(l) != skip_var) out.push_back(l);
      return;
    }
    // PB: every currently false literal (assigned before skip_var, if
    // given) forms a valid implicate together with the skipped literal.
    const PbC& pb = pbs_[static_cast<size_t>(idx)];
    const int limit =
        skip_var > 0 ? pos_[static_cast<size_t>(skip_var)] : static_cast<int>(trail_.size());
    for (int l : pb.lits) {
      if (ivar(l) == skip_var) continue;
      if (value(l) == kFalse && pos_[static_cast<size_t>(ivar(l))] < limit)
        out.push_back(l);
    }
  }

  int analyze(int kind, int idx, std::vector<int>& learnt) {
    learnt.clear();
    learnt.push_back(0);  // slot for the asserting literal
    seen_.assign(static_cast<size_t>(nvars_) + 1, 0);
    int counter = 0;
    int p = 0;
    int index = static_cast<int>(trail_.size()) - 1;
    std::vector<int> reason_lits;
    constraint_lits(kind, idx, 0, reason_lits);

    for (;;) {
      for (int q : reason_lits) {
        const int v = ivar(q);
        if (!seen_[static_cast<size_t>(v)] && level_[static_cast<size_t>(v)] > 0) {
          seen_[static_cast<size_t>(v)] = 1;
          if (level_[static_cast<size_t>(v)] == level())
            ++counter;
          else
            learnt.push_back(q);
        }
      }
      while (!seen_[static_cast<size_t>(ivar(trail_[static_cast<size_t>(index)]))]) --index;
      p = trail_[static_cast<size_t>(index)];
      --index;
      seen_[static_cast<size_t>(ivar(p))] = 0;
      --counter;
      if (counter == 0) break;
      constraint_lits(reason_kind_[static_cast<size_t>(ivar(p))],
                      reason_idx_[static_cast<size_t>(ivar(p))], ivar(p), reason_lits);
    }
    learnt[0] = p ^ 1;

    int bl = 0;
    size_t swap_pos = 1;
    for (size_t i = 1; i < learnt.size(); ++i) {
      int lv = level_[static_cast<size_t>(ivar(learnt[i]))];
      if (lv > bl) {
        bl = lv;
        swap_pos = i;
      }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[swap_pos]);
    return bl;
  }

  void backtrack(int to_level) {
    if (level() <= to_level) return;
    const int bound = trail_lim_[static_cast<size_t>(to_level)];
    for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i) {
      const int il = trail_[static_cast<size_t>(i)];
      const int v = ivar(il);
      assign_[static_cast<size_t>(v)] = kUndef;
      reason_kind_[static_cast<size_t>(v)] = kNoReason;
      for (const auto& [pbi, ti] : occ_[static_cast<size_t>(il)])
        pbs_[static_cast<size_t>(pbi)].slack +=
            pbs_[static_cast<size_t>(pbi)].coefs[static_cast<size_t>(ti)];
      if (v < low_var_) low_var_ = v;
    }
    trail_.resize(static_cast<size_t>(bound));
    trail_lim_.resize(static_cast<size_t>(to_level));
    qhead_ = trail_.size();
  }

  int next_decision() {
    for (int v = low_var_; v <= nvars_; ++v) {
      if (assign_[static_cast<size_t>(v)] == kUndef) {
        low_var_ = v;
        return v;
      }
    }
    low_var_ = nvars_ + 1;
    return 0;
  }

  bool out_of_budget() {
    if (budget_.max_conflicts > 0 && stats_.conflicts >= budget_.max_conflicts) return true;
    if (budget_.max_seconds > 0 && (stats_.conflicts & 1023) == 0) {
      auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
      if (dt.count() >= budget_.max_seconds) return true;
    }
    return false;
  }

  static int64_t luby(int64_t i) {
    for (int64_t k = 1; k < 64; ++k)
      if (i == (1LL << k) - 1) return 1LL << (k - 1);
    for (int64_t k = 1;; ++k) {
      int64_t span = (1LL << k) - 1;
      if (i < span) return luby(i - (span >> 1));
    }
  }

  void verify_internal(const std::vector<uint8_t>& model) {
    for (const auto& c : clauses_) {
      bool ok = false;
      for (int l : c.lits)
        if ((model[static_cast<size_t>(ivar(l))] != 0) == ipos(l)) {
          ok = true;
          break;
        }
      if (!ok) throw SoundnessError("internal model fails a clause");
    }
    for (const auto& pb : pbs_) {
      __int128 s = 0;
      for (size_t t = 0; t < pb.lits.size(); ++t)
        if ((model[static_cast<size_t>(ivar(pb.lits[t]))] != 0) == ipos(pb.lits[t]))
          s += pb.coefs[t];
      if (s < pb.bound) throw SoundnessError("internal model fails a PB constraint");
    }
  }

  int nvars_ = 0;
  bool ok_ = true;
  std::vector<int8_t> assign_;
  std::vector<uint8_t> phase_;
  std::vector<int> level_;
  std::vector<int> pos_;
  std::vector<int8_t> reason_kind_;
  std::vector<int> reason_idx_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  std::vector<Cls> clauses_;
  std::vector<PbC> pbs_;
  std::vector<std::vector<Watch>> watches_;
  std::vector<std::vector<std::pair<int, int>>> occ_;
  std::vector<int> units_;
  std::vector<uint8_t> seen_;
  int low_var_ = 1;
  SolveStats stats_;
  SolveBudget budget_;
  std::chrono::steady_clock::time_point start_;
  static constexpr int64_t luby_unit_ = 256;
};

// One-shot solve of a formula (clauses + native PB constraints).
inline SolveResult solve(const Formula& f, const SolveBudget& budget = {}) {
  Solver s(f.vars.count());
  s.add_formula(f);
  return s.solve(budget);
}

}  // namespace aex
