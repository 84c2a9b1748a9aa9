#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aex/aex.hpp"

using namespace aex;

namespace {

// Truth of a PB constraint under a full assignment of the original vars.
bool pb_holds(const PbConstraint& pb, uint32_t bits) {
  __int128 sum = 0;
  for (const auto& t : pb.terms) {
    bool v = (bits >> (t.lit.var - 1)) & 1;
    if (t.lit.pos == v) sum += t.coef;
  }
  switch (pb.rel) {
    case PbRel::Ge: return sum >= pb.bound;
    case PbRel::Le: return sum <= pb.bound;
    case PbRel::Eq: return sum == pb.bound;
  }
  return false;
}

// True iff the assignment of vars 1..norig extends to a model of f.
bool extendable(const Formula& f, uint32_t bits, int norig) {
  Solver s(f.vars.count());
  s.add_formula(f);
  for (int v = 1; v <= norig; ++v)
    s.add_clause({((bits >> (v - 1)) & 1) ? pos_lit(v) : neg_lit(v)});
  return s.solve().status == SolveStatus::Sat;
}

Formula translated(const PbConstraint& pb, int norig) {
  Formula f;
  while (f.vars.count() < norig) f.vars.fresh();
  f.add_pb(pb);
  translate_pbs(f);
  return f;
}

}  // namespace

TEST_CASE("at-most-one over three literals is the pairwise encoding") {
  PbConstraint pb;
  pb.rel = PbRel::Le;
  pb.bound = 1;
  for (int v = 1; v <= 3; ++v) pb.terms.push_back({1, pos_lit(v)});
  VarMap vars;
  for (int v = 1; v <= 3; ++v) vars.fresh();
  auto clauses = pb_to_cnf(pb, vars);
  REQUIRE(clauses.size() == 3);
  for (const auto& c : clauses) CHECK(c.size() == 2);
  CHECK(vars.count() == 3);  // no auxiliaries
}

TEST_CASE("trivially true constraints vanish") {
  PbConstraint pb;
  pb.rel = PbRel::Ge;
  pb.bound = 0;
  for (int v = 1; v <= 3; ++v) pb.terms.push_back({1, pos_lit(v)});
  VarMap vars;
  for (int v = 1; v <= 3; ++v) vars.fresh();
  CHECK(pb_to_cnf(pb, vars).empty());
}

TEST_CASE("contradictory constraints produce the empty clause") {
  PbConstraint pb;
  pb.rel = PbRel::Ge;
  pb.bound = 3;
  pb.terms.push_back({1, pos_lit(1)});
  VarMap vars;
  vars.fresh();
  auto clauses = pb_to_cnf(pb, vars);
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0].empty());
}

TEST_CASE("at-most-two over five preserves the projected model count") {
  PbConstraint pb;
  pb.rel = PbRel::Le;
  pb.bound = 2;
  for (int v = 1; v <= 5; ++v) pb.terms.push_back({1, pos_lit(v)});
  Formula f = translated(pb, 5);
  int count = 0;
  for (uint32_t bits = 0; bits < 32; ++bits)
    if (extendable(f, bits, 5)) ++count;
  CHECK(count == 16);  // C(5,0)+C(5,1)+C(5,2)
}

TEST_CASE("translation is projection-exact on random constraints") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> ncoef(1, 4);
  std::uniform_int_distribution<int> relpick(0, 2);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 2 + trial % 5;  // up to 6 vars
    PbConstraint pb;
    pb.rel = relpick(rng) == 0 ? PbRel::Ge : relpick(rng) == 1 ? PbRel::Le : PbRel::Eq;
    int64_t total = 0;
    for (int v = 1; v <= n; ++v) {
      int64_t c = ncoef(rng) * (sign(rng) ? 1 : -1);
      pb.terms.push_back({c, sign(rng) ? pos_lit(v) : neg_lit(v)});
      total += c > 0 ? c : -c;
    }
    pb.bound = std::uniform_int_distribution<int64_t>(-total - 1, total + 1)(rng);

    Formula f = translated(pb, n);
    for (uint32_t bits = 0; bits < (1u << n); ++bits)
      REQUIRE(extendable(f, bits, n) == pb_holds(pb, bits));
  }
}

TEST_CASE("translated and native PB solving agree") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> ncoef(1, 5);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + trial % 4;
    Formula native;
    while (native.vars.count() < n) native.vars.fresh();
    // a couple of PBs plus a clause, same instance both ways
    for (int k = 0; k < 2; ++k) {
      PbConstraint pb;
      pb.rel = sign(rng) ? PbRel::Ge : PbRel::Le;
      int64_t total = 0;
      for (int v = 1; v <= n; ++v) {
        int64_t c = ncoef(rng);
        pb.terms.push_back({c, sign(rng) ? pos_lit(v) : neg_lit(v)});
        total += c;
      }
      pb.bound = std::uniform_int_distribution<int64_t>(0, total)(rng);
      native.add_pb(pb);
    }
    native.add_clause({pos_lit(1), neg_lit(2)});

    Formula cnf = native;
    translate_pbs(cnf);
    CHECK(cnf.pbs.empty());
    auto rn = solve(native);
    auto rc = solve(cnf);
    REQUIRE(rn.status == rc.status);
    if (rn.status == SolveStatus::Sat) {
      CHECK(check_model(native, rn.model));
      // models of the translation restrict to models of the original
      std::vector<uint8_t> restricted(native.vars.count() + 1, 0);
      for (int v = 1; v <= native.vars.count(); ++v)
        restricted[static_cast<size_t>(v)] = rc.value(v);
      CHECK(check_model(native, restricted));
    }
  }
}

TEST_CASE("sequential counters enforce cardinality bounds") {
  for (int n = 2; n <= 6; ++n) {
    for (int64_t k = 0; k <= n; ++k) {
      Formula f;
      std::vector<Lit> lits;
      for (int v = 1; v <= n; ++v) lits.push_back(pos_lit(f.vars.fresh()));
      std::vector<Clause> out;
      detail::seq_counter_le(lits, k, f.vars, out);
      for (auto& c : out) f.add_clause(std::move(c));
      for (uint32_t bits = 0; bits < (1u << n); ++bits) {
        int pop = __builtin_popcount(bits & ((1u << n) - 1));
        REQUIRE(extendable(f, bits, n) == (pop <= k));
      }
    }
  }
}

TEST_CASE("weighted sequential counters enforce weighted bounds") {
  std::vector<PbTerm> tv = {{3, pos_lit(1)}, {2, pos_lit(2)}, {2, pos_lit(3)}, {1, pos_lit(4)}};
  for (int64_t k : {1, 2, 3, 4, 5, 6, 7, 8}) {
    Formula f;
    for (int v = 1; v <= 4; ++v) f.vars.fresh();
    std::vector<Clause> out;
    detail::seq_weighted_le(tv, k, f.vars, out);
    for (auto& c : out) f.add_clause(std::move(c));
    for (uint32_t bits = 0; bits < 16; ++bits) {
      int64_t sum = 0;
      for (const auto& t : tv)
        if ((bits >> (t.lit.var - 1)) & 1) sum += t.coef;
      REQUIRE(extendable(f, bits, 4) == (sum <= k));
    }
  }
}
