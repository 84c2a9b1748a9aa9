#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aex/aex.hpp"

using namespace aex;

namespace {

// Reference decision by exhaustion over the original variables only
// (valid when the formula has no auxiliaries).
bool brute_sat(const Formula& f) {
  int n = f.vars.count();
  for (uint64_t bits = 0; bits < (1ull << n); ++bits) {
    std::vector<uint8_t> model(static_cast<size_t>(n) + 1, 0);
    for (int v = 1; v <= n; ++v) model[static_cast<size_t>(v)] = (bits >> (v - 1)) & 1;
    if (check_model(f, model)) return true;
  }
  return false;
}

Formula pigeonhole_pb(int pigeons, int holes) {
  Formula f;
  std::vector<std::vector<int>> p(pigeons, std::vector<int>(holes));
  for (int i = 0; i < pigeons; ++i)
    for (int j = 0; j < holes; ++j) p[i][j] = f.vars.fresh();
  for (int i = 0; i < pigeons; ++i) {
    Clause c;
    for (int j = 0; j < holes; ++j) c.push_back(pos_lit(p[i][j]));
    f.add_clause(std::move(c));
  }
  for (int j = 0; j < holes; ++j) {
    PbConstraint pb;
    pb.rel = PbRel::Le;
    pb.bound = 1;
    for (int i = 0; i < pigeons; ++i) pb.terms.push_back({1, pos_lit(p[i][j])});
    f.add_pb(std::move(pb));
  }
  return f;
}

}  // namespace

TEST_CASE("forced models come out exactly") {
  Formula f;
  int x1 = f.vars.fresh(), x2 = f.vars.fresh();
  f.add_clause({pos_lit(x1), pos_lit(x2)});
  f.add_clause({neg_lit(x1)});
  auto r = solve(f);
  REQUIRE(r.status == SolveStatus::Sat);
  CHECK_FALSE(r.value(x1));
  CHECK(r.value(x2));
  CHECK(check_model(f, r.model));
}

TEST_CASE("plain contradictions are unsat") {
  Formula f;
  int x1 = f.vars.fresh();
  f.add_clause({pos_lit(x1)});
  f.add_clause({neg_lit(x1)});
  CHECK(solve(f).status == SolveStatus::Unsat);
}

TEST_CASE("empty formula is satisfiable") {
  Formula f;
  CHECK(solve(f).status == SolveStatus::Sat);
}

TEST_CASE("pigeonhole instances") {
  CHECK(solve(pigeonhole_pb(4, 3)).status == SolveStatus::Unsat);
  CHECK(solve(pigeonhole_pb(3, 3)).status == SolveStatus::Sat);
  CHECK(solve(pigeonhole_pb(5, 4)).status == SolveStatus::Unsat);

  // same 4-into-3 instance with the PB rows translated to clauses
  Formula cnf = pigeonhole_pb(4, 3);
  translate_pbs(cnf);
  CHECK(solve(cnf).status == SolveStatus::Unsat);
}

TEST_CASE("random 3-SAT agrees with exhaustive search") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 80; ++trial) {
    int n = 6 + trial % 7;  // up to 12 vars
    int mclauses = static_cast<int>(n * 4.2);
    Formula f;
    for (int v = 0; v < n; ++v) f.vars.fresh();
    std::uniform_int_distribution<int> var(1, n);
    std::uniform_int_distribution<int> sign(0, 1);
    for (int c = 0; c < mclauses; ++c) {
      Clause cl;
      for (int k = 0; k < 3; ++k)
        cl.push_back(sign(rng) ? pos_lit(var(rng)) : neg_lit(var(rng)));
      f.add_clause(std::move(cl));
    }
    auto r = solve(f);
    REQUIRE(r.status != SolveStatus::ResourceOut);
    bool expect = brute_sat(f);
    REQUIRE((r.status == SolveStatus::Sat) == expect);
    if (r.status == SolveStatus::Sat) REQUIRE(check_model(f, r.model));
  }
}

TEST_CASE("random native PB instances agree with exhaustive search") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(1, 6);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 4 + trial % 6;
    Formula f;
    for (int v = 0; v < n; ++v) f.vars.fresh();
    for (int k = 0; k < 3; ++k) {
      PbConstraint pb;
      int r3 = trial % 3;
      pb.rel = r3 == 0 ? PbRel::Ge : r3 == 1 ? PbRel::Le : PbRel::Eq;
      int64_t total = 0;
      for (int v = 1; v <= n; ++v) {
        int64_t c = coef(rng) * (sign(rng) ? 1 : -1);
        pb.terms.push_back({c, sign(rng) ? pos_lit(v) : neg_lit(v)});
        total += c > 0 ? c : -c;
      }
      pb.bound = std::uniform_int_distribution<int64_t>(-total, total)(rng);
      f.add_pb(std::move(pb));
    }
    auto r = solve(f);
    REQUIRE(r.status != SolveStatus::ResourceOut);
    REQUIRE((r.status == SolveStatus::Sat) == brute_sat(f));
    if (r.status == SolveStatus::Sat) REQUIRE(check_model(f, r.model));
  }
}

TEST_CASE("conflict budgets surface as ResourceOut") {
  Formula f = pigeonhole_pb(7, 6);
  SolveBudget tight;
  tight.max_conflicts = 1;
  CHECK(solve(f, tight).status == SolveStatus::ResourceOut);
  SolveBudget loose;
  loose.max_conflicts = 0;  // unlimited
  CHECK(solve(f, loose).status == SolveStatus::Unsat);
}

TEST_CASE("check_model rejects non-models") {
  Formula f;
  int x1 = f.vars.fresh(), x2 = f.vars.fresh();
  f.add_clause({pos_lit(x1)});
  f.add_clause({neg_lit(x1), pos_lit(x2)});
  auto r = solve(f);
  REQUIRE(r.status == SolveStatus::Sat);
  auto bad = r.model;
  bad[static_cast<size_t>(x1)] ^= 1;
  CHECK_FALSE(check_model(f, bad));

  PbConstraint pb;
  pb.rel = PbRel::Ge;
  pb.bound = 2;
  pb.terms = {{1, pos_lit(x1)}, {1, pos_lit(x2)}};
  f.add_pb(pb);
  auto r2 = solve(f);
  REQUIRE(r2.status == SolveStatus::Sat);
  CHECK(check_model(f, r2.model));
  auto bad2 = r2.model;
  bad2[static_cast<size_t>(x2)] ^= 1;
  CHECK_FALSE(check_model(f, bad2));
}

TEST_CASE("model counting via blocking clauses") {
  // x1 + x2 + x3 = 2 has exactly three models
  Formula base;
  for (int v = 0; v < 3; ++v) base.vars.fresh();
  PbConstraint pb;
  pb.rel = PbRel::Eq;
  pb.bound = 2;
  for (int v = 1; v <= 3; ++v) pb.terms.push_back({1, pos_lit(v)});
  base.add_pb(pb);

  std::vector<Clause> blockers;
  int models = 0;
  for (;;) {
    Formula f = base;
    for (const auto& c : blockers) f.add_clause(c);
    auto r = solve(f);
    if (r.status != SolveStatus::Sat) break;
    ++models;
    REQUIRE(models <= 8);
    Clause block;
    for (int v = 1; v <= 3; ++v)
      block.push_back(r.value(v) ? neg_lit(v) : pos_lit(v));
    blockers.push_back(std::move(block));
  }
  CHECK(models == 3);
}

TEST_CASE("statistics are populated") {
  Formula f = pigeonhole_pb(5, 4);
  auto r = solve(f);
  REQUIRE(r.status == SolveStatus::Unsat);
  CHECK(r.stats.conflicts > 0);
  CHECK(r.stats.propagations > 0);
}
