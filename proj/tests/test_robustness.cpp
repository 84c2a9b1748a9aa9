#include <catch2/catch_amalgamated.hpp>

#include "aex/aex.hpp"

using namespace aex;

namespace {

Point pt(std::initializer_list<const char*> vs) {
  Point p;
  for (const char* v : vs) p.push_back(parse_rat(v));
  return p;
}

const Rat kThreshold(16183879, 23299748);  // kappa1 flips classes here

void check_witness(const Classifier& m, const ExplanationProblem& E,
                   const DistanceSpec& spec, const FindAExResult& r) {
  REQUIRE(r.status == FindStatus::Found);
  REQUIRE(r.witness.has_value());
  CHECK(m.space.contains(*r.witness));
  CHECK(within_ball(*r.witness, E.inst.v, spec));
  ClassLabel l = evaluate(m, *r.witness);
  CHECK_FALSE(l.is_abstain());
  CHECK(l != E.inst.c);
}

}  // namespace

TEST_CASE("adversarial examples around the paper instance") {
  Classifier m = build_kappa1();
  auto E = make_problem(m, pt({"0.7"}));

  auto found = find_aex(E, {Norm::Linf, Rat(1, 10)});
  check_witness(m, E, {Norm::Linf, Rat(1, 10)}, found);
  CHECK((*found.witness)[0] < kThreshold);

  CHECK(find_aex(E, {Norm::Linf, parse_rat("0.005")}).status == FindStatus::None);

  // every feature fixed: no search space
  CHECK(find_aex(E, {Norm::Linf, Rat(1)}, {0}).status == FindStatus::None);

  CHECK_THROWS_AS(find_aex(E, {Norm::Linf, Rat(-1)}), PreconditionError);
  CHECK_THROWS_AS(find_aex(E, {Norm::Linf, Rat(1)}, {4}), PreconditionError);
}

TEST_CASE("engines agree on quantized instances") {
  Classifier m = quantize_space(build_kappa1(), Rat(1, 20));
  auto E = make_problem(m, pt({"0.7"}));
  for (const char* eps : {"0.004", "0.05", "0.1", "0.2"}) {
    DistanceSpec spec{Norm::Linf, parse_rat(eps)};
    QueryOptions solver, brute, closed;
    solver.engine = Engine::Solver;
    brute.engine = Engine::Brute;
    closed.engine = Engine::ClosedForm;
    auto rs = find_aex(E, spec, {}, solver);
    auto rb = find_aex(E, spec, {}, brute);
    auto rc = find_aex(E, spec, {}, closed);
    REQUIRE(rs.status == rb.status);
    REQUIRE(rc.status == rb.status);
    if (rb.status == FindStatus::Found) {
      check_witness(m, E, spec, rs);
      check_witness(m, E, spec, rb);
      check_witness(m, E, spec, rc);
    }
  }
}

TEST_CASE("l1 and l2 balls work on discrete spaces") {
  Classifier m = quantize_space(build_kappa1(), Rat(1, 20));
  auto E = make_problem(m, pt({"0.7"}));
  for (Norm p : {Norm::L1, Norm::L2}) {
    QueryOptions solver, brute;
    solver.engine = Engine::Solver;
    brute.engine = Engine::Brute;
    for (const char* eps : {"0.004", "0.06", "0.3"}) {
      DistanceSpec spec{p, parse_rat(eps)};
      auto rs = find_aex(E, spec, {}, solver);
      auto rb = find_aex(E, spec, {}, brute);
      REQUIRE(rs.status == rb.status);
      if (rs.status == FindStatus::Found) check_witness(m, E, spec, rs);
    }
  }
}

TEST_CASE("fixing the decisive feature removes adversarial examples") {
  Classifier m = build_kappa2();
  auto E = make_problem(m, pt({"0", "1"}));
  REQUIRE(E.inst.c.idx == 0);
  DistanceSpec spec{Norm::Linf, parse_rat("0.7")};
  CHECK(find_aex(E, spec).status == FindStatus::Found);
  CHECK(find_aex(E, spec, {0}).status == FindStatus::None);
  CHECK(find_aex(E, spec, {1}).status == FindStatus::Found);
}

TEST_CASE("local robustness verdicts flip at the threshold gap") {
  Classifier m = build_kappa1();
  auto E = make_problem(m, pt({"0.7"}));
  CHECK(is_locally_robust(E, {Norm::Linf, parse_rat("0.005")}).verdict == Verdict::Robust);
  auto r = is_locally_robust(E, {Norm::Linf, parse_rat("0.006")});
  REQUIRE(r.verdict == Verdict::NotRobust);
  REQUIRE(r.witness.has_value());
  CHECK((*r.witness)[0] < kThreshold);
  CHECK_THROWS_AS(is_locally_robust(E, {Norm::Linf, Rat(0)}), PreconditionError);
  CHECK(std::string(verdict_name(Verdict::Robust)) == "robust");
  CHECK(std::string(verdict_name(Verdict::NotRobust)) == "not-robust");
  CHECK(std::string(verdict_name(Verdict::Unknown)) == "unknown");
}

TEST_CASE("box constraints can rescue robustness") {
  Classifier m = build_kappa1();
  auto E = make_problem(m, pt({"0.7"}));
  BoxConstraint box{{{parse_rat("0.695"), Rat(1)}}};
  CHECK(is_locally_robust(E, {Norm::Linf, Rat(1, 10)}, {}, &box).verdict == Verdict::Robust);
  BoxConstraint wide{{{Rat(0), Rat(1)}}};
  CHECK(is_locally_robust(E, {Norm::Linf, Rat(1, 10)}, {}, &wide).verdict ==
        Verdict::NotRobust);
  BoxConstraint empty{{{Rat(2), Rat(3)}}};
  CHECK_THROWS_AS(is_locally_robust(E, {Norm::Linf, Rat(1, 10)}, {}, &empty),
                  PreconditionError);
}

TEST_CASE("not-robust verdicts are monotone in epsilon") {
  Classifier m = quantize_space(build_kappa1(), Rat(1, 50));
  auto E = make_problem(m, pt({"0.7"}));
  bool seen_not_robust = false;
  for (const char* eps : {"0.001", "0.004", "0.01", "0.02", "0.1", "0.5"}) {
    auto v = is_locally_robust(E, {Norm::Linf, parse_rat(eps)}).verdict;
    REQUIRE(v != Verdict::Unknown);
    if (seen_not_robust) REQUIRE(v == Verdict::NotRobust);
    if (v == Verdict::NotRobust) seen_not_robust = true;
  }
  CHECK(seen_not_robust);
}

TEST_CASE("closed-form handles what it can and reports what it cannot") {
  Classifier k2 = build_kappa2();
  auto E = make_problem(k2, pt({"0", "1"}));
  QueryOptions closed;
  closed.engine = Engine::ClosedForm;
  // continuous multi-feature l1 has no closed-form window decomposition
  auto r = find_aex(E, {Norm::L1, parse_rat("0.5")}, {}, closed);
  CHECK(r.status == FindStatus::Unknown);
  CHECK_FALSE(r.reason.empty());
  // but fixing all other features reduces it to one moving coordinate
  auto r2 = find_aex(E, {Norm::L1, parse_rat("0.7")}, {1}, closed);
  CHECK(r2.status == FindStatus::Found);
}

TEST_CASE("sampling can refute but never certify") {
  Classifier m = build_kappa1();
  auto E = make_problem(m, pt({"0.7"}));

  SamplingConfig cfg;
  cfg.n = 200;
  cfg.seed = 42;
  auto hit = sample_local_robustness(E, {Norm::Linf, Rat(1, 10)}, cfg);
  REQUIRE(hit.found);  // ~47% of the ball flips the class; 200 draws cannot miss
  REQUIRE(hit.witness.has_value());
  CHECK(evaluate(m, *hit.witness) != E.inst.c);
  CHECK(within_ball(*hit.witness, E.inst.v, {Norm::Linf, Rat(1, 10)}));

  auto miss = sample_local_robustness(E, {Norm::Linf, parse_rat("0.005")}, cfg);
  CHECK_FALSE(miss.found);
  CHECK(miss.tested == 200);

  SamplingConfig bad;
  bad.n = 0;
  CHECK_THROWS_AS(sample_local_robustness(E, {Norm::Linf, Rat(1, 10)}, bad),
                  PreconditionError);

  // identical seeds reproduce the run exactly
  auto again = sample_local_robustness(E, {Norm::Linf, Rat(1, 10)}, cfg);
  CHECK(again.found == hit.found);
  CHECK(again.witness == hit.witness);
  CHECK(again.in_ball == hit.in_ball);
}

TEST_CASE("sampling distributions") {
  Classifier m = build_kappa1();
  auto E = make_problem(m, pt({"0.7"}));
  SamplingConfig cfg;
  cfg.n = 100;
  cfg.seed = 7;
  cfg.dist = SampleDist::Space;
  // no point within 1e-4 of 0.7 crosses the boundary, so all draws miss
  auto r = sample_local_robustness(E, {Norm::Linf, parse_rat("0.0001")}, cfg);
  CHECK(r.tested == 100);
  CHECK_FALSE(r.found);
  CHECK(r.in_ball <= r.tested);  // space draws mostly fall outside the ball

  std::vector<Point> data = {pt({"0.69"}), pt({"0.71"}), pt({"0.1"})};
  cfg.dist = SampleDist::Dataset;
  cfg.dataset = &data;
  auto rd = sample_local_robustness(E, {Norm::Linf, parse_rat("0.02")}, cfg);
  REQUIRE(rd.found);  // 0.69 sits in the ball below the threshold
  CHECK(*rd.witness == pt({"0.69"}));

  cfg.dataset = nullptr;
  CHECK_THROWS_AS(sample_local_robustness(E, {Norm::Linf, Rat(1)}, cfg), PreconditionError);
}

TEST_CASE("oracle call counting and engine labels") {
  Classifier m = build_kappa1();
  auto E = make_problem(m, pt({"0.7"}));
  uint64_t calls = 0;
  QueryOptions opts;
  opts.oracle_calls = &calls;
  find_aex(E, {Norm::Linf, Rat(1, 10)}, {}, opts);
  find_aex(E, {Norm::Linf, Rat(1, 100)}, {}, opts);
  CHECK(calls == 2);
  auto r = find_aex(E, {Norm::Linf, Rat(1, 10)});
  CHECK(std::string(r.engine) != "");
}

TEST_CASE("external solver engine matches the embedded one") {
  const char* bin = std::getenv("AEX_CLI_BIN");
  if (!bin) return;  // wired up only under ctest
  Classifier m = quantize_space(build_kappa1(), Rat(1, 10));
  auto E = make_problem(m, pt({"0.7"}));
  QueryOptions ext;
  ext.engine = Engine::Solver;
  ext.external_cmd = std::string(bin) + " solve";
  QueryOptions emb;
  emb.engine = Engine::Solver;
  for (const char* eps : {"0.04", "0.1"}) {
    DistanceSpec spec{Norm::Linf, parse_rat(eps)};
    CHECK(find_aex(E, spec, {}, ext).status == find_aex(E, spec, {}, emb).status);
  }
}
