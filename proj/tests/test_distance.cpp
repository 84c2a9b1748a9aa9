#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aex/aex.hpp"

using namespace aex;

namespace {

Point pt(std::initializer_list<const char*> vs) {
  Point p;
  for (const char* v : vs) p.push_back(parse_rat(v));
  return p;
}

Point random_point(std::mt19937_64& rng, size_t n) {
  std::uniform_int_distribution<int> num(-8, 8);
  std::uniform_int_distribution<int> den(1, 4);
  Point p;
  for (size_t i = 0; i < n; ++i) p.push_back(Rat(num(rng), den(rng)));
  return p;
}

}  // namespace

TEST_CASE("norms on fixed points") {
  CHECK(distance_l2_squared(pt({"3", "4"}), pt({"0", "0"})) == Rat(25));
  CHECK(distance(pt({"3", "4"}), pt({"0", "0"}), Norm::L2) == 5.0);
  CHECK(distance_linf(pt({"0.2", "0.5"}), pt({"0.1", "0.9"})) == Rat(2, 5));
  CHECK(distance_l0(pt({"0", "1", "1"}), pt({"1", "1", "0"})) == Rat(2));
  CHECK(distance_l1(pt({"0.2", "0.5"}), pt({"0.1", "0.9"})) == Rat(1, 2));
  CHECK(distance_l0(pt({"1", "1"}), pt({"1", "1"})) == Rat(0));
  CHECK_THROWS_AS(distance_linf(pt({"1"}), pt({"1", "2"})), DimensionError);
  CHECK_THROWS_AS(distance_l0(pt({"1"}), pt({"1", "2"})), DimensionError);
}

TEST_CASE("ball membership is exact at the boundary") {
  Point v = pt({"0.7"});
  CHECK(within_ball(pt({"0.6"}), v, {Norm::Linf, parse_rat("0.1")}));
  CHECK_FALSE(within_ball(pt({"0.59"}), v, {Norm::Linf, parse_rat("0.1")}));
  CHECK(within_ball(pt({"0", "1"}), pt({"1", "1"}), {Norm::L0, Rat(1)}));
  CHECK_FALSE(within_ball(pt({"0", "0"}), pt({"1", "1"}), {Norm::L0, Rat(1)}));

  // l2 compares squares, no rounding: dist^2 = 0.02
  Point a = pt({"0.1", "0.1"}), o = pt({"0", "0"});
  CHECK_FALSE(within_ball(a, o, {Norm::L2, parse_rat("0.141")}));
  CHECK(within_ball(a, o, {Norm::L2, parse_rat("0.142")}));

  CHECK(within_ball(pt({"0.3", "0.2"}), o, {Norm::L1, parse_rat("0.5")}));
  CHECK_FALSE(within_ball(pt({"0.3", "0.21"}), o, {Norm::L1, parse_rat("0.5")}));
}

TEST_CASE("l0 budget truncates epsilon") {
  CHECK(l0_budget(parse_rat("0.9")) == 0);
  CHECK(l0_budget(Rat(1)) == 1);
  CHECK(l0_budget(parse_rat("2.7")) == 2);
  CHECK(l0_budget(Rat(-1)) == 0);
}

TEST_CASE("meaningful-epsilon floor for discrete spaces") {
  FeatureSpace bin;
  for (int i = 0; i < 3; ++i) bin.domains.push_back(Domain::binary());
  CHECK(minimum_meaningful_epsilon(bin, Norm::L0) == Rat(1));
  CHECK(minimum_meaningful_epsilon(bin, Norm::Linf) == Rat(1));

  FeatureSpace q;
  q.domains.push_back(Domain::quantized(Rat(0), parse_rat("1.22"), parse_rat("0.61")));
  CHECK(minimum_meaningful_epsilon(q, Norm::Linf) == parse_rat("0.61"));
  CHECK(minimum_meaningful_epsilon(q, Norm::L0) == Rat(1));

  FeatureSpace r;
  r.domains.push_back(Domain::real(Rat(0), Rat(1)));
  CHECK_THROWS_AS(minimum_meaningful_epsilon(r, Norm::Linf), NotApplicableError);

  FeatureSpace single;
  single.domains.push_back(Domain::categorical({Rat(4)}));
  CHECK_THROWS_AS(minimum_meaningful_epsilon(single, Norm::Linf), NotApplicableError);
}

TEST_CASE("metric properties on random rational points") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    size_t n = 1 + static_cast<size_t>(trial % 4);
    Point x = random_point(rng, n), y = random_point(rng, n), z = random_point(rng, n);
    CHECK(distance_l1(x, y) == distance_l1(y, x));
    CHECK(distance_linf(x, y) == distance_linf(y, x));
    CHECK(distance_l0(x, y) == distance_l0(y, x));
    CHECK(distance_l1(x, z) <= distance_l1(x, y) + distance_l1(y, z));
    CHECK(distance_linf(x, z) <= distance_linf(x, y) + distance_linf(y, z));
    CHECK(distance_l0(x, z) <= distance_l0(x, y) + distance_l0(y, z));
    CHECK(distance_l1(x, x) == Rat(0));
    CHECK((distance_l1(x, y) == 0) == (x == y));
    // ball membership is monotone in epsilon
    Rat d = distance_linf(x, y);
    CHECK(within_ball(x, y, {Norm::Linf, d}));
    if (d > 0) CHECK_FALSE(within_ball(x, y, {Norm::Linf, d - Rat(1, 1000000)}));
  }
}
