#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "aex/aex.hpp"

using namespace aex;

namespace {

Point pt(std::initializer_list<const char*> vs) {
  Point p;
  for (const char* v : vs) p.push_back(parse_rat(v));
  return p;
}

FeatureSpace binary_space(size_t n) {
  FeatureSpace s;
  for (size_t i = 0; i < n; ++i) s.domains.push_back(Domain::binary());
  return s;
}

std::vector<Point> all_points(const FeatureSpace& space) {
  auto e = EnumerableSpace::make(space);
  std::vector<Point> out;
  std::vector<uint32_t> key(space.arity(), 0);
  for (uint64_t seen = 0; seen < e.total; ++seen) {
    out.push_back(e.materialize(key));
    for (size_t i = key.size(); i-- > 0;) {
      if (++key[i] < e.sizes[i]) break;
      key[i] = 0;
    }
  }
  return out;
}

// Satisfiability of `build`'s formula with copy-X inputs pinned to x.
bool reachable(const FeatureSpace& space, const Point& x,
               const std::function<void(Formula&)>& build) {
  Formula F;
  encode_inputs(F, space, Copy::X);
  build(F);
  std::set<size_t> all;
  for (size_t f = 0; f < space.arity(); ++f) all.insert(f);
  encode_fixed(F, space, x, all, Copy::X);
  return solve(F).status == SolveStatus::Sat;
}

int count_reachable(const FeatureSpace& space, const std::function<void(Formula&)>& build) {
  int n = 0;
  for (const Point& x : all_points(space))
    if (reachable(space, x, build)) ++n;
  return n;
}

}  // namespace

TEST_CASE("input encodings admit exactly the space") {
  FeatureSpace bin = binary_space(3);
  CHECK(count_reachable(bin, [](Formula&) {}) == 8);

  FeatureSpace mixed;
  mixed.domains.push_back(Domain::categorical({Rat(1), Rat(5), Rat(9)}));
  mixed.domains.push_back(Domain::integer(Rat(0), Rat(2)));
  CHECK(count_reachable(mixed, [](Formula&) {}) == 9);
}

TEST_CASE("fixed-feature fragments pin values") {
  FeatureSpace bin = binary_space(3);
  Point v = pt({"1", "0", "1"});
  // all features fixed: the center is the unique model
  CHECK(count_reachable(bin, [&](Formula& F) {
          std::set<size_t> all{0, 1, 2};
          encode_fixed(F, bin, v, all, Copy::X);
        }) == 1);
  // empty set: no constraint
  CHECK(count_reachable(bin, [&](Formula& F) {
          encode_fixed(F, bin, v, {}, Copy::X);
        }) == 8);
  // single feature halves the space
  CHECK(count_reachable(bin, [&](Formula& F) {
          encode_fixed(F, bin, v, {1}, Copy::X);
        }) == 4);
  Formula F;
  encode_inputs(F, bin, Copy::X);
  CHECK_THROWS_AS(encode_fixed(F, bin, v, {7}, Copy::X), PreconditionError);
}

TEST_CASE("center-ball fragments match within_ball exactly") {
  FeatureSpace bin = binary_space(3);
  Point v = pt({"0", "0", "0"});

  auto ball_count = [&](const FeatureSpace& space, const Point& center,
                        const DistanceSpec& spec) {
    int n = 0;
    for (const Point& x : all_points(space)) {
      bool enc = reachable(space, x, [&](Formula& F) {
        encode_distance_center(F, space, spec, center, Copy::X);
      });
      bool truth = within_ball(x, center, spec);
      REQUIRE(enc == truth);
      if (enc) ++n;
    }
    return n;
  };

  CHECK(ball_count(bin, v, {Norm::L0, Rat(1)}) == 4);  // center + 3 flips
  CHECK(ball_count(bin, v, {Norm::L0, Rat(0)}) == 1);
  CHECK(ball_count(bin, v, {Norm::L0, Rat(3)}) == 8);

  FeatureSpace q;
  q.domains.push_back(Domain::quantized(Rat(0), Rat(2), Rat(1, 2)));
  CHECK(ball_count(q, pt({"1"}), {Norm::Linf, Rat(1, 2)}) == 3);  // {0.5, 1, 1.5}

  // l1/l2 go through exact scaled weighted constraints
  FeatureSpace q2;
  q2.domains.push_back(Domain::quantized(Rat(0), Rat(1), Rat(1, 4)));
  q2.domains.push_back(Domain::quantized(Rat(0), Rat(1), Rat(1, 4)));
  ball_count(q2, pt({"0.5", "0.25"}), {Norm::L1, parse_rat("0.5")});
  ball_count(q2, pt({"0.5", "0.25"}), {Norm::L2, parse_rat("0.3")});
}

TEST_CASE("dual-ball fragments relate the two copies") {
  FeatureSpace bin = binary_space(2);
  int pairs = 0;
  for (const Point& x : all_points(bin))
    for (const Point& y : all_points(bin)) {
      Formula F;
      encode_inputs(F, bin, Copy::X);
      encode_inputs(F, bin, Copy::Y);
      encode_distance_dual(F, bin, {Norm::L0, Rat(1)});
      std::set<size_t> all{0, 1};
      encode_fixed(F, bin, x, all, Copy::X);
      encode_fixed(F, bin, y, all, Copy::Y);
      bool enc = solve(F).status == SolveStatus::Sat;
      REQUIRE(enc == within_ball(x, y, {Norm::L0, Rat(1)}));
      if (enc) ++pairs;
    }
  CHECK(pairs == 12);
}

TEST_CASE("linear encodings reproduce the classifier") {
  Classifier m = quantize_space(build_kappa1(), Rat(1, 10));
  for (const Point& x : all_points(m.space)) {
    Formula F;
    encode_inputs(F, m.space, Copy::X);
    auto inds = encode_classifier(F, m, Copy::X);
    REQUIRE(inds.size() == 2);
    std::set<size_t> all{0};
    encode_fixed(F, m.space, x, all, Copy::X);
    auto r = solve(F);
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(decode_class(r, F.vars, Copy::X) == evaluate(m, x));
    CHECK(decode(r, F.vars, Copy::X, m.space) == x);

    // forcing the other class on a fully pinned input is unsat
    Formula G;
    encode_inputs(G, m.space, Copy::X);
    auto inds2 = encode_classifier(G, m, Copy::X);
    encode_fixed(G, m.space, x, all, Copy::X);
    encode_class_is(G, inds2, evaluate(m, x).idx, false);
    CHECK(solve(G).status == SolveStatus::Unsat);
  }
}

TEST_CASE("BNN encodings reproduce the truth table") {
  for (uint64_t seed : {1ull, 9ull, 23ull}) {
    Classifier m = make_random_bnn(seed, 4, seed % 2 ? std::vector<size_t>{5}
                                                     : std::vector<size_t>{4, 3});
    for (const Point& x : all_points(m.space)) {
      Formula F;
      encode_inputs(F, m.space, Copy::X);
      encode_classifier(F, m, Copy::X);
      std::set<size_t> all{0, 1, 2, 3};
      encode_fixed(F, m.space, x, all, Copy::X);
      auto r = solve(F);
      REQUIRE(r.status == SolveStatus::Sat);
      REQUIRE(decode_class(r, F.vars, Copy::X) == evaluate(m, x));
    }
  }
}

TEST_CASE("lookup encodings reproduce the table") {
  std::vector<Domain> doms = {Domain::binary(), Domain::categorical({Rat(0), Rat(2), Rat(5)}),
                              Domain::integer(Rat(0), Rat(2))};
  Classifier m = make_random_lookup(5, doms);
  for (const Point& x : all_points(m.space)) {
    Formula F;
    encode_inputs(F, m.space, Copy::X);
    encode_classifier(F, m, Copy::X);
    std::set<size_t> all{0, 1, 2};
    encode_fixed(F, m.space, x, all, Copy::X);
    auto r = solve(F);
    REQUIRE(r.status == SolveStatus::Sat);
    REQUIRE(decode_class(r, F.vars, Copy::X) == evaluate(m, x));
  }
}

TEST_CASE("unencodable bodies are rejected") {
  Formula F;
  Classifier k1 = build_kappa1();  // continuous real domain
  encode_inputs(F, quantize_space(k1, Rat(1, 10)).space, Copy::X);
  CHECK_THROWS_AS(encode_classifier(F, k1, Copy::X), EncodingError);

  Classifier k2q = quantize_space(build_kappa2(), Rat(1, 2));
  Formula G;
  encode_inputs(G, k2q.space, Copy::X);
  CHECK_THROWS_AS(encode_classifier(G, k2q, Copy::X), EncodingError);

  // abstain entries cannot be encoded as a class indicator
  Classifier lk;
  lk.space = binary_space(1);
  lk.classes = {"a", "b"};
  LookupBody body;
  body.table[{0}] = 0;
  body.table[{1}] = -1;
  lk.body = body;
  Formula H;
  encode_inputs(H, lk.space, Copy::X);
  CHECK_THROWS_AS(encode_classifier(H, lk, Copy::X), EncodingError);

  // domain too wide for one-hot value encoding
  Classifier wide = quantize_space(build_kappa1(), Rat(1, 100000));
  Formula W;
  CHECK_THROWS_AS(encode_inputs(W, wide.space, Copy::X), EncodingError);
}

TEST_CASE("decode rejects corrupted one-hot blocks") {
  FeatureSpace mixed;
  mixed.domains.push_back(Domain::categorical({Rat(1), Rat(2), Rat(3)}));
  Formula F;
  encode_inputs(F, mixed, Copy::X);
  auto r = solve(F);
  REQUIRE(r.status == SolveStatus::Sat);
  CHECK_NOTHROW(decode(r, F.vars, Copy::X, mixed));

  SolveResult fake = r;
  for (size_t v = 1; v < fake.model.size(); ++v) fake.model[v] = 1;  // all-true
  CHECK_THROWS_AS(decode(fake, F.vars, Copy::X, mixed), SoundnessError);
  SolveResult none = r;
  for (size_t v = 1; v < none.model.size(); ++v) none.model[v] = 0;
  CHECK_THROWS_AS(decode(none, F.vars, Copy::X, mixed), SoundnessError);
}

TEST_CASE("decode requires a satisfiable result") {
  FeatureSpace bin = binary_space(1);
  Formula F;
  encode_inputs(F, bin, Copy::X);
  SolveResult r;
  r.status = SolveStatus::Unsat;
  CHECK_THROWS_AS(decode(r, F.vars, Copy::X, bin), PreconditionError);
}
