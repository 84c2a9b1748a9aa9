#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "aex/domain.hpp"
#include "aex/errors.hpp"
#include "aex/model.hpp"
#include "aex/rational.hpp"

namespace aex {

// Single real feature on [0,1]; class 1 iff 0.93198992*x1 - 0.64735516 >= 0.
// The decision boundary sits at 16183879/23299748 ~ 0.69459459.
inline Classifier build_kappa1() {
  Classifier m;
  m.name = "kappa1";
  m.space.domains = {Domain::real(0, 1)};
  m.classes = {"0", "1"};
  LinearBody b;
  b.weights = {parse_rat("0.93198992")};
  b.bias = parse_rat("0.64735516");
  m.body = std::move(b);
  return m;
}

// The five labelled training points behind kappa1.
inline std::pair<std::vector<Point>, std::vector<ClassLabel>> kappa1_training_data() {
  std::vector<Point> xs = {{parse_rat("0.0")}, {parse_rat("0.3")}, {parse_rat("0.4")},
                           {parse_rat("0.7")}, {parse_rat("1.0")}};
  std::vector<ClassLabel> ys = {ClassLabel(0), ClassLabel(0), ClassLabel(0),
                                ClassLabel(1), ClassLabel(1)};
  return {xs, ys};
}

// Replaces every real domain with a grid of the given step.
inline Classifier quantize_space(Classifier m, const Rat& qs) {
  if (qs <= 0) throw PreconditionError("quantization step must be positive");
  for (auto& d : m.space.domains)
    if (d.kind == Domain::Kind::Real) d = Domain::quantized(d.lo, d.hi, qs);
  return m;
}

inline Classifier build_kappa1_quantized(const Rat& qs = Rat(1, 1000000)) {
  Classifier m = quantize_space(build_kappa1(), qs);
  m.name = "kappa1q";
  return m;
}

// Two real features on [0,2]^2. For x1 <= 1 the first feature decides as
// kappa1 does; otherwise the model compares the two features.
inline Classifier build_kappa2() {
  auto lift = std::make_shared<Classifier>();
  lift->name = "kappa2.low";
  lift->space.domains = {Domain::real(0, 2), Domain::real(0, 2)};
  lift->classes = {"0", "1"};
  lift->body = LinearBody{{parse_rat("0.93198992"), Rat(0)}, parse_rat("0.64735516")};

  auto one = std::make_shared<Classifier>();
  one->name = "kappa2.gt";
  one->space = lift->space;
  one->classes = lift->classes;
  one->body = LinearBody{{Rat(0), Rat(0)}, Rat(-1)};  // constant class 1

  auto zero = std::make_shared<Classifier>();
  zero->name = "kappa2.rest";
  zero->space = lift->space;
  zero->classes = lift->classes;
  zero->body = LinearBody{{Rat(0), Rat(0)}, Rat(1)};  // constant class 0

  PiecewiseBody pw;
  pw.branches.push_back({{GuardAtom{{Rat(1), Rat(0)}, Rat(1), Rel::Le}}, lift});
  pw.branches.push_back({{GuardAtom{{Rat(1), Rat(-1)}, Rat(0), Rel::Gt}}, one});
  pw.branches.push_back({{}, zero});

  Classifier m;
  m.name = "kappa2";
  m.space = lift->space;
  m.classes = lift->classes;
  m.body = std::move(pw);
  return m;
}

// Seeded random signed-binary network over n binary inputs. Hidden
// widths chain from the input; thresholds stay within the fan-in so
// neurons are live. Regenerates until a probe finds two labels.
inline Classifier make_random_bnn(uint64_t seed, size_t inputs,
                                  const std::vector<size_t>& widths, size_t classes = 2) {
  if (inputs == 0 || widths.empty() || classes < 2)
    throw PreconditionError("network shape too small");
  for (uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed + attempt * 0x9e3779b97f4a7c15ull);
    BnnBody b;
    size_t prev = inputs;
    for (size_t w : widths) {
      BnnBody::Layer layer;
      std::uniform_int_distribution<int> coin(0, 1);
      std::uniform_int_distribution<int64_t> th(-static_cast<int64_t>(prev) / 2,
                                                static_cast<int64_t>(prev) / 2);
      for (size_t j = 0; j < w; ++j) {
        std::vector<int8_t> row(prev);
        for (auto& v : row) v = coin(rng) ? 1 : -1;
        layer.weights.push_back(std::move(row));
        layer.thresholds.push_back(th(rng));
      }
      prev = w;
      b.hidden.push_back(std::move(layer));
    }
    std::uniform_int_distribution<int> coin(0, 1);
    for (size_t k = 0; k < classes; ++k) {
      std::vector<int8_t> row(prev);
      for (auto& v : row) v = coin(rng) ? 1 : -1;
      b.output_weights.push_back(std::move(row));
    }

    Classifier m;
    m.name = "bnn" + std::to_string(seed);
    for (size_t f = 0; f < inputs; ++f) m.space.domains.push_back(Domain::binary());
    for (size_t k = 0; k < classes; ++k) m.classes.push_back(std::to_string(k));
    m.body = std::move(b);

    // probe: corners, single flips, then a few random points
    Point zs(inputs, Rat(0)), os(inputs, Rat(1));
    ClassLabel l0 = evaluate(m, zs);
    bool nontrivial = evaluate(m, os) != l0;
    for (size_t f = 0; f < inputs && !nontrivial; ++f) {
      Point q = zs;
      q[f] = 1;
      nontrivial = evaluate(m, q) != l0;
    }
    for (int t = 0; t < 64 && !nontrivial; ++t) {
      Point q(inputs);
      for (auto& v : q) v = Rat(coin(rng));
      nontrivial = evaluate(m, q) != l0;
    }
    if (nontrivial) return m;
  }
}

// Seeded random total lookup table over small discrete domains.
// Regenerates until two labels appear.
inline Classifier make_random_lookup(uint64_t seed, const std::vector<Domain>& domains,
                                     size_t classes = 2) {
  for (const auto& d : domains)
    if (!d.discrete()) throw PreconditionError("lookup needs discrete domains");
  for (uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed + attempt * 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(classes) - 1);
    LookupBody b;
    std::vector<uint32_t> key(domains.size(), 0);
    bool more = true;
    int first = -1;
    bool nontrivial = false;
    while (more) {
      int cls = pick(rng);
      if (first < 0)
        first = cls;
      else if (cls != first)
        nontrivial = true;
      b.table[key] = cls;
      more = false;
      for (size_t f = key.size(); f-- > 0;) {
        if (++key[f] < domains[f].size()) {
          more = true;
          break;
        }
        key[f] = 0;
      }
    }
    if (!nontrivial) continue;
    Classifier m;
    m.name = "lookup" + std::to_string(seed);
    m.space.domains = domains;
    for (size_t k = 0; k < classes; ++k) m.classes.push_back(std::to_string(k));
    m.body = std::move(b);
    return m;
  }
}

}  // namespace aex
