#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aex/brute.hpp"
#include "aex/emit.hpp"
#include "aex/errors.hpp"
#include "aex/explain.hpp"
#include "aex/fixtures.hpp"
#include "aex/global.hpp"
#include "aex/model.hpp"
#include "aex/model_io.hpp"
#include "aex/report.hpp"
#include "aex/robustness.hpp"
#include "aex/solver.hpp"

namespace aex {

// Exit-code contract: 0 affirmative (robust / no pair / computed),
// 10 counterexample found (not robust / certificate refuted),
// 20 undecided, 2 configuration error, 3 trivial classifier or
// internal failure.
constexpr int kExitOk = 0;
constexpr int kExitCounterexample = 10;
constexpr int kExitUnknown = 20;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

struct RunConfig {
  std::string model;              // path or builtin:kappa1|kappa1q|kappa2
  std::string point;              // comma-separated values
  std::string dataset;            // alternative instance source
  int64_t row = -1;               // dataset row index (0-based)
  std::string norm = "linf";
  std::string eps = "0.1";
  std::string qs;                 // quantization override for real features
  std::string solver = "embedded";  // or cmd:<path>
  double limit_time = 0;
  int64_t limit_conflicts = 0;
  uint64_t seed = 1;
  std::string format = "human";   // or structured
  std::string out;                // report path ("" = stdout)
  bool deterministic = false;
  // command-specific
  std::string kind = "axp";       // explain: axp | cxp | enumerate
  int64_t limit = 0;              // explain: enumeration cap
  std::string delta;              // global: score-gap threshold
  int64_t samples = 100;          // demo: sampling effort per point
  std::string model_dir;          // bench: directory of model files
};

namespace cli_detail {

inline Norm parse_norm(const std::string& s) {
  if (s == "l0") return Norm::L0;
  if (s == "l1") return Norm::L1;
  if (s == "l2") return Norm::L2;
  if (s == "linf") return Norm::Linf;
  throw PreconditionError("unknown norm '" + s + "' (expected l0, l1, l2, linf)");
}

inline Classifier resolve_model(const RunConfig& cfg) {
  Classifier m;
  if (cfg.model == "builtin:kappa1")
    m = build_kappa1();
  else if (cfg.model == "builtin:kappa1q")
    m = build_kappa1_quantized();
  else if (cfg.model == "builtin:kappa2")
    m = build_kappa2();
  else if (cfg.model.rfind("builtin:", 0) == 0)
    throw PreconditionError("unknown builtin model '" + cfg.model + "'");
  else if (cfg.model.empty())
    throw PreconditionError("no model given");
  else
    m = load_model(cfg.model);
  if (!cfg.qs.empty()) m = quantize_space(std::move(m), parse_rat(cfg.qs));
  return m;
}

inline Point parse_point(const std::string& s) {
  Point x;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    while (!cur.empty() && (cur.front() == ' ' || cur.front() == '(')) cur.erase(0, 1);
    while (!cur.empty() && (cur.back() == ' ' || cur.back() == ')')) cur.pop_back();
    if (!cur.empty()) x.push_back(parse_rat(cur));
  }
  if (x.empty()) throw PreconditionError("empty point");
  return x;
}

inline Point resolve_point(const RunConfig& cfg) {
  if (!cfg.point.empty()) return parse_point(cfg.point);
  if (!cfg.dataset.empty()) {
    if (cfg.row < 0) throw PreconditionError("--dataset needs --row");
    Dataset ds = load_dataset(cfg.dataset);
    if (cfg.row >= static_cast<int64_t>(ds.points.size()))
      throw PreconditionError("dataset has only " + std::to_string(ds.points.size()) +
                              " rows");
    return ds.points[static_cast<size_t>(cfg.row)];
  }
  throw PreconditionError("no instance given (--point or --dataset/--row)");
}

inline QueryOptions query_options(const RunConfig& cfg) {
  QueryOptions opts;
  if (cfg.solver.rfind("cmd:", 0) == 0) {
    opts.external_cmd = cfg.solver.substr(4);
    opts.engine = Engine::Solver;
  } else if (cfg.solver != "embedded") {
    throw PreconditionError("unknown solver '" + cfg.solver +
                            "' (expected embedded or cmd:<path>)");
  }
  if (cfg.limit_conflicts > 0) opts.budget.max_conflicts = cfg.limit_conflicts;
  if (cfg.limit_time > 0) opts.budget.max_seconds = cfg.limit_time;
  return opts;
}

inline void emit(const RunConfig& cfg, const std::string& title, const Report& rep) {
  std::string text =
      cfg.format == "structured" ? rep.structured() : title + "\n" + rep.human();
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw PreconditionError("cannot open report path '" + cfg.out + "'");
  f << text;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

inline size_t neuron_count(const Classifier& m) {
  if (const auto* nn = std::get_if<BnnBody>(&m.body)) {
    size_t n = 0;
    for (const auto& l : nn->hidden) n += l.weights.size();
    return n;
  }
  return 0;
}

inline size_t body_depth(const Classifier& m) {
  if (const auto* nn = std::get_if<BnnBody>(&m.body)) return nn->hidden.size();
  if (const auto* pw = std::get_if<PiecewiseBody>(&m.body)) return pw->branches.size();
  return 1;
}

inline void add_model_shape(Report& rep, const Classifier& m) {
  rep.add("m", m.space.arity());
  rep.add("K", m.classes.size());
  rep.add("D", body_depth(m));
  rep.add("N", neuron_count(m));
}

}  // namespace cli_detail

inline int cmd_robust(const RunConfig& cfg) {
  using namespace cli_detail;
  Timer timer;
  Classifier m = resolve_model(cfg);
  Point v = resolve_point(cfg);
  DistanceSpec spec{parse_norm(cfg.norm), parse_rat(cfg.eps)};
  auto E = make_problem(m, v);
  auto opts = query_options(cfg);

  auto verdict = is_locally_robust(E, spec, opts);
  Report rep;
  rep.add("command", "robust");
  rep.add("model", m.name);
  rep.add("point", v);
  rep.add("class", std::to_string(E.inst.c.idx));
  rep.add("norm", cfg.norm);
  rep.add("eps", spec.epsilon);
  rep.add("verdict", verdict_name(verdict.verdict));
  rep.add("engine", std::string(verdict.engine));
  if (verdict.witness) {
    rep.add("witness", *verdict.witness);
    rep.add("witness_class", std::to_string(evaluate(m, *verdict.witness).idx));
    rep.add("witness_distance", format_approx(Rat(distance(*verdict.witness, v, spec.p))));
  }
  if (!verdict.reason.empty()) rep.add("reason", verdict.reason);
  rep.add("conflicts", verdict.stats.conflicts);
  rep.add("decisions", verdict.stats.decisions);
  if (!cfg.deterministic) rep.add("time_ms", timer.ms());
  emit(cfg, "aex robust", rep);
  switch (verdict.verdict) {
    case Verdict::Robust: return kExitOk;
    case Verdict::NotRobust: return kExitCounterexample;
    case Verdict::Unknown: return kExitUnknown;
  }
  return kExitFailure;
}

inline int cmd_global(const RunConfig& cfg) {
  using namespace cli_detail;
  Timer timer;
  Classifier m = resolve_model(cfg);
  DistanceSpec spec{parse_norm(cfg.norm), parse_rat(cfg.eps)};
  Report rep;
  rep.add("command", "global");
  rep.add("model", m.name);
  add_model_shape(rep, m);
  rep.add("norm", cfg.norm);
  rep.add("eps", spec.epsilon);

  if (!cfg.delta.empty()) {
    auto r = find_global_counterexample_delta(m, spec, parse_rat(cfg.delta));
    rep.add("delta", cfg.delta);
    rep.add("max_score_gap", pretty_rat(r.max_gap));
    rep.add("aex", r.status == FindStatus::Found ? "yes" : "no");
    if (r.status == FindStatus::Found) {
      rep.add("x", r.x);
      rep.add("y", r.y);
      rep.add("score_x", pretty_rat(r.score_x));
      rep.add("score_y", pretty_rat(r.score_y));
    }
    if (!cfg.deterministic) rep.add("time_ms", timer.ms());
    emit(cfg, "aex global (score gap)", rep);
    return r.status == FindStatus::Found ? kExitCounterexample : kExitOk;
  }

  auto g = find_global_counterexample(m, spec, query_options(cfg));
  rep.add("aex", g.status == FindStatus::Found   ? "yes"
               : g.status == FindStatus::None ? "no"
                                              : "unknown");
  if (g.status == FindStatus::Found) {
    rep.add("x", g.x);
    rep.add("y", g.y);
    rep.add("class_x", std::to_string(g.lx.idx));
    rep.add("class_y", std::to_string(g.ly.idx));
    rep.add("distance", format_approx(Rat(distance(g.x, g.y, spec.p))));
    rep.add("engine", std::string(g.engine));
  }
  if (!g.reason.empty()) rep.add("reason", g.reason);
  if (!cfg.deterministic) rep.add("time_ms", timer.ms());
  emit(cfg, "aex global", rep);
  if (g.status == FindStatus::Found) return kExitCounterexample;
  return g.status == FindStatus::None ? kExitOk : kExitUnknown;
}

inline int cmd_explain(const RunConfig& cfg) {
  using namespace cli_detail;
  Timer timer;
  Classifier m = resolve_model(cfg);
  Point v = resolve_point(cfg);
  DistanceSpec spec{parse_norm(cfg.norm), parse_rat(cfg.eps)};
  auto E = make_problem(m, v);
  uint64_t calls = 0;
  auto opts = query_options(cfg);
  opts.oracle_calls = &calls;

  Report rep;
  rep.add("command", "explain");
  rep.add("model", m.name);
  rep.add("point", v);
  rep.add("class", std::to_string(E.inst.c.idx));
  rep.add("norm", cfg.norm);
  rep.add("eps", spec.epsilon);
  rep.add("kind", cfg.kind);

  int code = kExitOk;
  if (cfg.kind == "axp") {
    try {
      rep.add("axp", format_feature_set(find_axp(E, spec, std::nullopt, opts)));
    } catch (const UnknownResultError& e) {
      rep.add("axp", "unknown");
      rep.add("reason", e.what());
      code = kExitUnknown;
    }
  } else if (cfg.kind == "cxp") {
    try {
      rep.add("cxp", format_feature_set(find_cxp(E, spec, std::nullopt, opts)));
    } catch (const UnknownResultError& e) {
      rep.add("cxp", "unknown");
      rep.add("reason", e.what());
      code = kExitUnknown;
    }
  } else if (cfg.kind == "enumerate") {
    auto listing = enumerate_explanations(E, spec, static_cast<size_t>(cfg.limit), opts);
    std::string axps, cxps;
    for (const auto& s : listing.axps) {
      if (!axps.empty()) axps += " ";
      axps += format_feature_set(s);
    }
    for (const auto& s : listing.cxps) {
      if (!cxps.empty()) cxps += " ";
      cxps += format_feature_set(s);
    }
    rep.add("axps", axps.empty() ? "-" : axps);
    rep.add("cxps", cxps.empty() ? "-" : cxps);
    rep.add("complete", listing.complete ? "yes" : "no");
    if (!listing.complete) code = kExitUnknown;
  } else {
    throw PreconditionError("unknown explanation kind '" + cfg.kind + "'");
  }
  rep.add("oracle_calls", calls);
  if (!cfg.deterministic) rep.add("time_ms", timer.ms());
  emit(cfg, "aex explain", rep);
  return code;
}

inline int cmd_demo(const RunConfig& cfg) {
  using namespace cli_detail;
  Timer timer;
  Report rep;
  rep.add("command", "demo");

  // kappa1: training accuracy, transition point, flip threshold
  Classifier k1 = build_kappa1();
  auto [xs, ys] = kappa1_training_data();
  size_t correct = 0;
  for (size_t i = 0; i < xs.size(); ++i)
    if (evaluate(k1, xs[i]) == ys[i]) ++correct;
  rep.add("kappa1_training_accuracy",
          std::to_string(correct) + "/" + std::to_string(xs.size()));

  Rat tol(1, 100000000);
  auto bracket = find_transition_point(k1, {parse_rat("0.4")}, {parse_rat("0.7")}, tol);
  rep.add("kappa1_transition", format_approx(bracket.z()[0]));
  Point v07 = {parse_rat("0.7")};
  Rat flip = rat_abs(v07[0] - bracket.z()[0]);
  rep.add("kappa1_flip_threshold_at_0.7", format_approx(flip));

  auto E1 = make_problem(k1, v07);
  auto opts = query_options(cfg);
  rep.add("kappa1_robust_eps_0.005",
          verdict_name(is_locally_robust(E1, {Norm::Linf, parse_rat("0.005")}, opts)
                           .verdict));
  rep.add("kappa1_robust_eps_0.006",
          verdict_name(is_locally_robust(E1, {Norm::Linf, parse_rat("0.006")}, opts)
                           .verdict));

  // kappa2 explanations at the paper's instance
  Classifier k2 = build_kappa2();
  auto E2 = make_problem(k2, {Rat(0), Rat(1)});
  for (const char* eps : {"0.5", "0.7"}) {
    DistanceSpec spec{Norm::Linf, parse_rat(eps)};
    auto listing = enumerate_explanations(E2, spec, 0, opts);
    std::string axps, cxps;
    for (const auto& s : listing.axps) {
      if (!axps.empty()) axps += " ";
      axps += format_feature_set(s);
    }
    for (const auto& s : listing.cxps) {
      if (!cxps.empty()) cxps += " ";
      cxps += format_feature_set(s);
    }
    rep.add(std::string("kappa2_axps_eps_") + eps, axps.empty() ? "-" : axps);
    rep.add(std::string("kappa2_cxps_eps_") + eps, cxps.empty() ? "-" : cxps);
  }
  DistanceSpec plain = unrestricted_spec(k2);
  rep.add("kappa2_plain_axp", format_feature_set(find_axp(E2, plain, std::nullopt, opts)));
  rep.add("kappa2_plain_cxp", format_feature_set(find_cxp(E2, plain, std::nullopt, opts)));

  // sampling vs complete verdicts vs the constructed refutation
  DistanceSpec spec{parse_norm(cfg.norm), parse_rat(cfg.eps)};
  SamplingConfig scfg;
  scfg.n = cfg.samples;
  scfg.seed = cfg.seed;
  auto demo = certify_demo(k1, spec, xs, scfg, opts);
  for (size_t i = 0; i < demo.rows.size(); ++i) {
    const auto& row = demo.rows[i];
    std::string s = "point=" + format_point(row.v) +
                    " sampled=" + (row.sampled_found ? "AExFound" : "NoAExFound") + "(" +
                    std::to_string(row.samples) + ")" +
                    " complete=" + verdict_name(row.complete);
    rep.add("certify_row_" + std::to_string(i), s);
  }
  if (demo.has_bracket) {
    rep.add("refutation_pair_x", demo.bracket.below);
    rep.add("refutation_pair_y", demo.bracket.above);
    rep.add("refutation_gap", format_approx(demo.bracket.width));
  }
  rep.add("certificate_refuted", demo.refuted ? "yes" : "no");
  if (demo.refuted) {
    rep.add("refutation_x", demo.pair.x);
    rep.add("refutation_y", demo.pair.y);
  }
  if (!cfg.deterministic) rep.add("time_ms", timer.ms());
  emit(cfg, "aex demo", rep);
  return demo.refuted ? kExitCounterexample : kExitOk;
}

inline int cmd_bench(const RunConfig& cfg) {
  using namespace cli_detail;
  namespace fs = std::filesystem;
  if (cfg.model_dir.empty()) throw PreconditionError("bench needs --dir");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(cfg.model_dir))
    if (e.is_regular_file() && e.path().extension() == ".json")
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());

  std::ostringstream table;
  table << "model,m,K,D,N,p,eps,aex,time_ms\n";
  auto opts = query_options(cfg);
  for (const auto& path : files) {
    for (const std::string norm : {std::string("l0"), std::string(cfg.norm)}) {
      Timer timer;
      std::string name = fs::path(path).stem().string();
      try {
        Classifier m = load_model(path);
        if (!cfg.qs.empty()) m = quantize_space(std::move(m), parse_rat(cfg.qs));
        DistanceSpec spec{parse_norm(norm), norm == "l0" ? Rat(1) : parse_rat(cfg.eps)};
        auto g = find_global_counterexample(m, spec, opts);
        table << name << "," << m.space.arity() << "," << m.classes.size() << ","
              << body_depth(m) << "," << neuron_count(m) << "," << norm << ","
              << format_rat(spec.epsilon) << ","
              << (g.status == FindStatus::Found   ? "yes"
                  : g.status == FindStatus::None ? "no"
                                                 : "unknown")
              << "," << (cfg.deterministic ? std::string("-") : std::to_string(timer.ms()))
              << "\n";
      } catch (const Error& e) {
        table << name << ",-,-,-,-," << norm << ",-,error: " << e.what() << ","
              << (cfg.deterministic ? std::string("-") : std::to_string(timer.ms()))
              << "\n";
      }
      if (norm == "l0" && cfg.norm == "l0") break;  // avoid duplicate rows
    }
  }
  if (cfg.out.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw PreconditionError("cannot open report path '" + cfg.out + "'");
    f << table.str();
  }
  return kExitOk;
}

// Backend for the external-solver bridge: reads DIMACS CNF or OPB,
// decides it with the embedded solver, and answers in the standard
// s/v line protocol.
inline int cmd_solve(const RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  // sniff: DIMACS has a "p cnf" problem line
  bool dimacs = false;
  std::stringstream look(text);
  std::string line;
  while (std::getline(look, line)) {
    size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || line[i] == 'c' || line[i] == '*') continue;
    dimacs = line[i] == 'p';
    break;
  }
  std::stringstream body(text);
  Formula f = dimacs ? parse_dimacs(body) : parse_opb(body);

  QueryOptions opts = cli_detail::query_options(cfg);
  SolveResult r = solve(f, opts.budget);
  if (r.status == SolveStatus::ResourceOut) {
    std::cout << "s UNKNOWN\n";
    return kExitUnknown;
  }
  if (r.status == SolveStatus::Unsat) {
    std::cout << "s UNSATISFIABLE\n";
    return kExitCounterexample;  // conventional 20/10 split unused here
  }
  std::cout << "s SATISFIABLE\n";
  std::string vline = "v";
  for (int var = 1; var <= f.vars.count(); ++var) {
    vline += r.value(var) ? " " : " -";
    vline += std::to_string(var);
    if (vline.size() > 72) {
      std::cout << vline << "\n";
      vline = "v";
    }
  }
  std::cout << vline << " 0\n";
  return kExitOk;
}

}  // namespace aex
