// Command-line front end: robustness queries, global-counterexample
// construction, explanation computation, paper-style demos, and a
// benchmark table over a directory of models.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aex/aex.hpp"

namespace {

void add_common(CLI::App* sub, aex::RunConfig& cfg) {
  sub->add_option("--model", cfg.model,
                  "model file or builtin:{kappa1,kappa1q,kappa2}");
  sub->add_option("--norm", cfg.norm, "distance norm: l0, l1, l2, linf");
  sub->add_option("--eps", cfg.eps, "ball radius (exact decimal or p/q)");
  sub->add_option("--qs", cfg.qs, "quantize real features to this step");
  sub->add_option("--solver", cfg.solver, "embedded or cmd:<path>");
  sub->add_option("--limit-time", cfg.limit_time, "solver budget, seconds");
  sub->add_option("--limit-conflicts", cfg.limit_conflicts, "solver conflict budget");
  sub->add_option("--seed", cfg.seed, "random seed for sampling paths");
  sub->add_option("--format", cfg.format, "human or structured");
  sub->add_option("--out", cfg.out, "write the report to this path");
  sub->add_flag("--deterministic", cfg.deterministic,
                "omit timings so identical runs match byte for byte");
}

void add_instance(CLI::App* sub, aex::RunConfig& cfg) {
  sub->add_option("--point", cfg.point, "instance, comma-separated values");
  sub->add_option("--dataset", cfg.dataset, "dataset file (header + label column)");
  sub->add_option("--row", cfg.row, "0-based dataset row");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial-example oracle, robustness decisions, and "
               "distance-restricted explanations"};
  app.require_subcommand(1);

  aex::RunConfig cfg;
  if (const char* env = std::getenv("AEX_SOLVER_CMD"); env && *env)
    cfg.solver = std::string("cmd:") + env;

  auto* robust = app.add_subcommand("robust", "decide local robustness at a point");
  add_common(robust, cfg);
  add_instance(robust, cfg);

  auto* global = app.add_subcommand(
      "global", "construct a within-epsilon pair with different predictions");
  add_common(global, cfg);
  global->add_option("--delta", cfg.delta,
                     "score-gap threshold: switch to the linear score analysis");

  auto* explain = app.add_subcommand("explain", "compute or enumerate explanations");
  add_common(explain, cfg);
  add_instance(explain, cfg);
  explain->add_option("--kind", cfg.kind, "axp, cxp, or enumerate");
  explain->add_option("--limit", cfg.limit, "stop enumeration after this many sets");

  auto* demo = app.add_subcommand("demo", "re-derive the worked examples end to end");
  add_common(demo, cfg);
  demo->add_option("--samples", cfg.samples, "sampling effort per evaluation point");

  auto* bench = app.add_subcommand("bench", "benchmark table over a model directory");
  add_common(bench, cfg);
  bench->add_option("--dir", cfg.model_dir, "directory of .json model files");

  std::string solve_path;
  auto* solve = app.add_subcommand("solve", "decide a DIMACS CNF or OPB file");
  add_common(solve, cfg);
  solve->add_option("file", solve_path, "input formula")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (robust->parsed()) return aex::cmd_robust(cfg);
    if (global->parsed()) return aex::cmd_global(cfg);
    if (explain->parsed()) return aex::cmd_explain(cfg);
    if (demo->parsed()) return aex::cmd_demo(cfg);
    if (bench->parsed()) return aex::cmd_bench(cfg);
    if (solve->parsed()) return aex::cmd_solve(cfg, solve_path);
  } catch (const aex::TrivialClassifierError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aex::kExitFailure;
  } catch (const aex::UnknownResultError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aex::kExitUnknown;
  } catch (const aex::SoundnessError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return aex::kExitFailure;
  } catch (const aex::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aex::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aex::kExitUsage;
  }
  return aex::kExitUsage;
}
