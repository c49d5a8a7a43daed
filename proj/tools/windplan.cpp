// windplan: benchmark, ablation and path-planning experiments.
//
//   windplan bench    --seed 42 [--config cfg.json] [--runs N] [--jobs N] [--out DIR]
//   windplan ablation --seed 42 ...
//   windplan plan     --seed 42 [--scenario scenarios/default.json] ...

#include <CLI11.hpp>
#include <iostream>

#include "windplan/benchmarks.hpp"
#include "windplan/experiment.hpp"

namespace ex = windplan::experiment;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> population;
  std::optional<std::size_t> iterations;
  std::string out;
  std::vector<std::string> functions;
  std::vector<std::string> algorithms;
  std::string scenario;
  bool no_figures = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config; flags override its fields");
  cmd->add_option("--seed", f.seed, "master seed (required here or in the config)");
  cmd->add_option("--runs", f.runs, "independent runs per algorithm");
  cmd->add_option("--jobs", f.jobs, "concurrent runs");
  cmd->add_option("--out", f.out, "output directory (fallback: $WINDPLAN_OUT, then ./results)");
  cmd->add_option("--population", f.population, "population size");
  cmd->add_option("--iterations", f.iterations, "iterations (per replan for plan)");
  cmd->add_option("--algorithms", f.algorithms, "algorithm names")->delimiter(',');
  cmd->add_flag("--no-figures", f.no_figures, "skip SVG output");
}

ex::ExperimentConfig build_config(ex::Command command, const Flags& f) {
  ex::ExperimentConfig cfg;
  if (!f.config.empty())
    cfg = ex::load_config(f.config, command);
  else
    cfg.command = command;
  if (f.seed) cfg.seed = f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.population) cfg.population = f.population;
  if (f.iterations) cfg.iterations = f.iterations;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.algorithms.empty()) cfg.algorithms = f.algorithms;
  if (!f.functions.empty()) {
    cfg.functions.clear();
    for (const auto& s : f.functions) cfg.functions.push_back(windplan::bench::parse_id(s));
  }
  if (!f.scenario.empty()) cfg.scenario_path = f.scenario;
  if (f.no_figures) cfg.figures = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAWDO / wind-driven optimization experiments"};
  app.require_subcommand(1);

  Flags bench_flags, ablation_flags, plan_flags;
  auto* bench = app.add_subcommand("bench", "compare algorithms on F1..F16");
  add_common(bench, bench_flags);
  bench->add_option("--functions", bench_flags.functions, "function ids, e.g. F1,F7")->delimiter(',');

  auto* ablation = app.add_subcommand("ablation", "MAWDO-1..4 presets against full MAWDO");
  add_common(ablation, ablation_flags);
  ablation->add_option("--functions", ablation_flags.functions, "function ids, e.g. F14")->delimiter(',');

  auto* plan = app.add_subcommand("plan", "dynamic-obstacle path planning");
  add_common(plan, plan_flags);
  plan->add_option("--scenario", plan_flags.scenario, "scenario JSON (default: built-in world)");

  CLI11_PARSE(app, argc, argv);

  try {
    ex::ExperimentConfig cfg;
    if (bench->parsed())
      cfg = build_config(ex::Command::bench, bench_flags);
    else if (ablation->parsed())
      cfg = build_config(ex::Command::ablation, ablation_flags);
    else
      cfg = build_config(ex::Command::plan, plan_flags);
    return ex::dispatch(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
