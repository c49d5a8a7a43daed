#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windplan/pathplan.hpp"
#include "windplan/wdo.hpp"

namespace windplan::experiment {

enum class Command { bench, ablation, plan };

std::string command_name(Command c);
Command parse_command(const std::string& s);

struct ExperimentConfig {
  Command command = Command::bench;
  std::vector<std::string> algorithms;  // empty -> the command's default set
  std::vector<int> functions;           // empty -> F1..F16
  std::filesystem::path scenario_path;  // empty -> built-in default world
  std::optional<std::size_t> population;
  std::optional<std::size_t> iterations;
  std::size_t runs = 30;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;
  StrategyConfig strategy;
  plan::PlannerSettings planner;
  std::size_t jobs = 1;
  double alpha = 0.05;
  bool figures = true;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  std::vector<std::string> resolved_algorithms() const;
  std::vector<int> resolved_functions() const;
  std::size_t resolved_population() const;
  std::size_t resolved_iterations() const;
};

// Reads a config document. Relative scenario paths resolve against `base_dir`.
// Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, Command command,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path, Command command);

// mawdo, awdo, wdo, gwo, woa, and the ablation presets mawdo-1 .. mawdo-4.
const std::vector<std::string>& known_algorithms();
OptimizerFactory make_factory(const std::string& name, const StrategyConfig& strategy);

// Per-run seeds derived from the master seed; paired across algorithms.
std::uint64_t run_seed(std::uint64_t master, int function_id, std::size_t run);

// Shortest decimal that parses back to the same double.
std::string format_number(double v);

struct BenchCell {
  std::string algorithm;
  int function = 0;
  std::vector<double> finals;
  std::vector<std::uint64_t> seeds;
  std::vector<double> mean_trace;
};

// Runs every (function, algorithm, run) triple; results are ordered by
// function, then algorithm, independent of `jobs`.
std::vector<BenchCell> run_bench_cells(const ExperimentConfig& cfg);

// Rank-sum reference column: "mawdo" when present, otherwise the first algorithm.
std::size_t reference_index(const std::vector<std::string>& algs);

// Table layout: one block of Best/Ave/Std/P rows per function, one column per
// algorithm. The reference column shows N/A in the P row.
void write_summary_csv(std::ostream& out, const std::vector<BenchCell>& cells, const std::vector<std::string>& algs,
                       double alpha);
void write_finals_csv(std::ostream& out, const std::vector<BenchCell>& cells);

// Subcommand entry points. Return the process exit status; errors in the
// configuration are reported on `err`.
int run_bench(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int run_ablation(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);
int run_plan(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

int dispatch(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace windplan::experiment
