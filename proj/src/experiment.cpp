#include "windplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "windplan/baselines.hpp"
#include "windplan/benchmarks.hpp"
#include "windplan/figures.hpp"
#include "windplan/stats.hpp"

namespace windplan::experiment {

namespace fs = std::filesystem;

std::string command_name(Command c) {
  switch (c) {
    case Command::bench: return "bench";
    case Command::ablation: return "ablation";
    case Command::plan: return "plan";
  }
  return "?";
}

Command parse_command(const std::string& s) {
  if (s == "bench") return Command::bench;
  if (s == "ablation") return Command::ablation;
  if (s == "plan") return Command::plan;
  throw std::invalid_argument("unknown command '" + s + "'; valid commands are bench, ablation, plan");
}

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"mawdo",   "awdo",    "wdo",     "gwo",    "woa",
                                              "mawdo-1", "mawdo-2", "mawdo-3", "mawdo-4"};
  return names;
}

namespace {

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

OptimizerFactory make_factory(const std::string& name, const StrategyConfig& strategy) {
  if (name == "mawdo") {
    strategy.validate();
    return [strategy] { return std::make_unique<MawdoOptimizer>(strategy, "mawdo"); };
  }
  if (name == "awdo") return [] { return std::make_unique<AwdoOptimizer>(); };
  if (name == "wdo") return [] { return std::make_unique<WdoOptimizer>(); };
  if (name == "gwo") return [] { return std::make_unique<GwoOptimizer>(); };
  if (name == "woa") return [] { return std::make_unique<WoaOptimizer>(); };
  if (name.size() == 7 && name.starts_with("mawdo-") && name[6] >= '1' && name[6] <= '4') {
    const auto preset = StrategyConfig::preset(name[6] - '0');
    return [preset, name] { return std::make_unique<MawdoOptimizer>(preset, name); };
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'; valid algorithms are " + joined(known_algorithms()));
}

std::uint64_t run_seed(std::uint64_t master, int function_id, std::size_t run) {
  return Rng(master).split(static_cast<std::uint64_t>(function_id) * 100000u + run).seed();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- configuration ---------------------------------------------------------

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (population && *population < 1) throw std::invalid_argument("population must be >= 1");
  if (iterations && *iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  strategy.validate();
  for (const auto& a : resolved_algorithms()) make_factory(a, strategy);
  for (int f : resolved_functions()) bench::spec(f);
  if (command == Command::plan) {
    if (!scenario_path.empty() && !fs::exists(scenario_path))
      throw std::invalid_argument("scenario file not found: " + scenario_path.string());
    if (planner.waypoints < 1) throw std::invalid_argument("planner.waypoints must be >= 1");
    if (!(planner.step_distance > 0.0)) throw std::invalid_argument("planner.step_distance must be positive");
  }
}

std::vector<std::string> ExperimentConfig::resolved_algorithms() const {
  if (!algorithms.empty()) return algorithms;
  if (command == Command::ablation) return {"mawdo-1", "mawdo-2", "mawdo-3", "mawdo-4", "mawdo"};
  return {"mawdo", "awdo", "wdo", "gwo", "woa"};
}

std::vector<int> ExperimentConfig::resolved_functions() const {
  if (!functions.empty()) return functions;
  std::vector<int> all(16);
  for (int i = 0; i < 16; ++i) all[static_cast<std::size_t>(i)] = i + 1;
  return all;
}

std::size_t ExperimentConfig::resolved_population() const {
  if (population) return *population;
  return command == Command::plan ? plan::PlannerSettings{}.population : 50;
}

std::size_t ExperimentConfig::resolved_iterations() const {
  if (iterations) return *iterations;
  return command == Command::plan ? plan::PlannerSettings{}.iterations : 500;
}

namespace {

int function_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return bench::spec(v.get<int>()).id;
  return bench::parse_id(v.get<std::string>());
}

void planner_from_json(const nlohmann::json& j, plan::PlannerSettings& p) {
  static const std::vector<std::string> known{"waypoints",    "step_distance", "goal_tolerance", "horizon_steps",
                                              "warm_start",   "warm_spread",   "warm_jitter",    "clearance",
                                              "search_radius", "vmax_fraction", "predict_motion", "forecast_steps"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw std::invalid_argument("unknown planner field '" + item.key() + "'");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("waypoints", p.waypoints);
  get("step_distance", p.step_distance);
  get("goal_tolerance", p.goal_tolerance);
  get("horizon_steps", p.horizon_steps);
  get("warm_start", p.warm_start);
  get("warm_spread", p.warm_spread);
  get("warm_jitter", p.warm_jitter);
  get("clearance", p.clearance);
  get("search_radius", p.search_radius);
  get("vmax_fraction", p.vmax_fraction);
  get("predict_motion", p.predict_motion);
  get("forecast_steps", p.forecast_steps);
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, Command command, const fs::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::vector<std::string> known{"command",    "algorithms", "functions", "scenario_path",
                                              "population", "iterations", "runs",      "seed",
                                              "output_dir", "strategy",   "planner",   "jobs",
                                              "alpha",      "figures"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw std::invalid_argument("unknown config field '" + item.key() + "'");

  ExperimentConfig cfg;
  cfg.command = command;
  try {
    if (j.contains("command") && parse_command(j["command"].get<std::string>()) != command)
      throw std::invalid_argument("config is for command '" + j["command"].get<std::string>() + "', not '" +
                                  command_name(command) + "'");
    if (j.contains("algorithms")) cfg.algorithms = j["algorithms"].get<std::vector<std::string>>();
    if (j.contains("functions"))
      for (const auto& f : j["functions"]) cfg.functions.push_back(function_from_json(f));
    if (j.contains("scenario_path")) {
      fs::path p = j["scenario_path"].get<std::string>();
      cfg.scenario_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("population")) cfg.population = j["population"].get<std::size_t>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<std::size_t>();
    if (j.contains("runs")) cfg.runs = j["runs"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("strategy")) from_json(j["strategy"], cfg.strategy);
    if (j.contains("planner")) planner_from_json(j["planner"], cfg.planner);
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<std::size_t>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("figures")) cfg.figures = j["figures"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, Command command) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cannot parse config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j, command, path.parent_path());
}

// ---- execution -------------------------------------------------------------

namespace {

// Runs task(i) for i in [0, n) on up to `jobs` threads. Every task writes to
// its own slot, so the result does not depend on scheduling. The first
// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(jobs, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

template <class F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

}  // namespace

std::vector<BenchCell> run_bench_cells(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw std::invalid_argument("a seed is required");
  const auto algs = cfg.resolved_algorithms();
  const auto funcs = cfg.resolved_functions();
  const std::size_t pop = cfg.resolved_population();
  const std::size_t iters = cfg.resolved_iterations();

  std::vector<OptimizerFactory> factories;
  for (const auto& a : algs) factories.push_back(make_factory(a, cfg.strategy));

  std::vector<BenchCell> cells;
  for (int f : funcs)
    for (const auto& a : algs) {
      BenchCell c;
      c.algorithm = a;
      c.function = f;
      c.finals.resize(cfg.runs);
      c.seeds.resize(cfg.runs);
      cells.push_back(std::move(c));
    }

  std::vector<std::vector<double>> traces(cells.size() * cfg.runs);
  parallel_for(cells.size() * cfg.runs, cfg.jobs, [&](std::size_t task) {
    const std::size_t ci = task / cfg.runs;
    const std::size_t r = task % cfg.runs;
    auto& cell = cells[ci];
    const auto& spec = bench::spec(cell.function);
    const std::uint64_t seed = run_seed(*cfg.seed, cell.function, r);
    auto optimizer = factories[ci % algs.size()]();
    const auto record = optimize(*optimizer, bench::make_objective(cell.function, seed), spec.bounds, pop, iters, seed);
    cell.finals[r] = record.final_best_fitness;
    cell.seeds[r] = seed;
    traces[task] = record.trace;
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    auto& mean = cells[ci].mean_trace;
    mean.assign(iters, 0.0);
    for (std::size_t r = 0; r < cfg.runs; ++r)
      for (std::size_t t = 0; t < iters; ++t) mean[t] += traces[ci * cfg.runs + r][t];
    for (double& v : mean) v /= static_cast<double>(cfg.runs);
  }
  return cells;
}

std::size_t reference_index(const std::vector<std::string>& algs) {
  const auto it = std::find(algs.begin(), algs.end(), "mawdo");
  return it == algs.end() ? 0 : static_cast<std::size_t>(it - algs.begin());
}

void write_summary_csv(std::ostream& out, const std::vector<BenchCell>& cells, const std::vector<std::string>& algs,
                       double alpha) {
  out << "Function,Metric";
  for (const auto& a : algs) out << ',' << a;
  out << '\n';

  std::vector<int> funcs;
  for (const auto& c : cells)
    if (std::find(funcs.begin(), funcs.end(), c.function) == funcs.end()) funcs.push_back(c.function);

  for (int f : funcs) {
    std::vector<const BenchCell*> row;
    for (const auto& a : algs) {
      const auto it = std::find_if(cells.begin(), cells.end(),
                                   [&](const BenchCell& c) { return c.function == f && c.algorithm == a; });
      if (it == cells.end()) throw std::invalid_argument("summary: missing cell for " + a);
      row.push_back(&*it);
    }
    const bool single = row.front()->finals.size() < 2;
    std::vector<stats::StatsSummary> sums;
    for (const auto* c : row) {
      if (single) {
        stats::StatsSummary s;
        s.best = s.mean = c->finals.front();
        s.std = 0.0;
        s.n_runs = 1;
        sums.push_back(s);
      } else {
        sums.push_back(stats::summarize(c->finals));
      }
    }
    const std::string id = bench::id_name(f);
    out << id << ",Best";
    for (const auto& s : sums) out << ',' << format_number(s.best);
    out << '\n' << id << ",Ave";
    for (const auto& s : sums) out << ',' << format_number(s.mean);
    out << '\n' << id << ",Std";
    for (const auto& s : sums) out << ',' << format_number(s.std);
    out << '\n' << id << ",P";
    const std::size_t ref = reference_index(algs);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == ref) {
        out << ",N/A";
        continue;
      }
      out << ',' << stats::wilcoxon_rank_sum(row[ref]->finals, row[i]->finals, alpha).mark;
    }
    out << '\n';
  }
}

void write_finals_csv(std::ostream& out, const std::vector<BenchCell>& cells) {
  out << "Function,Algorithm,Run,Seed,Final\n";
  for (const auto& c : cells)
    for (std::size_t r = 0; r < c.finals.size(); ++r)
      out << bench::id_name(c.function) << ',' << c.algorithm << ',' << r << ',' << c.seeds[r] << ','
          << format_number(c.finals[r]) << '\n';
}

namespace {

fs::path resolve_output(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("WINDPLAN_OUT"); env != nullptr && *env != '\0') return env;
  return "results";
}

int table_experiment(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    cfg.validate();
    if (!cfg.seed) throw std::invalid_argument("a seed is required (--seed or \"seed\" in the config)");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const fs::path out = resolve_output(cfg);
  const auto algs = cfg.resolved_algorithms();
  try {
    log << command_name(cfg.command) << ": " << cfg.resolved_functions().size() << " functions x " << algs.size()
        << " algorithms x " << cfg.runs << " runs -> " << out.string() << '\n';
    const auto cells = run_bench_cells(cfg);

    write_file(out / "summary.csv", render([&](std::ostream& os) { write_summary_csv(os, cells, algs, cfg.alpha); }));
    write_file(out / "finals.csv", render([&](std::ostream& os) { write_finals_csv(os, cells); }));

    // Rank-sum details behind the P row.
    write_file(out / "ranksum.csv", render([&](std::ostream& os) {
                 os << "Function,Reference,Algorithm,U,P,Mark,Exact\n";
                 const std::size_t r = reference_index(algs);
                 for (std::size_t i = 0; i < cells.size(); i += algs.size()) {
                   const auto& ref = cells[i + r];
                   for (std::size_t k = 0; k < algs.size(); ++k) {
                     if (k == r) continue;
                     const auto& other = cells[i + k];
                     if (ref.finals.size() < 2) continue;
                     const auto w = stats::wilcoxon_rank_sum(ref.finals, other.finals, cfg.alpha);
                     os << bench::id_name(ref.function) << ',' << ref.algorithm << ',' << other.algorithm << ','
                        << format_number(w.u_statistic) << ',' << format_number(w.p_value) << ',' << w.mark << ','
                        << (w.exact ? 1 : 0) << '\n';
                   }
                 }
               }));

    for (std::size_t i = 0; i < cells.size(); i += algs.size()) {
      const int f = cells[i].function;
      const std::string id = bench::id_name(f);
      write_file(out / "convergence" / (id + ".csv"), render([&](std::ostream& os) {
                   os << "Iteration";
                   for (const auto& a : algs) os << ',' << a;
                   os << '\n';
                   for (std::size_t t = 0; t < cells[i].mean_trace.size(); ++t) {
                     os << t + 1;
                     for (std::size_t k = 0; k < algs.size(); ++k) os << ',' << format_number(cells[i + k].mean_trace[t]);
                     os << '\n';
                   }
                 }));
      if (!cfg.figures) continue;
      std::vector<figures::Series> series;
      bool positive = true;
      for (std::size_t k = 0; k < algs.size(); ++k) {
        series.push_back({algs[k], cells[i + k].mean_trace});
        for (double v : cells[i + k].mean_trace) positive = positive && v > 0.0;
      }
      write_file(out / "convergence" / (id + ".svg"), render([&](std::ostream& os) {
                   figures::convergence_svg(os, id + " mean best-so-far", series, positive);
                 }));
    }
    log << "wrote " << (out / "summary.csv").string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int run_bench(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  if (cfg.command != Command::bench) {
    err << "error: config is not a bench config\n";
    return 2;
  }
  return table_experiment(cfg, log, err);
}

int run_ablation(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  if (cfg.command != Command::ablation) {
    err << "error: config is not an ablation config\n";
    return 2;
  }
  return table_experiment(cfg, log, err);
}

int run_plan(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  plan::ScenarioState scenario;
  std::vector<std::string> algs;
  try {
    if (cfg.command != Command::plan) throw std::invalid_argument("config is not a plan config");
    cfg.validate();
    if (!cfg.seed) throw std::invalid_argument("a seed is required (--seed or \"seed\" in the config)");
    scenario = cfg.scenario_path.empty() ? plan::default_scenario() : plan::load_scenario(cfg.scenario_path);
    algs = cfg.resolved_algorithms();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const fs::path out = resolve_output(cfg);
  plan::PlannerSettings settings = cfg.planner;
  settings.population = cfg.resolved_population();
  settings.iterations = cfg.resolved_iterations();

  try {
    log << "plan: " << algs.size() << " algorithms x " << cfg.runs << " runs, " << settings.population
        << " particles, " << settings.iterations << " iterations per replan -> " << out.string() << '\n';
    std::vector<OptimizerFactory> factories;
    for (const auto& a : algs) factories.push_back(make_factory(a, cfg.strategy));

    std::vector<plan::SimulationResult> results(algs.size() * cfg.runs);
    std::vector<std::uint64_t> seeds(cfg.runs);
    for (std::size_t r = 0; r < cfg.runs; ++r) seeds[r] = run_seed(*cfg.seed, 0, r);
    parallel_for(results.size(), cfg.jobs, [&](std::size_t task) {
      const std::size_t ai = task / cfg.runs;
      const std::size_t r = task % cfg.runs;
      results[task] = plan::simulate_replan(scenario, factories[ai], settings, seeds[r]);
    });

    std::ostringstream metrics_csv;
    std::ostringstream runs_csv;
    metrics_csv << "Algorithm,Length,Optimality Gap,Smooth\n";
    runs_csv << "Algorithm,Run,Seed,Reached,Collisions,Length,Optimality Gap,Smooth,Steps\n";
    std::vector<figures::Series> convergence;

    for (std::size_t ai = 0; ai < algs.size(); ++ai) {
      const auto& alg = algs[ai];
      double length = 0.0, gap = 0.0, smooth = 0.0;
      std::size_t best = 0;
      auto rank = [&](const plan::SimulationResult& s) {
        // Feasible runs first, then shorter.
        return std::pair{!(s.reached && s.collisions == 0), s.metrics.length};
      };
      std::vector<double> trace;
      for (std::size_t r = 0; r < cfg.runs; ++r) {
        const auto& s = results[ai * cfg.runs + r];
        length += s.metrics.length;
        gap += s.metrics.optimality_gap;
        smooth += s.metrics.smoothness;
        if (rank(s) < rank(results[ai * cfg.runs + best])) best = r;
        runs_csv << alg << ',' << r << ',' << seeds[r] << ',' << (s.reached ? 1 : 0) << ',' << s.collisions << ','
                 << format_number(s.metrics.length) << ',' << format_number(s.metrics.optimality_gap) << ','
                 << format_number(s.metrics.smoothness) << ',' << s.planned_paths.size() << '\n';

        write_file(out / "trajectories" / (alg + "_run" + std::to_string(r) + ".csv"),
                   render([&](std::ostream& os) {
                     os << "timestep,x,y\n";
                     for (std::size_t i = 0; i < s.trajectory.size(); ++i)
                       os << s.trajectory_timesteps[i] << ',' << format_number(s.trajectory[i].x) << ','
                          << format_number(s.trajectory[i].y) << '\n';
                   }));
        if (trace.empty())
          trace.assign(s.first_plan_trace.size(), 0.0);
        for (std::size_t t = 0; t < trace.size() && t < s.first_plan_trace.size(); ++t)
          trace[t] += s.first_plan_trace[t] / static_cast<double>(cfg.runs);
      }
      const double n = static_cast<double>(cfg.runs);
      metrics_csv << alg << ',' << format_number(length / n) << ',' << format_number(gap / n) << ','
                  << format_number(smooth / n) << '\n';
      convergence.push_back({alg, trace});

      if (!cfg.figures) continue;
      const auto& s = results[ai * cfg.runs + best];
      const std::size_t frames = s.obstacle_history.size();
      for (std::size_t k = 0; k < 8 && frames > 0; ++k) {
        const std::size_t idx = static_cast<std::size_t>(std::lround(static_cast<double>(k) *
                                                                     static_cast<double>(frames - 1) / 7.0));
        std::vector<plan::Point> travelled;
        for (std::size_t i = 0; i < s.trajectory.size(); ++i)
          if (s.trajectory_timesteps[i] <= idx) travelled.push_back(s.trajectory[i]);
        const std::vector<plan::Point> planned =
            idx < s.planned_paths.size() ? s.planned_paths[idx] : std::vector<plan::Point>{};
        write_file(out / "snapshots" / alg / ("frame_" + std::to_string(k + 1) + ".svg"),
                   render([&](std::ostream& os) {
                     figures::snapshot_svg(os, scenario.map, s.obstacle_history[idx], travelled, planned,
                                           s.robot_history[idx],
                                           alg + " run " + std::to_string(best) + ", t = " + std::to_string(idx));
                   }));
      }
    }

    write_file(out / "metrics.csv", metrics_csv.str());
    write_file(out / "runs.csv", runs_csv.str());
    write_file(out / "reference.csv", "Reference Length\n" + format_number(results.front().reference_length) + "\n");
    if (cfg.figures)
      write_file(out / "plan_convergence.svg", render([&](std::ostream& os) {
                   figures::convergence_svg(os, "first replan: mean best cost", convergence, false);
                 }));
    log << "wrote " << (out / "metrics.csv").string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int dispatch(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  switch (cfg.command) {
    case Command::bench: return run_bench(cfg, log, err);
    case Command::ablation: return run_ablation(cfg, log, err);
    case Command::plan: return run_plan(cfg, log, err);
  }
  return 2;
}

}  // namespace windplan::experiment
