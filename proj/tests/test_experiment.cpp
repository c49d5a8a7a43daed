#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "windplan/experiment.hpp"

using namespace windplan;
namespace ex = windplan::experiment;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("windplan_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ex::ExperimentConfig tiny_bench(const fs::path& out) {
  ex::ExperimentConfig cfg;
  cfg.command = ex::Command::bench;
  cfg.functions = {1, 12};
  cfg.population = 10;
  cfg.iterations = 15;
  cfg.runs = 3;
  cfg.seed = 42;
  cfg.output_dir = out;
  return cfg;
}

ex::ExperimentConfig tiny_plan(const fs::path& out) {
  ex::ExperimentConfig cfg;
  cfg.command = ex::Command::plan;
  cfg.algorithms = {"mawdo", "wdo"};
  cfg.population = 16;
  cfg.iterations = 3;
  cfg.planner.waypoints = 4;
  cfg.runs = 2;
  cfg.seed = 3;
  cfg.output_dir = out;
  return cfg;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.0, 0.0}) CHECK(std::stod(ex::format_number(v)) == v);
  CHECK(ex::format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(ex::format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(ex::format_number(std::nan("")) == "nan");
}

TEST_CASE("run seeds depend on function and run only") {
  CHECK(ex::run_seed(42, 1, 0) == ex::run_seed(42, 1, 0));
  CHECK(ex::run_seed(42, 1, 0) != ex::run_seed(42, 1, 1));
  CHECK(ex::run_seed(42, 1, 0) != ex::run_seed(42, 2, 0));
  CHECK(ex::run_seed(42, 1, 0) != ex::run_seed(43, 1, 0));
}

TEST_CASE("algorithm names") {
  for (const auto& name : ex::known_algorithms()) {
    auto opt = ex::make_factory(name, StrategyConfig::full())();
    CHECK(opt->name() == name);
  }
  try {
    ex::make_factory("pso", StrategyConfig::full());
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("pso") != std::string::npos);
    for (const auto& name : ex::known_algorithms()) CHECK(msg.find(name) != std::string::npos);
  }
}

TEST_CASE("config parsing") {
  const auto j = nlohmann::json::parse(R"({"seed": 5, "runs": 4, "functions": ["F3", 7],
      "strategy": {"pgr_interval": 20}, "planner": {"waypoints": 12, "predict_motion": false},
      "scenario_path": "world.json"})");
  const auto cfg = ex::config_from_json(j, ex::Command::plan, "/base");
  CHECK(*cfg.seed == 5);
  CHECK(cfg.runs == 4);
  CHECK(cfg.functions == std::vector<int>{3, 7});
  CHECK(cfg.strategy.pgr_interval == 20);
  CHECK(cfg.planner.waypoints == 12);
  CHECK_FALSE(cfg.planner.predict_motion);
  CHECK(cfg.scenario_path == fs::path("/base/world.json"));

  CHECK_THROWS_AS(ex::config_from_json(nlohmann::json{{"sed", 1}}, ex::Command::bench), std::invalid_argument);
  CHECK_THROWS_AS(ex::config_from_json(nlohmann::json{{"planner", {{"waypoint", 3}}}}, ex::Command::plan),
                  std::invalid_argument);
  CHECK_THROWS_AS(ex::config_from_json(nlohmann::json{{"runs", "many"}}, ex::Command::bench), std::invalid_argument);
  CHECK_THROWS_AS(ex::config_from_json(nlohmann::json{{"command", "plan"}}, ex::Command::bench),
                  std::invalid_argument);
  CHECK_THROWS_AS(ex::load_config("/no/such/config.json", ex::Command::bench), std::invalid_argument);
}

TEST_CASE("defaults per command") {
  ex::ExperimentConfig cfg;
  CHECK(cfg.resolved_population() == 50);
  CHECK(cfg.resolved_iterations() == 500);
  CHECK(cfg.resolved_functions().size() == 16);
  CHECK(cfg.resolved_algorithms().front() == "mawdo");
  cfg.command = ex::Command::ablation;
  CHECK(cfg.resolved_algorithms() == std::vector<std::string>{"mawdo-1", "mawdo-2", "mawdo-3", "mawdo-4", "mawdo"});
  cfg.command = ex::Command::plan;
  CHECK(cfg.resolved_population() == 1360);
}

TEST_CASE("bench writes the table and is byte-identical on a re-run") {
  const auto d1 = scratch("bench1"), d2 = scratch("bench2");
  std::ostringstream log, err;
  REQUIRE(ex::dispatch(tiny_bench(d1), log, err) == 0);
  auto cfg2 = tiny_bench(d2);
  cfg2.jobs = 3;  // thread count must not change the numbers
  REQUIRE(ex::dispatch(cfg2, log, err) == 0);
  for (const char* f : {"summary.csv", "finals.csv", "ranksum.csv", "convergence/F1.csv", "convergence/F12.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  CHECK(fs::exists(d1 / "convergence/F1.svg"));

  const auto rows = lines(slurp(d1 / "summary.csv"));
  REQUIRE(rows.size() == 1 + 2 * 4);
  CHECK(rows[0] == "Function,Metric,mawdo,awdo,wdo,gwo,woa");
  CHECK(rows[1].rfind("F1,Best,", 0) == 0);
  CHECK(rows[4].rfind("F1,P,N/A,", 0) == 0);

  // Finals parse back to the values the summary was computed from.
  const auto finals = lines(slurp(d1 / "finals.csv"));
  CHECK(finals[0] == "Function,Algorithm,Run,Seed,Final");
  CHECK(finals.size() == 1 + 2 * 5 * 3);
  const auto cells = ex::run_bench_cells(tiny_bench(d1));
  std::istringstream first(finals[1]);
  std::string f, alg, run, seed, value;
  std::getline(first, f, ',');
  std::getline(first, alg, ',');
  std::getline(first, run, ',');
  std::getline(first, seed, ',');
  std::getline(first, value, ',');
  CHECK(std::stod(value) == cells[0].finals[0]);
  CHECK(std::stoull(seed) == cells[0].seeds[0]);
}

TEST_CASE("full MAWDO is the rank-sum reference wherever it sits") {
  CHECK(ex::reference_index({"mawdo", "awdo"}) == 0);
  CHECK(ex::reference_index({"mawdo-1", "mawdo-2", "mawdo"}) == 2);
  CHECK(ex::reference_index({"gwo", "woa"}) == 0);

  const auto d = scratch("ablation");
  ex::ExperimentConfig cfg;
  cfg.command = ex::Command::ablation;
  cfg.functions = {14};
  cfg.population = 10;
  cfg.iterations = 10;
  cfg.runs = 3;
  cfg.seed = 1;
  cfg.output_dir = d;
  std::ostringstream log, err;
  REQUIRE(ex::dispatch(cfg, log, err) == 0);
  const auto rows = lines(slurp(d / "summary.csv"));
  CHECK(rows[0] == "Function,Metric,mawdo-1,mawdo-2,mawdo-3,mawdo-4,mawdo");
  CHECK(rows[4].size() > 4);
  CHECK(rows[4].substr(rows[4].size() - 4) == ",N/A");
  const auto rs = lines(slurp(d / "ranksum.csv"));
  REQUIRE(rs.size() == 5);
  CHECK(rs[1].rfind("F14,mawdo,mawdo-1,", 0) == 0);
}

TEST_CASE("configuration mistakes exit with status 2") {
  std::ostringstream log, err;
  auto cfg = tiny_bench(scratch("bad"));
  cfg.algorithms = {"mawdo", "nope"};
  CHECK(ex::dispatch(cfg, log, err) == 2);
  CHECK(err.str().find("nope") != std::string::npos);
  CHECK(err.str().find("gwo") != std::string::npos);

  cfg = tiny_bench(scratch("bad"));
  cfg.seed.reset();
  CHECK(ex::dispatch(cfg, log, err) == 2);

  auto p = tiny_plan(scratch("bad"));
  p.scenario_path = "/no/such/scenario.json";
  CHECK(ex::dispatch(p, log, err) == 2);
}

TEST_CASE("plan writes metrics, trajectories and eight snapshots") {
  const auto d1 = scratch("plan1"), d2 = scratch("plan2");
  std::ostringstream log, err;
  REQUIRE(ex::dispatch(tiny_plan(d1), log, err) == 0);
  REQUIRE(ex::dispatch(tiny_plan(d2), log, err) == 0);

  const auto m = lines(slurp(d1 / "metrics.csv"));
  REQUIRE(m.size() == 3);
  CHECK(m[0] == "Algorithm,Length,Optimality Gap,Smooth");
  CHECK(m[1].rfind("mawdo,", 0) == 0);
  for (const char* f : {"metrics.csv", "runs.csv", "reference.csv", "trajectories/mawdo_run0.csv",
                        "trajectories/wdo_run1.csv"}) {
    INFO(f);
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  const auto traj = lines(slurp(d1 / "trajectories/mawdo_run0.csv"));
  CHECK(traj[0] == "timestep,x,y");
  CHECK(traj[1] == "0,10,10");
  for (int k = 1; k <= 8; ++k) CHECK(fs::exists(d1 / "snapshots" / "mawdo" / ("frame_" + std::to_string(k) + ".svg")));
  CHECK_FALSE(fs::exists(d1 / "snapshots" / "mawdo" / "frame_9.svg"));
  CHECK(fs::exists(d1 / "plan_convergence.svg"));
  CHECK(slurp(d1 / "snapshots/mawdo/frame_1.svg").find("<svg") != std::string::npos);
}
