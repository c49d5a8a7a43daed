// Acceptance checks: one PASS/FAIL line per criterion. Exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "windplan/benchmarks.hpp"
#include "windplan/experiment.hpp"
#include "windplan/stats.hpp"

using namespace windplan;
namespace ex = windplan::experiment;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMaster = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> finals(const std::string& alg, int fid, std::size_t runs, std::size_t pop = 50,
                           std::size_t iters = 500) {
  const auto& spec = bench::spec(fid);
  const auto factory = ex::make_factory(alg, StrategyConfig::full());
  std::vector<double> out;
  for (std::size_t r = 0; r < runs; ++r) {
    const auto seed = ex::run_seed(kMaster, fid, r);
    auto opt = factory();
    out.push_back(optimize(*opt, bench::make_objective(fid, seed), spec.bounds, pop, iters, seed).final_best_fitness);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every regular file under a directory, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

Outcome determinism() {
  std::ostringstream log, err;
  std::size_t csv_files = 0;
  for (auto cmd : {ex::Command::bench, ex::Command::ablation, ex::Command::plan}) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      ex::ExperimentConfig cfg;
      cfg.command = cmd;
      cfg.seed = kMaster;
      cfg.runs = 3;
      if (cmd == ex::Command::plan) {
        cfg.algorithms = {"mawdo", "awdo", "wdo"};
        cfg.population = 32;
        cfg.iterations = 5;
        cfg.planner.waypoints = 8;
      } else {
        cfg.functions = {1, 6, 12, 14};
        cfg.population = 20;
        cfg.iterations = 40;
      }
      // The second pass uses more threads; the bytes must not change.
      cfg.jobs = rep == 0 ? 1 : 3;
      cfg.output_dir = fs::temp_directory_path() / ("windplan_accept_" + ex::command_name(cmd) + std::to_string(rep));
      fs::remove_all(cfg.output_dir);
      if (ex::dispatch(cfg, log, err) != 0) return {false, "run failed: " + err.str()};
      auto files = tree(cfg.output_dir);
      std::erase_if(files, [](const auto& kv) { return !kv.first.ends_with(".csv"); });
      if (rep == 0) {
        first = std::move(files);
        continue;
      }
      if (files.size() != first.size()) return {false, ex::command_name(cmd) + ": different file sets"};
      for (const auto& [name, bytes] : files)
        if (first[name] != bytes) return {false, ex::command_name(cmd) + ": " + name + " differs"};
      csv_files += files.size();
    }
  }
  return {true, fmt("%zu CSV files byte-identical across re-runs (bench, ablation, plan)", csv_files)};
}

Outcome unimodal_zero() {
  bool ok = true;
  std::string detail;
  for (const char* alg : {"mawdo", "awdo"})
    for (int fid = 1; fid <= 4; ++fid) {
      const auto v = finals(alg, fid, 10);
      const double worst = *std::max_element(v.begin(), v.end());
      ok = ok && worst <= 1e-150;
      detail += fmt("%s F%d worst %.3g; ", alg, fid, worst);
    }
  return {ok, detail + "threshold 1e-150"};
}

Outcome multimodal_escape() {
  const auto m = finals("mawdo", 7, 10);
  const auto hits = std::count_if(m.begin(), m.end(), [](double v) { return v <= 1e-8; });
  const auto w = finals("wdo", 7, 10);
  const double wdo_mean = mean(w);
  return {hits >= 9 && wdo_mean > 1.0,
          fmt("MAWDO F7 <= 1e-8 in %ld/10 runs (need 9); WDO mean %.4g (need > 1)", static_cast<long>(hits), wdo_mean)};
}

Outcome lowdim_accuracy() {
  constexpr double target = -1.0316;
  const auto m = finals("mawdo", 12, 30);
  const double mm = mean(m);
  const auto p4 = finals("mawdo-4", 12, 30);
  const double best4 = *std::min_element(p4.begin(), p4.end());
  return {std::abs(mm - target) <= 1e-2 && std::abs(best4 - target) <= 1e-2,
          fmt("MAWDO mean F12 %.6f; MAWDO-4 best %.6f; target -1.0316 +- 1e-2", mm, best4)};
}

Outcome ablation_ordering() {
  const auto& spec = bench::spec(14);
  // The table rounds the minimum to -10.15; measure against the value at the minimizer.
  const double f_star = bench::evaluate(14, *spec.argmin);
  auto error = [&](std::vector<double> v) {
    for (auto& x : v) x -= f_star;
    return v;
  };
  const auto full = error(finals("mawdo", 14, 30));
  bool ok = true;
  std::string detail = fmt("MAWDO mean err %.4g; ", mean(full));
  for (int p = 1; p <= 4; ++p) {
    const std::string name = "mawdo-" + std::to_string(p);
    const auto v = error(finals(name, 14, 30));
    const auto w = stats::wilcoxon_rank_sum(full, v);
    ok = ok && w.mark != "-";
    detail += fmt("%s mean %.4g mark %s p %.3g; ", name.c_str(), mean(v), w.mark.c_str(), w.p_value);
  }
  return {ok, detail};
}

Outcome wilcoxon_correctness() {
  // Every arrangement of the pooled ranks 1..n+m into the two samples.
  auto for_each_split = [](std::size_t n, std::size_t m, const auto& f) {
    const std::size_t N = n + m;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n) continue;
      std::vector<double> a, b;
      for (std::size_t r = 0; r < N; ++r) ((mask >> r & 1u) ? a : b).push_back(static_cast<double>(r + 1));
      f(a, b);
    }
  };
  double worst_exact = 0.0;
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t m = 1; m <= 6; ++m)
      for_each_split(n, m, [&](const auto& a, const auto& b) {
        worst_exact = std::max(worst_exact, std::abs(stats::wilcoxon_rank_sum(a, b).p_value -
                                                     oracle::brute_force_ranksum_p(a, b)));
        ++cases;
      });
  double worst_normal = 0.0;
  for (std::size_t n = 5; n <= 8; ++n)
    for (std::size_t m = 5; m <= 8; ++m)
      for_each_split(n, m, [&](const auto& a, const auto& b) {
        worst_normal = std::max(worst_normal, std::abs(stats::wilcoxon_rank_sum(a, b).p_value -
                                                       stats::wilcoxon_rank_sum_normal(a, b).p_value));
      });
  return {worst_exact <= 1e-12 && worst_normal <= 0.03,
          fmt("exact vs brute force: %zu arrangements, max |dp| %.3g; normal vs exact (5 <= n,m <= 8): max |dp| %.4f",
              cases, worst_exact, worst_normal)};
}

Outcome benchmark_transcription() {
  Rng rng(7);
  std::size_t bad = 0, total = 0;
  double worst = 0.0;
  for (const auto& s : bench::suite()) {
    for (int i = 0; i < 1000; ++i) {
      Vec x(s.dim);
      for (std::size_t d = 0; d < s.dim; ++d) x[d] = rng.uniform(s.bounds.lower(d), s.bounds.upper(d));
      double mine;
      if (s.noisy) {
        Rng noise(static_cast<std::uint64_t>(i)), replay(static_cast<std::uint64_t>(i));
        mine = bench::evaluate(s.id, x, &noise) - replay.uniform();
      } else {
        mine = bench::evaluate(s.id, x);
      }
      const double ref = oracle::f(s.id, x);
      const double rel = std::abs(mine - ref) / std::max({1.0, std::abs(mine), std::abs(ref)});
      worst = std::max(worst, rel);
      bad += rel > 1e-9;
      ++total;
    }
  }
  const bool zeros = bench::evaluate(1, Vec(30, 0.0)) == 0.0 && bench::evaluate(5, Vec(30, 1.0)) == 0.0 &&
                     bench::evaluate(7, Vec(30, 0.0)) == 0.0;
  return {bad == 0 && zeros, fmt("%zu/%zu points outside 1e-9 (max rel %.3g); F1/F5/F7 zero at minimizers: %s", bad,
                                 total, worst, zeros ? "yes" : "no")};
}

Outcome geometry_oracle() {
  Rng rng(99);
  std::size_t compared = 0, mismatches = 0, skipped = 0, hits = 0;
  while (compared < 500) {
    plan::Obstacle o = rng.uniform() < 0.5
                           ? plan::Obstacle::circle({rng.uniform(20, 80), rng.uniform(20, 80)}, rng.uniform(2, 20))
                           : [&] {
                               const double x = rng.uniform(10, 70), y = rng.uniform(10, 70);
                               return plan::Obstacle::rectangle(x, y, x + rng.uniform(2, 25), y + rng.uniform(2, 25));
                             }();
    const plan::Point a{rng.uniform(0, 100), rng.uniform(0, 100)};
    const plan::Point b{rng.uniform(0, 100), rng.uniform(0, 100)};
    const double depth = oracle::penetration_depth(o, a, b);
    if (depth > 0.0 && depth < 1e-6) {
      ++skipped;
      continue;
    }
    const bool truth = depth > 0.0 || oracle::sampled_hit(o, a, b, 20000);
    const std::vector<plan::Point> seg{a, b};
    const std::vector<plan::Obstacle> obs{o};
    const bool mine = plan::count_collisions(seg, obs) == 1;
    mismatches += mine != truth;
    hits += truth;
    ++compared;
  }
  return {mismatches == 0, fmt("%zu pairs (%zu in contact, %zu grazing skipped), %zu mismatches", compared, hits,
                               skipped, mismatches)};
}

Outcome planning() {
  const auto scenario = plan::load_scenario(fs::path(WINDPLAN_SOURCE_DIR) / "scenarios" / "default.json");
  const plan::PlannerSettings settings;  // 1360 particles = 8 groups x 170, 20 waypoints
  struct Summary {
    double length = 0, smooth = 0;
    int feasible = 0;
  };
  std::map<std::string, Summary> sum;
  double ref = 0.0;
  for (const char* alg : {"mawdo", "wdo", "awdo"}) {
    const auto factory = ex::make_factory(alg, StrategyConfig::full());
    for (std::size_t r = 0; r < 10; ++r) {
      const auto res = plan::simulate_replan(scenario, factory, settings, ex::run_seed(kMaster, 0, r));
      ref = res.reference_length;
      auto& s = sum[alg];
      s.length += res.metrics.length / 10.0;
      s.smooth += res.metrics.smoothness / 10.0;
      s.feasible += res.reached && res.collisions == 0;
    }
  }
  const auto& m = sum["mawdo"];
  const bool ok = m.feasible >= 9 && m.length <= 1.35 * ref && m.length < sum["wdo"].length &&
                  m.smooth < sum["awdo"].smooth;
  return {ok, fmt("MAWDO feasible %d/10, mean length %.3f (ref %.3f, limit %.3f), smooth %.4f; WDO length %.3f; "
                  "AWDO smooth %.4f",
                  m.feasible, m.length, ref, 1.35 * ref, m.smooth, sum["wdo"].length, sum["awdo"].smooth)};
}

Outcome strategy_invariants() {
  Rng rng(10);
  std::size_t violations = 0, checks = 0;
  auto expect = [&](bool cond) {
    ++checks;
    violations += !cond;
  };
  // Opposite of the opposite is the point itself.
  for (int i = 0; i < 20000; ++i) {
    const std::size_t dim = 1 + rng.index(30);
    Vec lo(dim), hi(dim), x(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = rng.uniform(-1e3, 1e3);
      hi[d] = lo[d] + rng.uniform(1e-3, 1e3);
      x[d] = rng.uniform(lo[d], hi[d]);
    }
    const Bounds b(lo, hi);
    const auto o = opposite_candidate(x, b);
    expect(b.contains(o));
    const auto back = opposite_candidate(o, b);
    for (std::size_t d = 0; d < dim; ++d) expect(std::abs(back[d] - x[d]) <= 1e-9 * std::max(1.0, std::abs(x[d])));
  }
  // Scheduled weights sit on the simplex at every iteration.
  for (std::size_t total : {1u, 2u, 3u, 7u, 60u, 500u, 1000u})
    for (std::size_t t = 1; t <= total; ++t) {
      const auto w = scheduled_weights(t, total);
      expect(w.w1 >= 0 && w.w2 >= 0 && w.w3 >= 0);
      expect(std::abs(w.w1 + w.w2 + w.w3 - 1.0) <= 1e-12);
    }
  // Distance gate: zero at zero distance, saturates at w3 beyond d_max, monotone in between.
  for (int i = 0; i < 5000; ++i) {
    const std::size_t dim = 1 + rng.index(10);
    Vec g(dim), t(dim);
    for (auto& v : g) v = rng.uniform(-50, 50);
    const double w3 = rng.uniform(0, 1);
    const GateContext ctx{rng.uniform(0.1, 200)};
    expect(distance_gate(g, g, ctx, w3) == 0.0);
    for (auto& v : t) v = rng.uniform(-50, 50);
    const double gate = distance_gate(g, t, ctx, w3);
    expect(gate >= 0.0 && gate <= w3 + 1e-15);
    Vec far = g;
    far[0] += 2.0 * ctx.d_max;
    expect(std::abs(distance_gate(g, far, ctx, w3) - w3) <= 1e-15);
    Vec near = g, nearer = g;
    near[0] += 0.5 * ctx.d_max;
    nearer[0] += 0.25 * ctx.d_max;
    expect(distance_gate(g, nearer, ctx, w3) <= distance_gate(g, near, ctx, w3));
  }
  // Reflect-damp lands in the box and never speeds a particle up.
  for (int i = 0; i < 50000; ++i) {
    const std::size_t dim = 1 + rng.index(10);
    Vec lo(dim), hi(dim), x(dim), u(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = rng.uniform(-100, 100);
      hi[d] = lo[d] + rng.uniform(0.01, 100);
      const double w = hi[d] - lo[d];
      x[d] = rng.uniform() < 0.1 ? rng.uniform(-1e6, 1e6) : rng.uniform(lo[d] - 3 * w, hi[d] + 3 * w);
      u[d] = rng.uniform(-1e3, 1e3);
    }
    const Bounds b(lo, hi);
    const double eta = rng.uniform(0.0, 0.999);
    const Vec u0 = u;
    reflect_damp(x, u, b, eta);
    expect(b.contains(x));
    for (std::size_t d = 0; d < dim; ++d) expect(std::abs(u[d]) <= std::abs(u0[d]));
  }
  return {violations == 0, fmt("%zu property checks, %zu violations (OBL involution, weight simplex, distance gate, "
                               "reflect-damp)",
                               checks, violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, determinism},           {2, unimodal_zero},           {3, multimodal_escape}, {4, lowdim_accuracy},
      {5, ablation_ordering},     {6, wilcoxon_correctness},    {7, benchmark_transcription},
      {8, geometry_oracle},       {9, planning},                {10, strategy_invariants},
  };
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %d: %s  %s  (%.1fs)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
