#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "windplan/core.hpp"

namespace windplan::bench {

enum class Kind { unimodal, multimodal };

struct BenchmarkSpec {
  int id = 1;  // 1..16
  std::string name;
  std::size_t dim = 0;
  Bounds bounds = Bounds::uniform(1, 0.0, 1.0);
  double known_min = 0.0;
  Kind kind = Kind::unimodal;
  std::optional<Vec> argmin;  // a known minimizer, when one is tabulated
  bool noisy = false;         // F6 draws from a caller stream
};

// Parameters of the boundary penalty u(x; a, k, m) used by F9/F10.
struct PenaltyParams {
  double a = 10.0;
  double k = 100.0;
  double m = 4.0;
};

double penalty(double x, const PenaltyParams& p);

// All 16 specs, F1..F16.
const std::vector<BenchmarkSpec>& suite();

const BenchmarkSpec& spec(int id);

// "F7" / "f7" -> 7. Throws on anything else.
int parse_id(std::string_view text);
std::string id_name(int id);

// Evaluates function `id` at x. `noise` is required for F6 only.
double evaluate(int id, std::span<const double> x, Rng* noise = nullptr);

// Objective closure bound to one function and, for F6, its own noise stream.
Objective make_objective(int id, std::uint64_t noise_seed = 0);

}  // namespace windplan::bench
