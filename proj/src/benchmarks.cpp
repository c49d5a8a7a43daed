#include "windplan/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace windplan::bench {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<std::array<double, 4>, 10> kShekelA{{{4, 4, 4, 4},
                                                          {1, 1, 1, 1},
                                                          {8, 8, 8, 8},
                                                          {6, 6, 6, 6},
                                                          {3, 7, 3, 7},
                                                          {2, 9, 2, 9},
                                                          {5, 5, 3, 3},
                                                          {8, 1, 8, 1},
                                                          {6, 2, 6, 2},
                                                          {7, 3.6, 7, 3.6}}};
constexpr std::array<double, 10> kShekelC{0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};

constexpr std::array<std::array<double, 6>, 4> kHartmannA{{{10, 3, 17, 3.5, 1.7, 8},
                                                           {0.05, 10, 17, 0.1, 8, 14},
                                                           {3, 3.5, 1.7, 10, 17, 8},
                                                           {17, 8, 0.05, 10, 0.1, 14}}};
constexpr std::array<std::array<double, 6>, 4> kHartmannP{{{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                                           {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                                           {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                                           {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}}};
constexpr std::array<double, 4> kHartmannC{1.0, 1.2, 3.0, 3.2};

constexpr PenaltyParams kPenaltyF9{5.0, 100.0, 4.0};
constexpr PenaltyParams kPenaltyF10{10.0, 100.0, 4.0};

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double schwefel_2_22(std::span<const double> x) {
  double s = 0.0;
  double p = 1.0;
  for (double v : x) {
    s += std::abs(v);
    p *= std::abs(v);
  }
  return s + p;
}

double schwefel_1_2(std::span<const double> x) {
  double s = 0.0;
  double prefix = 0.0;
  for (double v : x) {
    prefix += v;
    s += prefix * prefix;
  }
  return s;
}

double schwefel_2_21(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

// One noise draw per evaluation.
double quartic_noise(std::span<const double> x, Rng& noise) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v2 = x[i] * x[i];
    s += static_cast<double>(i + 1) * v2 * v2;
  }
  return s + noise.uniform();
}

double rastrigin(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * kPi * v) + 10.0;
  return s;
}

double difference_sum(std::span<const double> x) {
  double s = 0.0;
  double prev = 0.0;
  for (double v : x) {
    const double d = v - prev;
    s += std::abs(d) + 0.2 * d * d;
    prev = v;
  }
  return s;
}

double penalized_y(double x) { return 1.0 + (x + 1.0) / 4.0; }

double penalized_9(std::span<const double> x) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double yi = penalized_y(x[i]);
    const double yn = penalized_y(x[i + 1]);
    const double s1 = std::sin(kPi * yi);
    const double s2 = std::sin(kPi * yn);
    s += 10.0 * s1 * s1 + (yi - 1.0) * (yi - 1.0) * (1.0 + 10.0 * s2 * s2);
  }
  const double ylast = penalized_y(x[n - 1]);
  s += (ylast - 1.0) * (ylast - 1.0);
  for (double v : x) s += penalty(v, kPenaltyF9);
  return s;
}

double penalized_10(std::span<const double> x) {
  const std::size_t n = x.size();
  const double s0 = std::sin(kPi * penalized_y(x[0]));
  double s = 10.0 * s0 * s0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double yi = penalized_y(x[i]);
    const double s2 = std::sin(kPi * penalized_y(x[i + 1]));
    s += (yi - 1.0) * (yi - 1.0) * (1.0 + 10.0 * s2 * s2);
  }
  const double ylast = penalized_y(x[n - 1]);
  s += (ylast - 1.0) * (ylast - 1.0);
  s *= kPi / static_cast<double>(n);
  for (double v : x) s += penalty(v, kPenaltyF10);
  return s;
}

double alpine(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
  return s;
}

double six_hump_camel(std::span<const double> x) {
  const double a = x[0];
  const double b = x[1];
  const double a2 = a * a;
  const double b2 = b * b;
  return 4.0 * a2 - 2.1 * a2 * a2 + a2 * a2 * a2 / 3.0 + a * b - 4.0 * b2 + 4.0 * b2 * b2;
}

double hartmann6(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      const double d = x[j] - kHartmannP[i][j];
      inner += kHartmannA[i][j] * d * d;
    }
    s -= kHartmannC[i] * std::exp(-inner);
  }
  return s;
}

double shekel(std::span<const double> x, std::size_t terms) {
  double s = 0.0;
  for (std::size_t i = 0; i < terms; ++i) {
    double dist = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = x[j] - kShekelA[i][j];
      dist += d * d;
    }
    s -= 1.0 / (dist + kShekelC[i]);
  }
  return s;
}

std::vector<BenchmarkSpec> build_suite() {
  auto make = [](int id, std::string name, std::size_t dim, double lo, double hi, double fmin, Kind kind,
                 std::optional<Vec> argmin) {
    BenchmarkSpec s;
    s.id = id;
    s.name = std::move(name);
    s.dim = dim;
    s.bounds = Bounds::uniform(dim, lo, hi);
    s.known_min = fmin;
    s.kind = kind;
    s.argmin = std::move(argmin);
    s.noisy = id == 6;
    return s;
  };
  const auto u = Kind::unimodal;
  const auto m = Kind::multimodal;
  std::vector<BenchmarkSpec> v;
  v.push_back(make(1, "sphere", 30, -100, 100, 0.0, u, Vec(30, 0.0)));
  v.push_back(make(2, "schwefel_2_22", 30, -100, 100, 0.0, u, Vec(30, 0.0)));
  v.push_back(make(3, "schwefel_1_2", 30, -100, 100, 0.0, u, Vec(30, 0.0)));
  v.push_back(make(4, "schwefel_2_21", 30, -100, 100, 0.0, u, Vec(30, 0.0)));
  v.push_back(make(5, "rosenbrock", 30, -30, 30, 0.0, u, Vec(30, 1.0)));
  v.push_back(make(6, "quartic_noise", 30, -1.28, 1.28, 0.0, u, Vec(30, 0.0)));
  v.push_back(make(7, "rastrigin", 30, -100, 100, 0.0, m, Vec(30, 0.0)));
  v.push_back(make(8, "difference_sum", 30, -100, 100, 0.0, m, Vec(30, 0.0)));
  v.push_back(make(9, "penalized_9", 30, -50, 50, 0.0, m, Vec(30, -1.0)));
  v.push_back(make(10, "penalized_10", 30, -50, 50, 0.0, m, Vec(30, -1.0)));
  v.push_back(make(11, "alpine", 30, -10, 10, 0.0, m, Vec(30, 0.0)));
  v.push_back(make(12, "six_hump_camel", 2, -5, 5, -1.03, m, Vec{0.08984201368301331, -0.7126564032704135}));
  v.push_back(make(13, "hartmann6", 6, 0, 1, -3.32, m,
                   Vec{0.20168951, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054}));
  v.push_back(make(14, "shekel5", 4, 0, 10, -10.15, m, Vec{4.00003715, 4.00013327, 4.00003715, 4.00013327}));
  v.push_back(make(15, "shekel7", 4, 0, 10, -10.40, m, Vec{4.00057291, 4.00068936, 3.99948971, 3.99960615}));
  v.push_back(make(16, "shekel10", 4, 0, 10, -10.54, m, Vec{4.00074671, 4.00059326, 3.99966290, 3.99950945}));
  return v;
}

}  // namespace

double penalty(double x, const PenaltyParams& p) {
  if (x > p.a) return p.k * std::pow(x - p.a, p.m);
  if (x < -p.a) return p.k * std::pow(-x - p.a, p.m);
  return 0.0;
}

const std::vector<BenchmarkSpec>& suite() {
  static const std::vector<BenchmarkSpec> specs = build_suite();
  return specs;
}

const BenchmarkSpec& spec(int id) {
  if (id < 1 || id > 16) throw std::invalid_argument("benchmark id must be F1..F16, got " + std::to_string(id));
  return suite()[static_cast<std::size_t>(id - 1)];
}

int parse_id(std::string_view text) {
  int id = 0;
  if (text.size() >= 2 && (text[0] == 'F' || text[0] == 'f')) {
    const auto digits = text.substr(1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && id >= 1 && id <= 16) return id;
  }
  throw std::invalid_argument("unknown function '" + std::string(text) + "'; valid ids are F1..F16");
}

std::string id_name(int id) { return "F" + std::to_string(id); }

double evaluate(int id, std::span<const double> x, Rng* noise) {
  const auto& s = spec(id);
  if (x.size() != s.dim)
    throw std::invalid_argument(id_name(id) + ": expected dimension " + std::to_string(s.dim) + ", got " +
                                std::to_string(x.size()));
  switch (id) {
    case 1: return sphere(x);
    case 2: return schwefel_2_22(x);
    case 3: return schwefel_1_2(x);
    case 4: return schwefel_2_21(x);
    case 5: return rosenbrock(x);
    case 6:
      if (noise == nullptr) throw std::invalid_argument("F6 needs a noise stream");
      return quartic_noise(x, *noise);
    case 7: return rastrigin(x);
    case 8: return difference_sum(x);
    case 9: return penalized_9(x);
    case 10: return penalized_10(x);
    case 11: return alpine(x);
    case 12: return six_hump_camel(x);
    case 13: return hartmann6(x);
    case 14: return shekel(x, 5);
    case 15: return shekel(x, 7);
    case 16: return shekel(x, 10);
    default: break;
  }
  throw std::invalid_argument("unreachable benchmark id");
}

Objective make_objective(int id, std::uint64_t noise_seed) {
  spec(id);
  if (id != 6) return [id](std::span<const double> x) { return evaluate(id, x); };
  auto stream = std::make_shared<Rng>(Rng(noise_seed).split(6));
  return [stream](std::span<const double> x) { return evaluate(6, x, stream.get()); };
}

}  // namespace windplan::bench
