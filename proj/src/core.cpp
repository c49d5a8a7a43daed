#include "windplan/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace windplan {

Bounds::Bounds(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw std::invalid_argument("bounds: dimension must be positive");
  if (lower_.size() != upper_.size()) throw std::invalid_argument("bounds: lower/upper length mismatch");
  for (std::size_t d = 0; d < lower_.size(); ++d) {
    if (!(lower_[d] < upper_[d]))
      throw std::invalid_argument("bounds: lower >= upper in dimension " + std::to_string(d));
  }
}

Bounds Bounds::uniform(std::size_t dim, double lower, double upper) {
  return Bounds(Vec(dim, lower), Vec(dim, upper));
}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t d = 0; d < x.size(); ++d)
    if (x[d] < lower_[d] || x[d] > upper_[d]) return false;
  return true;
}

void Bounds::clamp(std::span<double> x) const {
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], lower_[d], upper_[d]);
}

double Bounds::diagonal() const {
  double s = 0.0;
  for (std::size_t d = 0; d < dim(); ++d) s += width(d) * width(d);
  return std::sqrt(s);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ 0x5851f42d4c957f2dULL) + stream, stream);
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

double Rng::normal(double mean, double stddev) {
  if (stddev <= 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

std::size_t Rng::index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::shuffle(p.begin(), p.end(), engine_);
  return p;
}

std::size_t SwarmState::size() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.members.size();
  return n;
}

EvaluationError::EvaluationError(std::size_t iteration, std::size_t particle, const std::string& what)
    : std::runtime_error("objective failed at iteration " + std::to_string(iteration) + ", particle " +
                         std::to_string(particle) + ": " + what),
      iteration_(iteration),
      particle_(particle) {}

double sanitize_fitness(double f) { return std::isfinite(f) ? f : kInf; }

std::vector<std::size_t> partition_sizes(std::size_t n, std::size_t groups) {
  if (groups == 0) throw std::invalid_argument("partition: group count must be positive");
  if (n < groups) throw std::invalid_argument("partition: population smaller than group count");
  std::vector<std::size_t> sizes(groups, n / groups);
  for (std::size_t g = 0; g < n % groups; ++g) ++sizes[g];
  return sizes;
}

SwarmState initialize_population(const Bounds& bounds, std::size_t n, std::size_t groups, Rng& rng,
                                 double vmax_fraction) {
  const auto sizes = partition_sizes(n, groups);
  const std::size_t dim = bounds.dim();

  SwarmState state;
  state.vmax.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) state.vmax[d] = vmax_fraction * bounds.width(d);

  state.groups.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    auto& members = state.groups[g].members;
    members.resize(sizes[g]);
    for (auto& p : members) {
      p.position.resize(dim);
      p.velocity.resize(dim);
      for (std::size_t d = 0; d < dim; ++d) p.position[d] = rng.uniform(bounds.lower(d), bounds.upper(d));
      for (std::size_t d = 0; d < dim; ++d) p.velocity[d] = rng.uniform(-state.vmax[d], state.vmax[d]);
      p.pbest_position = p.position;
    }
    state.groups[g].gbest_position = members.front().position;
  }
  state.tbest_position = state.groups.front().gbest_position;
  return state;
}

double evaluate_at(const Objective& objective, std::span<const double> x, std::size_t iteration,
                   std::size_t particle) {
  try {
    return sanitize_fitness(objective(x));
  } catch (const std::exception& e) {
    throw EvaluationError(iteration, particle, e.what());
  }
}

void evaluate_population(SwarmState& state, const Objective& objective) {
  std::size_t flat = 0;
  for (auto& g : state.groups)
    for (auto& p : g.members) p.fitness = evaluate_at(objective, p.position, state.iteration, flat++);
}

void update_bests(SwarmState& state) {
  for (auto& g : state.groups) {
    for (auto& p : g.members) {
      if (p.fitness < p.pbest_fitness) {
        p.pbest_fitness = p.fitness;
        p.pbest_position = p.position;
      }
      if (p.pbest_fitness < g.gbest_fitness) {
        g.gbest_fitness = p.pbest_fitness;
        g.gbest_position = p.pbest_position;
      }
    }
    if (g.gbest_fitness < state.tbest_fitness) {
      state.tbest_fitness = g.gbest_fitness;
      state.tbest_position = g.gbest_position;
    }
  }
}

RunRecord run(Optimizer& optimizer, const Objective& objective, const Bounds& bounds, SwarmState state,
              std::size_t iterations, std::uint64_t seed, const IterationHook& hook) {
  if (iterations == 0) throw std::invalid_argument("run: iteration count must be >= 1");
  const auto started = std::chrono::steady_clock::now();
  Rng rng = Rng(seed).split(1);

  state.iteration = 0;
  state.max_iterations = iterations;
  evaluate_population(state, objective);
  update_bests(state);
  optimizer.prepare(state, bounds, rng);

  RunRecord record;
  record.seed = seed;
  record.trace.reserve(iterations);
  for (std::size_t t = 0; t < iterations; ++t) {
    optimizer.step(state, objective, bounds, rng);
    record.trace.push_back(state.tbest_fitness);
    if (hook) hook(state.iteration, state);
  }
  record.final_best_fitness = state.tbest_fitness;
  record.final_best_position = state.tbest_position;
  record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

RunRecord optimize(Optimizer& optimizer, const Objective& objective, const Bounds& bounds,
                   std::size_t population, std::size_t iterations, std::uint64_t seed, const IterationHook& hook) {
  Rng init = Rng(seed).split(0);
  auto state = initialize_population(bounds, population, optimizer.group_count(), init);
  return run(optimizer, objective, bounds, std::move(state), iterations, seed, hook);
}

}  // namespace windplan
