#include "windplan/baselines.hpp"

#include <cmath>
#include <numbers>

namespace windplan {

double linear_control(std::size_t t, std::size_t total) {
  if (total == 0) return 0.0;
  return 2.0 * (1.0 - static_cast<double>(t) / static_cast<double>(total));
}

void GwoOptimizer::offer(std::span<const double> x, double f) {
  for (std::size_t k = 0; k < leaders_.size(); ++k) {
    if (f < leaders_[k].fitness) {
      for (std::size_t j = leaders_.size() - 1; j > k; --j) leaders_[j] = leaders_[j - 1];
      leaders_[k] = Leader{Vec(x.begin(), x.end()), f};
      return;
    }
  }
}

void GwoOptimizer::prepare(SwarmState& state, const Bounds& /*bounds*/, Rng& /*rng*/) {
  leaders_ = {};
  for (auto& g : state.groups)
    for (auto& p : g.members) {
      p.velocity.assign(p.velocity.size(), 0.0);
      offer(p.position, p.fitness);
    }
  // Tiny populations: fall back to the best wolf for missing leaders.
  for (auto& l : leaders_)
    if (l.position.empty()) l = leaders_[0];
}

void GwoOptimizer::step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) {
  const std::size_t dim = state.dim();
  const std::size_t t = state.iteration + 1;
  const double a = linear_control(t, state.max_iterations);

  for (auto& g : state.groups) {
    for (auto& p : g.members) {
      for (std::size_t d = 0; d < dim; ++d) {
        double sum = 0.0;
        for (const auto& leader : leaders_) {
          const double A = 2.0 * a * rng.uniform() - a;
          const double C = 2.0 * rng.uniform();
          const double dist = std::abs(C * leader.position[d] - p.position[d]);
          sum += leader.position[d] - A * dist;
        }
        p.position[d] = sum / 3.0;
      }
      bounds.clamp(p.position);
    }
  }
  state.iteration = t;
  evaluate_population(state, objective);
  for (const auto& g : state.groups)
    for (const auto& p : g.members) offer(p.position, p.fitness);
  update_bests(state);
}

Vec WoaOptimizer::encircle(std::span<const double> x, std::span<const double> target, double A, double C) {
  Vec out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = target[d] - A * std::abs(C * target[d] - x[d]);
  return out;
}

Vec WoaOptimizer::spiral(std::span<const double> x, std::span<const double> best, double l, double b) {
  Vec out(x.size());
  const double factor = std::exp(b * l) * std::cos(2.0 * std::numbers::pi * l);
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = std::abs(best[d] - x[d]) * factor + best[d];
  return out;
}

void WoaOptimizer::step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) {
  const std::size_t t = state.iteration + 1;
  const double a = linear_control(t, state.max_iterations);

  // Random-search targets are drawn from the positions at the start of the step.
  std::vector<Vec> start;
  for (const auto& g : state.groups)
    for (const auto& p : g.members) start.push_back(p.position);

  const Vec leader = state.tbest_position;
  for (auto& g : state.groups) {
    for (auto& p : g.members) {
      const double A = 2.0 * a * rng.uniform() - a;
      const double C = 2.0 * rng.uniform();
      const double l = rng.uniform(-1.0, 1.0);
      const double chance = rng.uniform();
      if (chance < 0.5) {
        if (std::abs(A) >= 1.0) {
          const Vec& target = start[rng.index(start.size())];
          p.position = encircle(p.position, target, A, C);
        } else {
          p.position = encircle(p.position, leader, A, C);
        }
      } else {
        p.position = spiral(p.position, leader, l);
      }
      bounds.clamp(p.position);
    }
  }
  state.iteration = t;
  evaluate_population(state, objective);
  update_bests(state);
}

}  // namespace windplan
