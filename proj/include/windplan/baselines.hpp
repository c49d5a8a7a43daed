#pragma once

#include <array>

#include "windplan/core.hpp"

namespace windplan {

// Grey wolf optimizer. Leaders (alpha, beta, delta) are the three best
// positions seen so far; the control parameter a falls linearly 2 -> 0.
class GwoOptimizer : public Optimizer {
 public:
  std::string name() const override { return "gwo"; }
  void prepare(SwarmState& state, const Bounds& bounds, Rng& rng) override;
  void step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) override;

  struct Leader {
    Vec position;
    double fitness = kInf;
  };
  const std::array<Leader, 3>& leaders() const { return leaders_; }

  // Shift a new candidate into the leader list if it beats one of them.
  void offer(std::span<const double> x, double f);

 private:
  std::array<Leader, 3> leaders_;
};

// Whale optimization algorithm (encircling / spiral / random search).
class WoaOptimizer : public Optimizer {
 public:
  std::string name() const override { return "woa"; }
  void step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) override;

  // Single-whale moves, exposed for tests.
  static Vec encircle(std::span<const double> x, std::span<const double> target, double A, double C);
  static Vec spiral(std::span<const double> x, std::span<const double> best, double l, double b = 1.0);
};

// Linear 2 -> 0 schedule shared by both baselines; t is 1-based.
double linear_control(std::size_t t, std::size_t total);

}  // namespace windplan
