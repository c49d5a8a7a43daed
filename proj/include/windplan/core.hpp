#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace windplan {

using Vec = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Axis-aligned search box.
class Bounds {
 public:
  Bounds(Vec lower, Vec upper);

  static Bounds uniform(std::size_t dim, double lower, double upper);

  std::size_t dim() const { return lower_.size(); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double lower(std::size_t d) const { return lower_[d]; }
  double upper(std::size_t d) const { return upper_[d]; }
  double width(std::size_t d) const { return upper_[d] - lower_[d]; }

  bool contains(std::span<const double> x) const;
  void clamp(std::span<double> x) const;
  // Euclidean length of the box diagonal.
  double diagonal() const;

 private:
  Vec lower_;
  Vec upper_;
};

// Seeded random stream. Child streams are derived by hashing (seed, stream id)
// through splitmix64, so the same master seed always yields the same family of
// independent streams regardless of how many are drawn or in which order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng split(std::uint64_t stream) const;

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  std::size_t index(std::size_t n);  // [0, n)
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Coefficients {
  double a = 0.0;   // friction
  double g = 0.0;   // gravity
  double rt = 0.0;  // pressure gradient
  double c = 0.0;   // Coriolis
};

struct Particle {
  Vec position;
  Vec velocity;
  double fitness = kInf;
  Vec pbest_position;
  double pbest_fitness = kInf;
};

struct Group {
  std::vector<Particle> members;
  Vec gbest_position;
  double gbest_fitness = kInf;
  Coefficients coeffs;
};

struct SwarmState {
  std::vector<Group> groups;
  Vec tbest_position;
  double tbest_fitness = kInf;
  std::size_t iteration = 0;  // completed iterations
  std::size_t max_iterations = 1;
  Vec vmax;

  std::size_t dim() const { return vmax.size(); }
  std::size_t size() const;
};

struct RunRecord {
  std::vector<double> trace;
  double final_best_fitness = kInf;
  Vec final_best_position;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
};

// Raised when the objective throws; carries where it happened.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::size_t iteration, std::size_t particle, const std::string& what);
  std::size_t iteration() const { return iteration_; }
  std::size_t particle() const { return particle_; }

 private:
  std::size_t iteration_;
  std::size_t particle_;
};

// Non-finite values become +inf so they always rank worst.
double sanitize_fitness(double f);

// Sizes of `groups` balanced groups over n items; remainder to the lowest indices.
std::vector<std::size_t> partition_sizes(std::size_t n, std::size_t groups);

// Default velocity cap: this fraction of the box width per dimension.
inline constexpr double kDefaultVmaxFraction = 0.2;

SwarmState initialize_population(const Bounds& bounds, std::size_t n, std::size_t groups, Rng& rng,
                                 double vmax_fraction = kDefaultVmaxFraction);

// Evaluates one particle at its current position, wrapping failures with context.
double evaluate_at(const Objective& objective, std::span<const double> x, std::size_t iteration,
                   std::size_t particle);

// Evaluates every particle's current position (flat index order across groups).
void evaluate_population(SwarmState& state, const Objective& objective);

// Refreshes pbest/gbest/tbest from the particles' current fitness values.
// Strict improvement only; incumbents win ties.
void update_bests(SwarmState& state);

// One optimizer = one step procedure over a SwarmState. Instances may carry
// per-run memory (e.g. GWO leaders) and must not be shared between runs.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual std::string name() const = 0;
  virtual std::size_t group_count() const { return 1; }
  // Called once after the initial population has been evaluated.
  virtual void prepare(SwarmState& /*state*/, const Bounds& /*bounds*/, Rng& /*rng*/) {}
  // Moves the swarm one iteration, re-evaluates it and refreshes the bests.
  // Must increment state.iteration.
  virtual void step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) = 0;
};

using OptimizerFactory = std::function<std::unique_ptr<Optimizer>()>;

// Optional per-iteration observer (iteration, state).
using IterationHook = std::function<void(std::size_t, const SwarmState&)>;

// Evaluates the initial population, then executes T iterations.
// trace[t] is tbest_fitness after iteration t+1.
RunRecord run(Optimizer& optimizer, const Objective& objective, const Bounds& bounds, SwarmState state,
              std::size_t iterations, std::uint64_t seed, const IterationHook& hook = {});

// initialize_population + run with streams derived from one seed.
RunRecord optimize(Optimizer& optimizer, const Objective& objective, const Bounds& bounds,
                   std::size_t population, std::size_t iterations, std::uint64_t seed,
                   const IterationHook& hook = {});

}  // namespace windplan
