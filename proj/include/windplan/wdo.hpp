#pragma once

#include <nlohmann/json.hpp>

#include "windplan/core.hpp"

namespace windplan {

struct GuidanceWeights {
  double w1 = 0.6;  // pbest
  double w2 = 0.3;  // gbest
  double w3 = 0.1;  // tbest

  bool valid(double tol = 1e-12) const;
};

// Toggles and hyperparameters for every MAWDO enhancement.
struct StrategyConfig {
  bool use_hierarchical_guidance = true;
  bool use_scheduled_mixing = true;
  bool use_distance_gate = true;
  bool use_pgr = true;
  std::size_t pgr_interval = 50;
  double pgr_fraction = 0.10;
  double sigma0_scale = 0.10;
  double sigma_end_scale = 0.01;
  bool use_obl = true;
  bool use_reflect_damp = true;
  double eta = 0.5;
  bool use_lowdim_stabilization = true;
  std::size_t lowdim_threshold = 3;
  double vmax_scale_lowdim = 0.25;
  std::size_t group_count = 8;

  // Throws std::invalid_argument on a broken invariant.
  void validate() const;

  static StrategyConfig full();
  static StrategyConfig none();  // single group, every enhancement off
  // Ablation presets: 1 = multi-group, 2 = scheduled triple guidance,
  // 3 = periodic guided restart (+OBL), 4 = low-dimensional stabilization.
  static StrategyConfig preset(int variant);
};

void to_json(nlohmann::json& j, const StrategyConfig& cfg);
// Missing keys keep their current value, so a partial object acts as an override.
void from_json(const nlohmann::json& j, StrategyConfig& cfg);

struct GateContext {
  double d_max = 1.0;
};

// Classic WDO coefficients used when WDO itself is run.
inline constexpr Coefficients kClassicWdoCoefficients{0.4, 0.2, 3.0, 0.4};

void clamp_velocity(std::span<double> u, std::span<const double> vmax);

// (1-a)U - gX + RT(B-X) + cU[perm]; no rank division. Clamped to vmax.
// `gravity`, when given, replaces the -gX term.
Vec wdo_velocity_update(const Particle& p, std::span<const double> guide, const Coefficients& coeffs,
                        std::size_t rank, std::span<const std::size_t> perm, std::span<const double> vmax,
                        std::span<const double> gravity = {});

// (1-a)U - gX + RT(B-X)/rank + cU[perm]/rank. Clamped to vmax.
// `gravity`, when given, replaces the -gX term (anchored or centroid gravity).
Vec awdo_velocity_update(const Particle& p, std::span<const double> guide, const Coefficients& coeffs,
                         std::size_t rank, std::span<const std::size_t> perm, std::span<const double> vmax,
                         std::span<const double> gravity = {});

// -g (x - anchor). The optimizers anchor gravity at the box center, i.e. the
// origin of the normalized [-1, 1] frame WDO is defined in.
Vec anchored_gravity(std::span<const double> x, std::span<const double> anchor, double g);

Vec box_center(const Bounds& bounds);

// Draws the four AWDO coefficients from U[0,1] (one particle, one iteration).
Coefficients sample_awdo_coefficients(Rng& rng);

Vec compose_guidance(std::span<const double> pbest, std::span<const double> gbest, std::span<const double> tbest,
                     const GuidanceWeights& w);

// Linear schedule from (0.6,0.3,0.1) at t=1 to (0.2,0.3,0.5) at t=T.
GuidanceWeights scheduled_weights(std::size_t t, std::size_t total);

double distance_gate(std::span<const double> gbest, std::span<const double> tbest, const GateContext& ctx, double w3);

Vec opposite_candidate(std::span<const double> x, const Bounds& bounds);

// Mirrors violated coordinates back across the bound and reverses/attenuates
// the matching velocity component. Works in place.
void reflect_damp(std::span<double> x, std::span<double> u, const Bounds& bounds, double eta);

// Per-group coefficients for the low-dimensional regime.
Coefficients sample_group_coefficients(Rng& rng);

Vec tighten_vmax(std::span<const double> vmax, std::size_t dim, const StrategyConfig& cfg);

// -g (x - mean(positions)).
Vec centroid_gravity(std::span<const Vec> positions, std::span<const double> x, double g);

// Fitness ranks within one group (1 = best). Stable: equal fitness keeps index order.
std::vector<std::size_t> group_ranks(const Group& group);

// Restart standard deviation per dimension at iteration t.
Vec restart_sigma(std::size_t t, std::size_t total, const StrategyConfig& cfg, const Bounds& bounds);

// Re-seeds the worst particles of every group around tbest when t is a
// multiple of cfg.pgr_interval. Returns how many particles were replaced.
std::size_t periodic_guided_restart(SwarmState& state, std::size_t t, const StrategyConfig& cfg, const Bounds& bounds,
                                    const Objective& objective, Rng& rng);

class WdoOptimizer : public Optimizer {
 public:
  explicit WdoOptimizer(Coefficients coeffs = kClassicWdoCoefficients) : coeffs_(coeffs) {}
  std::string name() const override { return "wdo"; }
  void step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) override;

 private:
  Coefficients coeffs_;
};

class AwdoOptimizer : public Optimizer {
 public:
  std::string name() const override { return "awdo"; }
  void step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) override;
};

class MawdoOptimizer : public Optimizer {
 public:
  explicit MawdoOptimizer(StrategyConfig cfg = StrategyConfig::full(), std::string label = "mawdo");
  std::string name() const override { return label_; }
  std::size_t group_count() const override { return cfg_.group_count; }
  const StrategyConfig& config() const { return cfg_; }

  void prepare(SwarmState& state, const Bounds& bounds, Rng& rng) override;
  void step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) override;

 private:
  bool lowdim_active(std::size_t dim) const;

  StrategyConfig cfg_;
  std::string label_;
};

// Full iteration of the MAWDO flowchart on an initialized state.
void mawdo_step(SwarmState& state, const Objective& objective, const StrategyConfig& cfg, const Bounds& bounds,
                Rng& rng);

}  // namespace windplan
