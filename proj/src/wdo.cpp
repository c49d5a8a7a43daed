#include "windplan/wdo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace windplan {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

void require_perm(std::span<const std::size_t> perm, std::size_t dim) {
  require_same_dim(perm.size(), dim, "velocity update permutation");
  std::vector<bool> seen(dim, false);
  for (auto k : perm) {
    if (k >= dim || seen[k]) throw std::invalid_argument("velocity update: perm is not a permutation");
    seen[k] = true;
  }
}

}  // namespace

bool GuidanceWeights::valid(double tol) const {
  auto in_unit = [](double w) { return w >= 0.0 && w <= 1.0; };
  return in_unit(w1) && in_unit(w2) && in_unit(w3) && std::abs(w1 + w2 + w3 - 1.0) <= tol;
}

void StrategyConfig::validate() const {
  if (!(pgr_fraction > 0.0 && pgr_fraction <= 0.5)) throw std::invalid_argument("pgr_fraction must be in (0, 0.5]");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in (0, 1)");
  if (!(sigma_end_scale <= sigma0_scale)) throw std::invalid_argument("sigma_end_scale must be <= sigma0_scale");
  if (sigma_end_scale < 0.0) throw std::invalid_argument("sigma_end_scale must be >= 0");
  if (pgr_interval == 0) throw std::invalid_argument("pgr_interval must be >= 1");
  if (group_count == 0) throw std::invalid_argument("group_count must be >= 1");
  if (!(vmax_scale_lowdim > 0.0)) throw std::invalid_argument("vmax_scale_lowdim must be positive");
}

StrategyConfig StrategyConfig::full() { return {}; }

StrategyConfig StrategyConfig::none() {
  StrategyConfig cfg;
  cfg.use_hierarchical_guidance = false;
  cfg.use_scheduled_mixing = false;
  cfg.use_distance_gate = false;
  cfg.use_pgr = false;
  cfg.use_obl = false;
  cfg.use_reflect_damp = false;
  cfg.use_lowdim_stabilization = false;
  cfg.group_count = 1;
  return cfg;
}

StrategyConfig StrategyConfig::preset(int variant) {
  StrategyConfig cfg = none();
  switch (variant) {
    case 1:
      cfg.group_count = 8;
      break;
    case 2:
      cfg.group_count = 8;
      cfg.use_hierarchical_guidance = true;
      cfg.use_scheduled_mixing = true;
      break;
    case 3:
      cfg.use_pgr = true;
      cfg.use_obl = true;
      break;
    case 4:
      cfg.use_lowdim_stabilization = true;
      break;
    default:
      throw std::invalid_argument("unknown ablation preset " + std::to_string(variant));
  }
  return cfg;
}

void to_json(nlohmann::json& j, const StrategyConfig& cfg) {
  j = nlohmann::json{{"use_hierarchical_guidance", cfg.use_hierarchical_guidance},
                     {"use_scheduled_mixing", cfg.use_scheduled_mixing},
                     {"use_distance_gate", cfg.use_distance_gate},
                     {"use_pgr", cfg.use_pgr},
                     {"pgr_interval", cfg.pgr_interval},
                     {"pgr_fraction", cfg.pgr_fraction},
                     {"sigma0_scale", cfg.sigma0_scale},
                     {"sigma_end_scale", cfg.sigma_end_scale},
                     {"use_obl", cfg.use_obl},
                     {"use_reflect_damp", cfg.use_reflect_damp},
                     {"eta", cfg.eta},
                     {"use_lowdim_stabilization", cfg.use_lowdim_stabilization},
                     {"lowdim_threshold", cfg.lowdim_threshold},
                     {"vmax_scale_lowdim", cfg.vmax_scale_lowdim},
                     {"group_count", cfg.group_count}};
}

void from_json(const nlohmann::json& j, StrategyConfig& cfg) {
  static const char* known[] = {"use_hierarchical_guidance", "use_scheduled_mixing", "use_distance_gate",
                                "use_pgr",                   "pgr_interval",         "pgr_fraction",
                                "sigma0_scale",              "sigma_end_scale",      "use_obl",
                                "use_reflect_damp",          "eta",                  "use_lowdim_stabilization",
                                "lowdim_threshold",          "vmax_scale_lowdim",    "group_count"};
  for (const auto& item : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return item.key() == k; }) ==
        std::end(known))
      throw std::invalid_argument("unknown strategy field '" + item.key() + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("use_hierarchical_guidance", cfg.use_hierarchical_guidance);
  get("use_scheduled_mixing", cfg.use_scheduled_mixing);
  get("use_distance_gate", cfg.use_distance_gate);
  get("use_pgr", cfg.use_pgr);
  get("pgr_interval", cfg.pgr_interval);
  get("pgr_fraction", cfg.pgr_fraction);
  get("sigma0_scale", cfg.sigma0_scale);
  get("sigma_end_scale", cfg.sigma_end_scale);
  get("use_obl", cfg.use_obl);
  get("use_reflect_damp", cfg.use_reflect_damp);
  get("eta", cfg.eta);
  get("use_lowdim_stabilization", cfg.use_lowdim_stabilization);
  get("lowdim_threshold", cfg.lowdim_threshold);
  get("vmax_scale_lowdim", cfg.vmax_scale_lowdim);
  get("group_count", cfg.group_count);
}

void clamp_velocity(std::span<double> u, std::span<const double> vmax) {
  for (std::size_t d = 0; d < u.size(); ++d) u[d] = std::clamp(u[d], -vmax[d], vmax[d]);
}

Vec wdo_velocity_update(const Particle& p, std::span<const double> guide, const Coefficients& k, std::size_t rank,
                        std::span<const std::size_t> perm, std::span<const double> vmax,
                        std::span<const double> gravity) {
  const std::size_t dim = p.position.size();
  require_same_dim(p.velocity.size(), dim, "wdo velocity update");
  require_same_dim(guide.size(), dim, "wdo velocity update guide");
  require_same_dim(vmax.size(), dim, "wdo velocity update vmax");
  require_perm(perm, dim);
  if (!gravity.empty()) require_same_dim(gravity.size(), dim, "wdo velocity update gravity");
  if (rank < 1) throw std::invalid_argument("wdo velocity update: rank must be >= 1");

  Vec u(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double x = p.position[d];
    const double grav = gravity.empty() ? -k.g * x : gravity[d];
    u[d] = (1.0 - k.a) * p.velocity[d] + grav + k.rt * (guide[d] - x) + k.c * p.velocity[perm[d]];
  }
  clamp_velocity(u, vmax);
  return u;
}

Vec awdo_velocity_update(const Particle& p, std::span<const double> guide, const Coefficients& k, std::size_t rank,
                         std::span<const std::size_t> perm, std::span<const double> vmax,
                         std::span<const double> gravity) {
  const std::size_t dim = p.position.size();
  require_same_dim(p.velocity.size(), dim, "awdo velocity update");
  require_same_dim(guide.size(), dim, "awdo velocity update guide");
  require_same_dim(vmax.size(), dim, "awdo velocity update vmax");
  require_perm(perm, dim);
  if (!gravity.empty()) require_same_dim(gravity.size(), dim, "awdo velocity update gravity");
  if (rank < 1) throw std::invalid_argument("awdo velocity update: rank must be >= 1");

  const double r = static_cast<double>(rank);
  Vec u(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double x = p.position[d];
    const double grav = gravity.empty() ? -k.g * x : gravity[d];
    u[d] = (1.0 - k.a) * p.velocity[d] + grav + k.rt * (guide[d] - x) / r + k.c * p.velocity[perm[d]] / r;
  }
  clamp_velocity(u, vmax);
  return u;
}

Vec anchored_gravity(std::span<const double> x, std::span<const double> anchor, double g) {
  require_same_dim(x.size(), anchor.size(), "anchored_gravity");
  Vec out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = -g * (x[d] - anchor[d]);
  return out;
}

Vec box_center(const Bounds& bounds) {
  Vec c(bounds.dim());
  for (std::size_t d = 0; d < c.size(); ++d) c[d] = 0.5 * (bounds.lower(d) + bounds.upper(d));
  return c;
}

Coefficients sample_awdo_coefficients(Rng& rng) {
  Coefficients k;
  k.a = rng.uniform();
  k.g = rng.uniform();
  k.rt = rng.uniform();
  k.c = rng.uniform();
  return k;
}

Vec compose_guidance(std::span<const double> pbest, std::span<const double> gbest, std::span<const double> tbest,
                     const GuidanceWeights& w) {
  require_same_dim(pbest.size(), gbest.size(), "compose_guidance");
  require_same_dim(pbest.size(), tbest.size(), "compose_guidance");
  Vec b(pbest.size());
  for (std::size_t d = 0; d < b.size(); ++d) b[d] = w.w1 * pbest[d] + w.w2 * gbest[d] + w.w3 * tbest[d];
  return b;
}

GuidanceWeights scheduled_weights(std::size_t t, std::size_t total) {
  if (total == 0 || t < 1 || t > total) throw std::invalid_argument("scheduled_weights: t out of range [1, T]");
  const double lambda = total == 1 ? 0.0 : static_cast<double>(t - 1) / static_cast<double>(total - 1);
  GuidanceWeights w;
  w.w1 = 0.6 * (1.0 - lambda) + 0.2 * lambda;
  w.w2 = 0.3 * (1.0 - lambda) + 0.3 * lambda;
  w.w3 = 0.1 * (1.0 - lambda) + 0.5 * lambda;
  return w;
}

double distance_gate(std::span<const double> gbest, std::span<const double> tbest, const GateContext& ctx,
                     double w3) {
  require_same_dim(gbest.size(), tbest.size(), "distance_gate");
  double s = 0.0;
  for (std::size_t d = 0; d < gbest.size(); ++d) s += (gbest[d] - tbest[d]) * (gbest[d] - tbest[d]);
  return w3 * std::min(1.0, std::sqrt(s) / ctx.d_max);
}

Vec opposite_candidate(std::span<const double> x, const Bounds& bounds) {
  require_same_dim(x.size(), bounds.dim(), "opposite_candidate");
  Vec y(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) y[d] = bounds.lower(d) + bounds.upper(d) - x[d];
  return y;
}

void reflect_damp(std::span<double> x, std::span<double> u, const Bounds& bounds, double eta) {
  require_same_dim(x.size(), bounds.dim(), "reflect_damp");
  require_same_dim(u.size(), bounds.dim(), "reflect_damp");
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double lo = bounds.lower(d);
    const double hi = bounds.upper(d);
    if (!std::isfinite(x[d])) {
      x[d] = std::clamp(x[d], lo, hi);
      if (std::isnan(x[d])) x[d] = lo;
      u[d] = 0.0;
      continue;
    }
    while (x[d] < lo || x[d] > hi) {
      const double b = x[d] > hi ? hi : lo;
      // An overshoot of a full box width or more would bounce past the
      // opposite wall; pin to the violated bound instead.
      if (std::abs(x[d] - b) >= hi - lo) {
        x[d] = b;
        u[d] = -eta * u[d];
        break;
      }
      x[d] = 2.0 * b - x[d];
      u[d] = -eta * u[d];
    }
  }
}

Coefficients sample_group_coefficients(Rng& rng) {
  Coefficients k;
  k.a = rng.uniform(0.15, 0.45);
  k.g = rng.uniform(0.15, 0.45);
  k.rt = rng.uniform(0.90, 1.50);
  k.c = rng.uniform(0.10, 0.50);
  return k;
}

Vec tighten_vmax(std::span<const double> vmax, std::size_t dim, const StrategyConfig& cfg) {
  Vec out(vmax.begin(), vmax.end());
  if (dim <= cfg.lowdim_threshold)
    for (auto& v : out) v *= cfg.vmax_scale_lowdim;
  return out;
}

Vec centroid_gravity(std::span<const Vec> positions, std::span<const double> x, double g) {
  if (positions.empty()) throw std::invalid_argument("centroid_gravity: empty group");
  Vec mean(x.size(), 0.0);
  for (const auto& p : positions) {
    require_same_dim(p.size(), x.size(), "centroid_gravity");
    for (std::size_t d = 0; d < x.size(); ++d) mean[d] += p[d];
  }
  Vec out(x.size());
  const double n = static_cast<double>(positions.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = -g * (x[d] - mean[d] / n);
  return out;
}

std::vector<std::size_t> group_ranks(const Group& group) {
  const auto& m = group.members;
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return m[a].fitness < m[b].fitness; });
  std::vector<std::size_t> rank(m.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  return rank;
}

Vec restart_sigma(std::size_t t, std::size_t total, const StrategyConfig& cfg, const Bounds& bounds) {
  const double frac = total == 0 ? 1.0 : static_cast<double>(t) / static_cast<double>(total);
  const double scale = cfg.sigma0_scale - (cfg.sigma0_scale - cfg.sigma_end_scale) * frac;
  Vec sigma(bounds.dim());
  for (std::size_t d = 0; d < sigma.size(); ++d) sigma[d] = scale * bounds.width(d);
  return sigma;
}

std::size_t periodic_guided_restart(SwarmState& state, std::size_t t, const StrategyConfig& cfg, const Bounds& bounds,
                                    const Objective& objective, Rng& rng) {
  if (cfg.pgr_interval == 0 || t % cfg.pgr_interval != 0) return 0;
  const Vec sigma = restart_sigma(t, state.max_iterations, cfg, bounds);
  const std::size_t dim = bounds.dim();

  std::size_t replaced = 0;
  std::size_t flat_base = 0;
  for (auto& group : state.groups) {
    auto& m = group.members;
    const auto count = static_cast<std::size_t>(std::ceil(cfg.pgr_fraction * static_cast<double>(m.size()) - 1e-12));
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Worst first; stable so equal fitness keeps index order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m[a].fitness > m[b].fitness; });

    for (std::size_t k = 0; k < std::min(count, m.size()); ++k) {
      const std::size_t i = order[k];
      Particle& p = m[i];
      Vec x(dim);
      for (std::size_t d = 0; d < dim; ++d) x[d] = rng.normal(state.tbest_position[d], sigma[d]);
      Vec u(dim, 0.0);
      if (cfg.use_reflect_damp)
        reflect_damp(x, u, bounds, cfg.eta);
      else
        bounds.clamp(x);

      double fx = evaluate_at(objective, x, t, flat_base + i);
      if (cfg.use_obl) {
        Vec y = opposite_candidate(x, bounds);
        const double fy = evaluate_at(objective, y, t, flat_base + i);
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
        }
      }
      p.position = x;
      p.velocity.assign(dim, 0.0);
      p.fitness = fx;
      p.pbest_position = std::move(x);
      p.pbest_fitness = fx;
      ++replaced;
    }
    flat_base += m.size();
  }
  update_bests(state);
  return replaced;
}

void WdoOptimizer::step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) {
  const std::size_t dim = state.dim();
  const Vec center = box_center(bounds);
  for (auto& group : state.groups) {
    const auto ranks = group_ranks(group);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
      Particle& p = group.members[i];
      const auto perm = rng.permutation(dim);
      const Vec gravity = anchored_gravity(p.position, center, coeffs_.g);
      p.velocity = wdo_velocity_update(p, state.tbest_position, coeffs_, ranks[i], perm, state.vmax, gravity);
      for (std::size_t d = 0; d < dim; ++d) p.position[d] += p.velocity[d];
      bounds.clamp(p.position);
    }
  }
  ++state.iteration;
  evaluate_population(state, objective);
  update_bests(state);
}

void AwdoOptimizer::step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) {
  const std::size_t dim = state.dim();
  const Vec center = box_center(bounds);
  for (auto& group : state.groups) {
    const auto ranks = group_ranks(group);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
      Particle& p = group.members[i];
      const Coefficients k = sample_awdo_coefficients(rng);
      const auto perm = rng.permutation(dim);
      const Vec gravity = anchored_gravity(p.position, center, k.g);
      p.velocity = awdo_velocity_update(p, state.tbest_position, k, ranks[i], perm, state.vmax, gravity);
      for (std::size_t d = 0; d < dim; ++d) p.position[d] += p.velocity[d];
      bounds.clamp(p.position);
    }
  }
  ++state.iteration;
  evaluate_population(state, objective);
  update_bests(state);
}

MawdoOptimizer::MawdoOptimizer(StrategyConfig cfg, std::string label) : cfg_(cfg), label_(std::move(label)) {
  cfg_.validate();
}

bool MawdoOptimizer::lowdim_active(std::size_t dim) const {
  return cfg_.use_lowdim_stabilization && dim <= cfg_.lowdim_threshold;
}

void MawdoOptimizer::prepare(SwarmState& state, const Bounds& /*bounds*/, Rng& rng) {
  if (!lowdim_active(state.dim())) return;
  for (auto& group : state.groups) group.coeffs = sample_group_coefficients(rng);
  state.vmax = tighten_vmax(state.vmax, state.dim(), cfg_);
}

void MawdoOptimizer::step(SwarmState& state, const Objective& objective, const Bounds& bounds, Rng& rng) {
  mawdo_step(state, objective, cfg_, bounds, rng);
}

void mawdo_step(SwarmState& state, const Objective& objective, const StrategyConfig& cfg, const Bounds& bounds,
                Rng& rng) {
  const std::size_t dim = state.dim();
  const std::size_t t = state.iteration + 1;
  const bool lowdim = cfg.use_lowdim_stabilization && dim <= cfg.lowdim_threshold;

  GuidanceWeights base{0.0, 1.0, 0.0};
  if (cfg.use_hierarchical_guidance)
    base = cfg.use_scheduled_mixing ? scheduled_weights(t, state.max_iterations) : GuidanceWeights{};
  const GateContext gate{bounds.diagonal()};
  const Vec center = box_center(bounds);

  for (auto& group : state.groups) {
    GuidanceWeights w = base;
    if (cfg.use_hierarchical_guidance && cfg.use_distance_gate)
      w.w3 = distance_gate(group.gbest_position, state.tbest_position, gate, base.w3);
    const auto ranks = group_ranks(group);

    std::vector<Vec> snapshot;
    if (lowdim) {
      snapshot.reserve(group.members.size());
      for (const auto& p : group.members) snapshot.push_back(p.position);
    }

    for (std::size_t i = 0; i < group.members.size(); ++i) {
      Particle& p = group.members[i];
      const Vec guide = compose_guidance(p.pbest_position, group.gbest_position, state.tbest_position, w);
      const Coefficients k = lowdim ? group.coeffs : sample_awdo_coefficients(rng);
      const auto perm = rng.permutation(dim);
      const Vec gravity =
          lowdim ? centroid_gravity(snapshot, p.position, k.g) : anchored_gravity(p.position, center, k.g);
      p.velocity = awdo_velocity_update(p, guide, k, ranks[i], perm, state.vmax, gravity);
      for (std::size_t d = 0; d < dim; ++d) p.position[d] += p.velocity[d];
      if (cfg.use_reflect_damp)
        reflect_damp(p.position, p.velocity, bounds, cfg.eta);
      else
        bounds.clamp(p.position);
    }
  }

  state.iteration = t;
  evaluate_population(state, objective);
  update_bests(state);
  if (cfg.use_pgr) periodic_guided_restart(state, t, cfg, bounds, objective, rng);
}

}  // namespace windplan
