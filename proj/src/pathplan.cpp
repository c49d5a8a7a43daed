#include "windplan/pathplan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <queue>

namespace windplan::plan {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, Point{a.x + t * dx, a.y + t * dy});
}

bool polygon_contains(const Polygon& poly, Point p) {
  const auto& v = poly.vertices;
  int orientation = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int s = sign(cross(v[i], v[(i + 1) % v.size()], p));
    if (s == 0) return false;
    if (orientation == 0)
      orientation = s;
    else if (s != orientation)
      return false;
  }
  return true;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Obstacle::Obstacle(Shape shape, Point velocity, bool is_dynamic)
    : shape_(std::move(shape)), velocity_(velocity), is_dynamic_(is_dynamic) {
  if (const auto* c = std::get_if<Circle>(&shape_)) {
    if (!(c->radius > 0.0)) throw std::invalid_argument("obstacle: circle radius must be positive");
  } else {
    const auto& poly = std::get<Polygon>(shape_);
    if (poly.vertices.size() < 3) throw std::invalid_argument("obstacle: polygon needs at least 3 vertices");
  }
  if (is_dynamic_ && velocity_.x == 0.0 && velocity_.y == 0.0)
    throw std::invalid_argument("obstacle: dynamic obstacle must have nonzero velocity");
  if (!is_dynamic_) velocity_ = {};
}

Obstacle Obstacle::circle(Point center, double radius, Point velocity, bool is_dynamic) {
  return Obstacle(Circle{center, radius}, velocity, is_dynamic);
}

Obstacle Obstacle::rectangle(double min_x, double min_y, double max_x, double max_y, Point velocity,
                             bool is_dynamic) {
  Polygon p{{{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}}};
  return Obstacle(std::move(p), velocity, is_dynamic);
}

Box Obstacle::bounding_box() const {
  if (const auto* c = std::get_if<Circle>(&shape_))
    return {c->center.x - c->radius, c->center.y - c->radius, c->center.x + c->radius, c->center.y + c->radius};
  const auto& v = std::get<Polygon>(shape_).vertices;
  Box b{v[0].x, v[0].y, v[0].x, v[0].y};
  for (const auto& p : v) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

bool Obstacle::contains(Point p) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) return distance(p, c->center) < c->radius;
  return polygon_contains(std::get<Polygon>(shape_), p);
}

bool Obstacle::hits_segment(Point a, Point b) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) return point_segment_distance(c->center, a, b) < c->radius;
  const auto& poly = std::get<Polygon>(shape_);
  const Box box = bounding_box();
  if (std::max(a.x, b.x) < box.min_x || std::min(a.x, b.x) > box.max_x || std::max(a.y, b.y) < box.min_y ||
      std::min(a.y, b.y) > box.max_y)
    return false;
  if (polygon_contains(poly, a) || polygon_contains(poly, b)) return true;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (segments_intersect(a, b, v[i], v[(i + 1) % v.size()])) return true;
  return false;
}

Obstacle Obstacle::inflated(double margin) const {
  if (margin < 0.0) throw std::invalid_argument("obstacle: negative inflation margin");
  Obstacle out = *this;
  if (margin == 0.0) return out;
  if (auto* c = std::get_if<Circle>(&out.shape_)) {
    c->radius += margin;
    return out;
  }
  const auto& v = std::get<Polygon>(shape_).vertices;
  const std::size_t n = v.size();
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y;
  const double orient = area2 > 0.0 ? 1.0 : -1.0;
  // Outward normal of edge i (v[i] -> v[i+1]).
  auto normal = [&](std::size_t i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    const double len = distance(a, b);
    return Point{orient * (b.y - a.y) / len, -orient * (b.x - a.x) / len};
  };
  auto& grown = std::get<Polygon>(out.shape_).vertices;
  for (std::size_t i = 0; i < n; ++i) {
    const Point n1 = normal((i + n - 1) % n);
    const Point n2 = normal(i);
    const double cos_half = std::sqrt(std::max(0.0, (1.0 + n1.x * n2.x + n1.y * n2.y) / 2.0));
    Point bis{n1.x + n2.x, n1.y + n2.y};
    const double bl = std::hypot(bis.x, bis.y);
    if (bl == 0.0 || cos_half == 0.0) continue;
    const double reach = margin / cos_half;
    grown[i] = {v[i].x + bis.x / bl * reach, v[i].y + bis.y / bl * reach};
  }
  return out;
}

void Obstacle::translate(Point delta) {
  if (auto* c = std::get_if<Circle>(&shape_)) {
    c->center.x += delta.x;
    c->center.y += delta.y;
    return;
  }
  for (auto& p : std::get<Polygon>(shape_).vertices) {
    p.x += delta.x;
    p.y += delta.y;
  }
}

void CostWeights::validate() const {
  if (alpha < 0.0 || beta < 0.0 || lambda < 0.0) throw std::invalid_argument("cost weights must be non-negative");
  if (std::abs(alpha + beta + lambda - 1.0) > 1e-12) throw std::invalid_argument("cost weights must sum to 1");
  if (!(k > 0.0)) throw std::invalid_argument("collision scale k must be positive");
}

void ScenarioState::validate() const {
  weights.validate();
  if (!(map.width > 0.0 && map.height > 0.0)) throw std::invalid_argument("scenario: map size must be positive");
  if (!map.inside(map.start) || !map.inside(map.goal))
    throw std::invalid_argument("scenario: start and goal must lie inside the map");
  if (!map.inside(robot_position)) throw std::invalid_argument("scenario: robot outside the map");
  for (const auto& o : obstacles) {
    if (o.contains(map.start)) throw std::invalid_argument("scenario: start lies inside an obstacle");
    if (o.contains(map.goal)) throw std::invalid_argument("scenario: goal lies inside an obstacle");
  }
}

PathCandidate decode(std::span<const double> encoded, Point start, Point goal, const MapSpec& map) {
  if (encoded.size() % 2 != 0) throw std::invalid_argument("decode: waypoint vector must have even length");
  PathCandidate path;
  path.points.reserve(encoded.size() / 2 + 2);
  path.points.push_back(start);
  for (std::size_t i = 0; i < encoded.size(); i += 2)
    path.points.push_back({std::clamp(encoded[i], 0.0, map.width), std::clamp(encoded[i + 1], 0.0, map.height)});
  path.points.push_back(goal);
  return path;
}

PathCandidate decode(std::span<const double> encoded, const MapSpec& map) {
  return decode(encoded, map.start, map.goal, map);
}

double path_length(std::span<const Point> points) {
  double s = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) s += distance(points[i - 1], points[i]);
  return s;
}

std::size_t count_collisions(std::span<const Point> points, std::span<const Obstacle> obstacles) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    for (const auto& o : obstacles)
      if (o.hits_segment(points[i - 1], points[i])) ++n;
  return n;
}

double obstacle_cost(std::size_t collisions, double k) {
  const double n = static_cast<double>(collisions);
  return k * n * n * n * n;
}

double turning_cost(std::span<const Point> points) {
  std::vector<Point> pts;
  pts.reserve(points.size());
  for (const auto& p : points)
    if (pts.empty() || !(pts.back() == p)) pts.push_back(p);

  double s = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double ax = pts[i - 1].x - pts[i].x;
    const double ay = pts[i - 1].y - pts[i].y;
    const double bx = pts[i + 1].x - pts[i].x;
    const double by = pts[i + 1].y - pts[i].y;
    const double cosine = std::clamp((ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by)), -1.0, 1.0);
    s += std::abs(std::acos(cosine) - std::numbers::pi);
  }
  return s;
}

CostBreakdown cost_breakdown(const PathCandidate& path, const ScenarioState& scenario) {
  CostBreakdown c;
  c.length = path_length(path.points);
  c.collisions = count_collisions(path.points, scenario.obstacles);
  c.collision_cost = obstacle_cost(c.collisions, scenario.weights.k);
  c.turning = turning_cost(path.points);
  const auto& w = scenario.weights;
  c.total = w.alpha * c.length + w.beta * c.collision_cost + w.lambda * c.turning;
  return c;
}

double total_cost(const PathCandidate& path, const ScenarioState& scenario) {
  return cost_breakdown(path, scenario).total;
}

void advance_obstacles(ScenarioState& scenario) {
  const double w = scenario.map.width;
  const double h = scenario.map.height;
  for (auto& o : scenario.obstacles) {
    if (!o.is_dynamic()) continue;
    Point v = o.velocity();
    o.translate(v);
    const Box b = o.bounding_box();
    Point fix{0.0, 0.0};
    if (b.max_x > w && v.x > 0.0) {
      fix.x = -2.0 * (b.max_x - w);
      v.x = -v.x;
    } else if (b.min_x < 0.0 && v.x < 0.0) {
      fix.x = -2.0 * b.min_x;
      v.x = -v.x;
    }
    if (b.max_y > h && v.y > 0.0) {
      fix.y = -2.0 * (b.max_y - h);
      v.y = -v.y;
    } else if (b.min_y < 0.0 && v.y < 0.0) {
      fix.y = -2.0 * b.min_y;
      v.y = -v.y;
    }
    o.translate(fix);
    o.set_velocity(v);
  }
  ++scenario.timestep;
}

PathMetrics metrics(std::span<const Point> trajectory, double reference_length, std::size_t collisions) {
  if (!(reference_length > 0.0)) throw std::invalid_argument("metrics: reference length must be positive");
  PathMetrics m;
  m.length = path_length(trajectory);
  m.optimality_gap = m.length / reference_length;
  m.smoothness = turning_cost(trajectory);
  m.collisions = collisions;
  return m;
}

double grid_reference_length(const ScenarioState& scenario) {
  const auto nx = static_cast<std::size_t>(std::floor(scenario.map.width)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor(scenario.map.height)) + 1;
  auto node = [&](std::size_t x, std::size_t y) { return y * nx + x; };
  auto snap = [&](Point p) {
    const auto x = static_cast<std::size_t>(std::clamp(std::lround(p.x), 0L, static_cast<long>(nx - 1)));
    const auto y = static_cast<std::size_t>(std::clamp(std::lround(p.y), 0L, static_cast<long>(ny - 1)));
    return std::pair{x, y};
  };

  std::vector<char> blocked(nx * ny, 0);
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x) {
      const Point p{static_cast<double>(x), static_cast<double>(y)};
      for (const auto& o : scenario.obstacles)
        if (o.contains(p)) {
          blocked[node(x, y)] = 1;
          break;
        }
    }

  const auto [sx, sy] = snap(scenario.robot_position);
  const auto [gx, gy] = snap(scenario.map.goal);
  if (blocked[node(sx, sy)] || blocked[node(gx, gy)]) return kInf;

  const double diag = std::numbers::sqrt2;
  auto heuristic = [&](std::size_t x, std::size_t y) {
    const double dx = std::abs(static_cast<double>(x) - static_cast<double>(gx));
    const double dy = std::abs(static_cast<double>(y) - static_cast<double>(gy));
    return std::max(dx, dy) + (diag - 1.0) * std::min(dx, dy);
  };

  std::vector<double> dist(nx * ny, kInf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[node(sx, sy)] = 0.0;
  open.push({heuristic(sx, sy), node(sx, sy)});
  const std::size_t target = node(gx, gy);
  while (!open.empty()) {
    const auto [f, id] = open.top();
    open.pop();
    if (id == target) return dist[id];
    const std::size_t x = id % nx;
    const std::size_t y = id / nx;
    if (f - heuristic(x, y) > dist[id] + 1e-9) continue;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const long xx = static_cast<long>(x) + dx;
        const long yy = static_cast<long>(y) + dy;
        if (xx < 0 || yy < 0 || xx >= static_cast<long>(nx) || yy >= static_cast<long>(ny)) continue;
        const std::size_t nid = node(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy));
        if (blocked[nid]) continue;
        // No corner cutting between two blocked cells.
        if (dx != 0 && dy != 0 &&
            (blocked[node(static_cast<std::size_t>(xx), y)] || blocked[node(x, static_cast<std::size_t>(yy))]))
          continue;
        const double nd = dist[id] + ((dx != 0 && dy != 0) ? diag : 1.0);
        if (nd < dist[nid]) {
          dist[nid] = nd;
          open.push({nd + heuristic(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy)), nid});
        }
      }
  }
  return kInf;
}

std::vector<std::vector<Obstacle>> forecast_obstacles(ScenarioState scenario, std::size_t steps) {
  std::vector<std::vector<Obstacle>> out;
  out.reserve(steps + 1);
  out.push_back(scenario.obstacles);
  for (std::size_t k = 0; k < steps; ++k) {
    advance_obstacles(scenario);
    out.push_back(scenario.obstacles);
  }
  return out;
}

std::size_t count_predicted_collisions(std::span<const Point> points,
                                       const std::vector<std::vector<Obstacle>>& forecast, double step_distance) {
  if (forecast.empty()) throw std::invalid_argument("count_predicted_collisions: empty forecast");
  if (!(step_distance > 0.0)) throw std::invalid_argument("count_predicted_collisions: step must be positive");
  const std::size_t n_obs = forecast.front().size();
  std::vector<char> hit(n_obs);
  std::size_t n = 0;
  double walked = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point a = points[i - 1];
    const Point b = points[i];
    const double seg = distance(a, b);
    std::fill(hit.begin(), hit.end(), 0);
    // Split the segment where the robot crosses a step boundary.
    double t0 = 0.0;
    while (true) {
      const auto k = static_cast<std::size_t>(std::floor(walked / step_distance + 1e-12));
      const double boundary = static_cast<double>(k + 1) * step_distance;
      const double t1 = seg > 0.0 ? std::min(1.0, t0 + (boundary - walked) / seg) : 1.0;
      const Point p{a.x + t0 * (b.x - a.x), a.y + t0 * (b.y - a.y)};
      const Point q{a.x + t1 * (b.x - a.x), a.y + t1 * (b.y - a.y)};
      const auto& layout = forecast[std::min(k, forecast.size() - 1)];
      for (std::size_t o = 0; o < n_obs; ++o)
        if (!hit[o] && layout[o].hits_segment(p, q)) hit[o] = 1;
      walked += (t1 - t0) * seg;
      t0 = t1;
      if (t1 >= 1.0) break;
    }
    n += static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  }
  return n;
}

std::vector<Point> advance_along(std::span<const Point> path, double remaining) {
  std::vector<Point> passed;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = distance(path[i - 1], path[i]);
    if (seg <= 0.0) continue;
    if (seg >= remaining) {
      const double t = remaining / seg;
      passed.push_back({path[i - 1].x + t * (path[i].x - path[i - 1].x),
                        path[i - 1].y + t * (path[i].y - path[i - 1].y)});
      return passed;
    }
    remaining -= seg;
    passed.push_back(path[i]);
  }
  return passed;
}

std::vector<Point> resample_interior(std::span<const Point> path, std::size_t count) {
  if (path.empty()) throw std::invalid_argument("resample_interior: empty polyline");
  const double total = path_length(path);
  std::vector<Point> out;
  out.reserve(count);
  if (total <= 0.0) {
    out.assign(count, path.front());
    return out;
  }
  std::size_t seg = 1;
  double walked = 0.0;
  for (std::size_t i = 1; i <= count; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(count + 1);
    while (seg + 1 < path.size() && walked + distance(path[seg - 1], path[seg]) < target) {
      walked += distance(path[seg - 1], path[seg]);
      ++seg;
    }
    const double len = distance(path[seg - 1], path[seg]);
    const double t = len > 0.0 ? std::clamp((target - walked) / len, 0.0, 1.0) : 0.0;
    out.push_back({path[seg - 1].x + t * (path[seg].x - path[seg - 1].x),
                   path[seg - 1].y + t * (path[seg].y - path[seg - 1].y)});
  }
  return out;
}

std::vector<Point> remaining_after(std::span<const Point> path, double remaining) {
  if (path.empty()) return {};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = distance(path[i - 1], path[i]);
    if (seg > remaining) {
      const double t = remaining / seg;
      std::vector<Point> rest{{path[i - 1].x + t * (path[i].x - path[i - 1].x),
                               path[i - 1].y + t * (path[i].y - path[i - 1].y)}};
      rest.insert(rest.end(), path.begin() + static_cast<std::ptrdiff_t>(i), path.end());
      return rest;
    }
    remaining -= seg;
  }
  return {path.back()};
}

namespace {

// Bends the guide waypoints sideways by a random half-sine and jitters each
// one; particle 0 keeps the guide unchanged. Velocities start at rest.
void warm_start_population(SwarmState& state, std::span<const Point> base, Point from, Point goal,
                           const PlannerSettings& settings, const Bounds& bounds, Rng& rng) {
  const double dx = goal.x - from.x;
  const double dy = goal.y - from.y;
  const double len = std::hypot(dx, dy);
  const Point normal = len > 0.0 ? Point{-dy / len, dx / len} : Point{std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2};
  const double bend_sd = settings.warm_spread * settings.search_radius;

  std::size_t flat = 0;
  for (auto& g : state.groups)
    for (auto& p : g.members) {
      const bool exact = flat++ == 0;
      const double bend = exact ? 0.0 : rng.normal(0.0, bend_sd);
      for (std::size_t i = 0; i < base.size(); ++i) {
        const double s = static_cast<double>(i + 1) / static_cast<double>(base.size() + 1);
        const double lateral = bend * std::sin(std::numbers::pi * s);
        const double jx = exact ? 0.0 : rng.normal(0.0, settings.warm_jitter);
        const double jy = exact ? 0.0 : rng.normal(0.0, settings.warm_jitter);
        p.position[2 * i] = std::clamp(base[i].x + lateral * normal.x + jx, bounds.lower(2 * i), bounds.upper(2 * i));
        p.position[2 * i + 1] =
            std::clamp(base[i].y + lateral * normal.y + jy, bounds.lower(2 * i + 1), bounds.upper(2 * i + 1));
      }
      p.pbest_position = p.position;
      std::fill(p.velocity.begin(), p.velocity.end(), 0.0);
    }
}

}  // namespace

SimulationResult simulate_replan(ScenarioState scenario, const OptimizerFactory& make_optimizer,
                                 const PlannerSettings& settings, std::uint64_t seed) {
  scenario.weights.validate();
  if (!scenario.map.inside(scenario.robot_position)) throw std::invalid_argument("simulate: robot outside the map");
  if (settings.waypoints == 0) throw std::invalid_argument("simulate: need at least one waypoint");

  SimulationResult result;
  result.reference_length = grid_reference_length(scenario);
  const Point goal = scenario.map.goal;

  Vec map_lower(2 * settings.waypoints, 0.0);
  Vec map_upper(2 * settings.waypoints);
  for (std::size_t i = 0; i < settings.waypoints; ++i) {
    map_upper[2 * i] = scenario.map.width;
    map_upper[2 * i + 1] = scenario.map.height;
  }
  const Bounds map_bounds(map_lower, map_upper);

  auto goal_reached = [&](Point p) {
    if (distance(p, goal) > settings.goal_tolerance) return false;
    return std::none_of(scenario.obstacles.begin(), scenario.obstacles.end(),
                        [&](const Obstacle& o) { return o.contains(p); });
  };

  Point robot = scenario.robot_position;
  std::vector<Point> guide;
  for (std::size_t cycle = 0; cycle < settings.horizon_steps; ++cycle) {
    result.obstacle_history.push_back(scenario.obstacles);
    result.robot_history.push_back(robot);
    if (goal_reached(robot)) {
      result.reached = true;
      break;
    }
    if (result.trajectory.empty()) {
      result.trajectory.push_back(robot);
      result.trajectory_timesteps.push_back(scenario.timestep);
    }

    ScenarioState snapshot = scenario;
    for (auto& o : snapshot.obstacles)
      if (o.is_dynamic()) {
        const double travel = settings.predict_motion ? 0.0 : std::hypot(o.velocity().x, o.velocity().y);
        o = o.inflated(travel + settings.clearance);
      }
    const Point from = robot;
    Objective objective;
    if (settings.predict_motion) {
      // Forecast the real obstacles (growing them first would shift where they bounce).
      auto forecast = std::make_shared<std::vector<std::vector<Obstacle>>>(
          forecast_obstacles(scenario, settings.forecast_steps));
      for (auto& layout : *forecast)
        for (auto& o : layout)
          if (o.is_dynamic()) o = o.inflated(settings.clearance);
      objective = [forecast, from, goal, &snapshot, &settings](std::span<const double> x) {
        const PathCandidate path = decode(x, from, goal, snapshot.map);
        const auto& w = snapshot.weights;
        const std::size_t n = count_predicted_collisions(path.points, *forecast, settings.step_distance);
        return w.alpha * path_length(path.points) + w.beta * obstacle_cost(n, w.k) +
               w.lambda * turning_cost(path.points);
      };
    } else {
      objective = [&snapshot, from, goal](std::span<const double> x) {
        return total_cost(decode(x, from, goal, snapshot.map), snapshot);
      };
    }
    // With a warm start the search box is centred on the guide waypoints, so
    // the wind's pull towards the box centre becomes a pull towards the guide.
    // Decoding still clamps every waypoint into the map.
    std::vector<Point> base;
    Bounds bounds = map_bounds;
    if (settings.warm_start) {
      if (guide.empty()) guide = {from, goal};
      base = resample_interior(guide, settings.waypoints);
      Vec lo(2 * settings.waypoints);
      Vec hi(2 * settings.waypoints);
      for (std::size_t i = 0; i < settings.waypoints; ++i) {
        lo[2 * i] = base[i].x - settings.search_radius;
        hi[2 * i] = base[i].x + settings.search_radius;
        lo[2 * i + 1] = base[i].y - settings.search_radius;
        hi[2 * i + 1] = base[i].y + settings.search_radius;
      }
      bounds = Bounds(std::move(lo), std::move(hi));
    }

    auto optimizer = make_optimizer();
    const std::uint64_t cycle_seed = Rng(seed).split(cycle).seed();
    Rng init = Rng(cycle_seed).split(0);
    auto state = initialize_population(bounds, settings.population, optimizer->group_count(), init,
                                       settings.vmax_fraction);
    if (settings.warm_start) warm_start_population(state, base, from, goal, settings, bounds, init);
    const auto record = run(*optimizer, objective, bounds, std::move(state), settings.iterations, cycle_seed);
    if (cycle == 0) result.first_plan_trace = record.trace;

    const PathCandidate plan = decode(record.final_best_position, from, goal, scenario.map);
    result.planned_paths.push_back(plan.points);

    std::vector<Point> moved = advance_along(plan.points, settings.step_distance);
    if (moved.empty()) moved.push_back(from);
    std::vector<Point> executed{from};
    executed.insert(executed.end(), moved.begin(), moved.end());
    result.collisions += count_collisions(executed, scenario.obstacles);
    for (const auto& p : moved)
      if (!(p == result.trajectory.back())) {
        result.trajectory.push_back(p);
        result.trajectory_timesteps.push_back(scenario.timestep + 1);
      }

    guide = remaining_after(plan.points, settings.step_distance);
    robot = moved.back();
    scenario.robot_position = robot;
    advance_obstacles(scenario);
  }
  if (!result.reached && goal_reached(robot)) {
    result.reached = true;
    result.obstacle_history.push_back(scenario.obstacles);
    result.robot_history.push_back(robot);
  }

  if (result.reference_length > 0.0 && std::isfinite(result.reference_length)) {
    result.metrics = metrics(result.trajectory, result.reference_length, result.collisions);
  } else {
    result.metrics.length = path_length(result.trajectory);
    result.metrics.smoothness = turning_cost(result.trajectory);
    result.metrics.collisions = result.collisions;
    result.metrics.optimality_gap = result.metrics.length > 0.0 ? kInf : 1.0;
  }
  return result;
}

void to_json(nlohmann::json& j, const Obstacle& o) {
  if (const auto* c = std::get_if<Circle>(&o.shape())) {
    j = {{"shape", "circle"}, {"center", {c->center.x, c->center.y}}, {"radius", c->radius}};
  } else {
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& p : std::get<Polygon>(o.shape()).vertices) verts.push_back({p.x, p.y});
    j = {{"shape", "polygon"}, {"vertices", verts}};
  }
  j["velocity"] = {o.velocity().x, o.velocity().y};
  j["is_dynamic"] = o.is_dynamic();
}

namespace {

Point point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("scenario: a point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Obstacle obstacle_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape").get<std::string>();
  const Point velocity = j.contains("velocity") ? point_from_json(j.at("velocity")) : Point{};
  const bool dynamic = j.value("is_dynamic", false);
  if (shape == "circle")
    return Obstacle(Circle{point_from_json(j.at("center")), j.at("radius").get<double>()}, velocity, dynamic);
  if (shape == "polygon") {
    Polygon p;
    for (const auto& v : j.at("vertices")) p.vertices.push_back(point_from_json(v));
    return Obstacle(std::move(p), velocity, dynamic);
  }
  if (shape == "rectangle") {
    const auto& r = j.at("rect");
    return Obstacle::rectangle(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                               r.at(3).get<double>(), velocity, dynamic);
  }
  throw std::invalid_argument("scenario: unknown obstacle shape '" + shape + "'");
}

nlohmann::json scenario_to_json(const ScenarioState& s) {
  nlohmann::json j;
  j["version"] = 1;
  j["map"] = {{"width", s.map.width}, {"height", s.map.height}};
  j["start"] = {s.map.start.x, s.map.start.y};
  j["goal"] = {s.map.goal.x, s.map.goal.y};
  j["weights"] = {{"alpha", s.weights.alpha}, {"beta", s.weights.beta}, {"lambda", s.weights.lambda},
                  {"k", s.weights.k}};
  j["obstacles"] = s.obstacles;
  return j;
}

ScenarioState scenario_from_json(const nlohmann::json& j) {
  ScenarioState s;
  if (j.contains("map")) {
    s.map.width = j["map"].value("width", s.map.width);
    s.map.height = j["map"].value("height", s.map.height);
  }
  if (j.contains("start")) s.map.start = point_from_json(j["start"]);
  if (j.contains("goal")) s.map.goal = point_from_json(j["goal"]);
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    s.weights.alpha = w.value("alpha", s.weights.alpha);
    s.weights.beta = w.value("beta", s.weights.beta);
    s.weights.lambda = w.value("lambda", s.weights.lambda);
    s.weights.k = w.value("k", s.weights.k);
  }
  for (const auto& o : j.value("obstacles", nlohmann::json::array())) s.obstacles.push_back(obstacle_from_json(o));
  s.robot_position = s.map.start;
  s.validate();
  return s;
}

ScenarioState load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("cannot parse scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

ScenarioState default_scenario() {
  ScenarioState s;
  s.obstacles = {
      Obstacle::rectangle(140, 150, 200, 210),
      Obstacle::rectangle(250, 60, 330, 110),
      Obstacle::circle({80, 70}, 20, {2, 0}, true),
      Obstacle::circle({110, 250}, 18, {0, -2}, true),
      Obstacle::circle({260, 230}, 25, {-1.4, 1.4}, true),
      Obstacle::circle({300, 300}, 15, {0, 2}, true),
      Obstacle::circle({60, 160}, 22, {2, 0}, true),
      Obstacle::circle({220, 320}, 16, {1.4, -1.4}, true),
  };
  s.robot_position = s.map.start;
  s.validate();
  return s;
}

}  // namespace windplan::plan
