#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <variant>

#include "windplan/core.hpp"

namespace windplan::plan {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

struct MapSpec {
  double width = 366.0;
  double height = 366.0;
  Point start{10.0, 10.0};
  Point goal{356.0, 356.0};

  bool inside(Point p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

struct Circle {
  Point center;
  double radius = 1.0;
};

// Convex polygon, vertices in order (either orientation).
struct Polygon {
  std::vector<Point> vertices;
};

struct Box {
  double min_x, min_y, max_x, max_y;
};

class Obstacle {
 public:
  using Shape = std::variant<Circle, Polygon>;

  // Throws when a dynamic obstacle has zero velocity or the shape is degenerate.
  Obstacle(Shape shape, Point velocity, bool is_dynamic);

  static Obstacle circle(Point center, double radius, Point velocity = {}, bool is_dynamic = false);
  static Obstacle rectangle(double min_x, double min_y, double max_x, double max_y, Point velocity = {},
                            bool is_dynamic = false);

  const Shape& shape() const { return shape_; }
  Point velocity() const { return velocity_; }
  bool is_dynamic() const { return is_dynamic_; }
  Box bounding_box() const;

  // Strict interior.
  bool contains(Point p) const;
  // True if the segment enters the obstacle or touches/crosses its boundary.
  bool hits_segment(Point a, Point b) const;

  // Copy grown outward by `margin` (polygon corners mitred, so slightly conservative).
  Obstacle inflated(double margin) const;

  void translate(Point delta);
  void set_velocity(Point v) { velocity_ = v; }

 private:
  Shape shape_;
  Point velocity_;
  bool is_dynamic_;
};

struct CostWeights {
  double alpha = 0.5;   // length
  double beta = 0.4;    // collisions
  double lambda = 0.1;  // smoothness
  double k = 100.0;     // collision scale

  void validate() const;
};

struct ScenarioState {
  MapSpec map;
  std::vector<Obstacle> obstacles;
  std::size_t timestep = 0;
  Point robot_position{10.0, 10.0};
  CostWeights weights;

  // Start and goal inside the map and clear of every obstacle; weights valid.
  void validate() const;
};

// Full polyline: start, interior waypoints, goal.
struct PathCandidate {
  std::vector<Point> points;
};

PathCandidate decode(std::span<const double> encoded, Point start, Point goal, const MapSpec& map);
PathCandidate decode(std::span<const double> encoded, const MapSpec& map);

double path_length(std::span<const Point> points);

// Number of (segment, obstacle) pairs in contact.
std::size_t count_collisions(std::span<const Point> points, std::span<const Obstacle> obstacles);

double obstacle_cost(std::size_t collisions, double k);

// Sum of |theta_i - pi| over interior vertices, theta_i the angle between the
// incoming and outgoing segments. Zero-length segments are skipped.
double turning_cost(std::span<const Point> points);

struct CostBreakdown {
  double length = 0.0;
  std::size_t collisions = 0;
  double collision_cost = 0.0;
  double turning = 0.0;
  double total = 0.0;
};

CostBreakdown cost_breakdown(const PathCandidate& path, const ScenarioState& scenario);
double total_cost(const PathCandidate& path, const ScenarioState& scenario);

// Moves dynamic obstacles one timestep; a velocity component flips when the
// shape reaches the matching map border.
void advance_obstacles(ScenarioState& scenario);

// Obstacle layouts at the scenario's current step and the `steps` steps after
// it (steps + 1 layouts), following the same motion rule as advance_obstacles.
std::vector<std::vector<Obstacle>> forecast_obstacles(ScenarioState scenario, std::size_t steps);

// Collision pairs when the robot walks the path at `step_distance` per step:
// the stretch covered during step k is tested against forecast[k] (the last
// layout is reused past the end). A (segment, obstacle) pair counts once.
std::size_t count_predicted_collisions(std::span<const Point> points,
                                       const std::vector<std::vector<Obstacle>>& forecast, double step_distance);

struct PathMetrics {
  double length = 0.0;
  double optimality_gap = 0.0;
  double smoothness = 0.0;
  std::size_t collisions = 0;
};

PathMetrics metrics(std::span<const Point> trajectory, double reference_length, std::size_t collisions);

// Shortest 8-connected path on the 1-px grid over the obstacles as they are at
// the scenario's current timestep. Returns +inf when the goal is unreachable.
double grid_reference_length(const ScenarioState& scenario);

struct PlannerSettings {
  std::size_t waypoints = 20;
  std::size_t population = 1360;  // 8 groups x 170
  std::size_t iterations = 60;    // optimizer iterations per replan
  double step_distance = 25.0;
  double goal_tolerance = 5.0;
  std::size_t horizon_steps = 120;
  // Seed each replan's swarm around the previous plan (straight line on the
  // first cycle) instead of uniformly over the map.
  bool warm_start = true;
  double warm_spread = 0.5;   // std of the lateral bend, fraction of search_radius
  double warm_jitter = 4.0;   // per-waypoint noise, pixels
  // Check each stretch of a candidate path against where the obstacles will
  // be when the robot gets there. Without it the planner sees a frozen
  // snapshot and grows every dynamic obstacle by its per-step travel.
  bool predict_motion = true;
  std::size_t forecast_steps = 64;
  double clearance = 1.0;  // extra growth of dynamic obstacles while planning, pixels
  double search_radius = 90.0;  // half-width of the per-waypoint search box, pixels
  double vmax_fraction = 0.2;
};

struct SimulationResult {
  std::vector<Point> trajectory;  // executed points; empty when start == goal
  // Timestep at which the robot stood on each trajectory point (start = 0).
  std::vector<std::size_t> trajectory_timesteps;
  bool reached = false;
  std::size_t collisions = 0;
  PathMetrics metrics;
  double reference_length = 0.0;
  // Obstacles at every timestep the loop visited, plus the robot position then.
  std::vector<std::vector<Obstacle>> obstacle_history;
  std::vector<Point> robot_history;
  std::vector<std::vector<Point>> planned_paths;
  // Best cost per iteration of the first replan.
  std::vector<double> first_plan_trace;
};

SimulationResult simulate_replan(ScenarioState scenario, const OptimizerFactory& make_optimizer,
                                 const PlannerSettings& settings, std::uint64_t seed);

// `count` points evenly spaced by arc length strictly between the polyline's
// ends. A degenerate polyline yields copies of its first point.
std::vector<Point> resample_interior(std::span<const Point> path, std::size_t count);

// The part of a polyline still ahead after walking `distance` along it
// (starts at the reached point, ends at the original end point).
std::vector<Point> remaining_after(std::span<const Point> path, double distance);

// Walks `distance` along a polyline; returns the points passed through
// (excluding the first, including the end point).
std::vector<Point> advance_along(std::span<const Point> path, double distance);

void to_json(nlohmann::json& j, const Obstacle& o);
Obstacle obstacle_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioState& s);
ScenarioState scenario_from_json(const nlohmann::json& j);
ScenarioState load_scenario(const std::filesystem::path& path);

// The versioned default world: 366 x 366 map, six dynamic circles, two static rectangles.
ScenarioState default_scenario();

}  // namespace windplan::plan
