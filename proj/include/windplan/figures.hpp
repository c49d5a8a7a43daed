#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "windplan/pathplan.hpp"

namespace windplan::figures {

struct Series {
  std::string label;
  std::vector<double> values;  // one value per iteration
};

// Line chart of one or more curves. With log_scale the y axis shows log10 and
// non-positive values are floored at 1e-300.
void convergence_svg(std::ostream& out, const std::string& title, const std::vector<Series>& series, bool log_scale);

// Map frame: obstacles as they are at one timestep, the path travelled so far,
// the current plan (dashed) and the robot.
void snapshot_svg(std::ostream& out, const plan::MapSpec& map, const std::vector<plan::Obstacle>& obstacles,
                  std::span<const plan::Point> travelled, std::span<const plan::Point> planned, plan::Point robot,
                  const std::string& title);

}  // namespace windplan::figures
