#pragma once

#include <string>

#include "navsim/log_io.hpp"

namespace navsim {

// Self-contained SVG renderings of a run: paths and circles only.
//   trajectory — workspace circle, obstacle disks, start/goal markers, path
//   signals    — inputs and adaptation estimates against time
//   beta_min   — clearance signal against time
std::string render_svg(const TrajectoryLog& log, const PlotGeometry& geometry,
                       const std::string& kind);

}  // namespace navsim
