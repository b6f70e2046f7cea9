#pragma once

#include <string>
#include <vector>

#include "navsim/sim.hpp"

namespace navsim {

// Geometry bundle stored next to each run so plots are self-contained.
struct PlotGeometry {
    std::string kind = "sphere";  // sphere | star | fleet
    double workspace_radius = 0.0;
    int dim = 2;
    std::vector<Obstacle> obstacles;
    std::vector<std::vector<Vec>> star_boundaries;  // sampled polylines
    std::vector<Vec> starts;
    std::vector<Vec> goals;
    std::vector<double> agent_radii;
};

// CSV with a single header row; values at 17 significant digits so parsing
// recovers the doubles exactly.
std::string to_csv(const TrajectoryLog& log);
TrajectoryLog parse_csv(const std::string& text);

std::string summary_to_json(const Summary& summary, const std::vector<Event>& events,
                            const PlotGeometry& geometry);
void parse_summary_json(const std::string& text, Summary& summary, std::vector<Event>& events,
                        PlotGeometry& geometry);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace navsim
