#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navsim/log_io.hpp"
#include "navsim/sim.hpp"

namespace navsim {

// Parse/schema problems (malformed document, unknown keys, wrong types).
// Geometry/assumption failures surface as std::invalid_argument instead.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadedScenario {
    bool is_fleet = false;
    std::optional<SingleScenario> single;
    std::optional<FleetScenario> fleet;
    PlotGeometry geometry;
    std::string out_dir = ".";
    std::string prefix = "run";
};

// Validates the schema (unknown keys rejected) and builds the scenario.
// Lengths are meters, times seconds, angles radians.
LoadedScenario parse_config(const std::string& json_text);

// Schema-checked canonical re-emission (sorted keys, two-space indent).
std::string canonicalize_config(const std::string& json_text);

// Apply dotted-path overrides ("controller.k_v=10", "sim.seed=3") on the raw
// document; values parse as JSON scalars, falling back to strings.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

}  // namespace navsim
