#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "navsim/barrier.hpp"
#include "navsim/controller.hpp"
#include "navsim/plant.hpp"
#include "navsim/world.hpp"

namespace navsim {

struct FleetAgentSpec {
    double radius = 1.0;
    Vec start;
    Vec goal;
    double k1 = 0.04;
    double k2 = 5.0;
    ControllerGains gains;
    PlantParams plant;
    EstimatorState est0;
    double sensing_radius = 0.0;
};

// Prioritized leader-follower fleet over a shared sphere world. The follower
// keep-out inflations exceed the leader's by 2 r_max + 2 r_bar, which is what
// lets the leader treat everyone else as static obstacles.
struct Fleet {
    World world;  // static obstacles; robot_radius is 0, agent radii live here
    std::vector<FleetAgentSpec> agents;
    double r_bar = 0.0;
    double eps = 0.1;
    std::vector<std::size_t> priority;  // agent ids, highest priority first
    double r_max = 0.0;
    BarrierSpec agent_barrier{0.0};     // shared tau for inter-agent terms
    BarrierSpec obstacle_barrier{0.0};  // shared tau for obstacle/goal terms
};

struct FleetValidation {
    bool ok = false;
    std::vector<FeasibilityViolation> violations;
    double tau_bound = 0.0;  // min(r_bar^2, goal-quiet margin over agents)
};

// Assumption checks (goal/initial spacing with the r_bar slack, sensing
// adequacy) plus the shared barrier-range bound. When select_ranges is set the
// fleet's barrier specs are assigned 0.99 * tau_bound.
FleetValidation validate_fleet(Fleet& fleet, bool select_ranges);

// Default priority: descending initial distance to goal.
std::vector<std::size_t> default_priority(const Fleet& fleet);

struct FleetPhase {
    std::size_t rank = 0;               // how many agents have been promoted
    std::size_t leader = 0;             // agent id of the current leader
    std::vector<bool> frozen;           // by agent id
    std::vector<Vec> frozen_pos;        // valid where frozen
    std::vector<Obstacle> extra_obstacles;  // frozen agents, in freeze order
    bool complete = false;              // all agents promoted
};

FleetPhase initial_phase(const Fleet& fleet);

struct FleetProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AgentDistance {
    enum class Kind { workspace, obstacle, agent, goal_exclusion };
    Kind kind;
    std::size_t index;  // obstacle index / agent id / goal owner id
    double value;       // squared-distance margin
};

std::vector<AgentDistance> agent_distances(const Fleet& fleet, const FleetPhase& phase,
                                           std::size_t i, const std::vector<Vec>& pos);

// phi_i: goal quadratic + barriers (inter-agent terms un-doubled).
double agent_phi(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                 const std::vector<Vec>& pos);
double agent_phi_normalized(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                            const std::vector<Vec>& pos);

// Gradient of the control potential (inter-agent terms doubled) w.r.t. x_i.
Vec agent_grad_tilde(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                     const std::vector<Vec>& pos, bool sensing_filter = true);

struct AgentEval {
    Vec u;
    Vec v_des;
    Vec e_v;
    double m_hat_dot = 0.0;
    double alpha_hat_dot = 0.0;
    double min_margin = 0.0;
};

// Per-agent control + adaptation from a state snapshot. With sensing_filter
// set, agents beyond the sensing radius are skipped; beyond-plateau barrier
// terms vanish identically, so this matches the unfiltered evaluation.
AgentEval agent_control(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                        const std::vector<Vec>& pos, const std::vector<Vec>& vel,
                        const EstimatorState& est, bool sensing_filter = true);

// Freeze the current leader at its position (must be within eps of its goal),
// append it to the obstacle list and hand leadership to the next agent in
// priority. Throws FleetProtocolError if a remaining agent's rebuilt free
// space no longer contains it.
FleetPhase advance_phase(const Fleet& fleet, const FleetPhase& phase,
                         const std::vector<Vec>& pos);

// Paper-style fleet safety signal: minimum surface distance over agent/agent
// and agent/obstacle pairs plus the workspace boundary (length units).
double beta_min(const Fleet& fleet, const std::vector<Vec>& pos);

}  // namespace navsim
