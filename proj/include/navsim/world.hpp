#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navsim/types.hpp"

namespace navsim {

struct Obstacle {
    Vec center;
    double radius;  // r_oj, before inflation by the robot radius
};

// Sphere world: open ball workspace minus disjoint closed-ball obstacles.
// Immutable after construction; all queries are const and reentrant.
class World {
public:
    World(double workspace_radius, double robot_radius, int dim,
          std::vector<Obstacle> obstacles);
    // Obstacle-free unit workspace.
    World() : World(1.0, 0.0, 2, {}) {}

    int dim() const { return dim_; }
    double workspace_radius() const { return r_w_; }
    double robot_radius() const { return robot_r_; }
    std::size_t num_obstacles() const { return obstacles_.size(); }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    const Obstacle& obstacle(std::size_t j) const { return obstacles_.at(j); }

    // r_W - r: radius of the workspace available to the robot center.
    double effective_workspace_radius() const { return r_w_ - robot_r_; }
    // r_oj + r: obstacle radius as seen by the robot center.
    double inflated_radius(std::size_t j) const;
    // Smallest inflated obstacle radius; 0 for an obstacle-free world.
    double min_inflated_radius() const { return min_inflated_radius_; }

    // Squared-distance margin to obstacle j: |x-c_j|^2 - (r_oj+r)^2.
    double margin_obstacle(std::size_t j, const Vec& x) const;
    // Squared-distance margin to the workspace boundary: (r_W-r)^2 - |x|^2.
    double margin_workspace(const Vec& x) const;

    // All margins in one scan: out[0] = workspace margin, out[1..M] = obstacles.
    void margins(const Vec& x, std::vector<double>& out) const;
    // min over {workspace, obstacles} of the squared-distance margins.
    double min_margin(const Vec& x) const;
    bool in_free_space(const Vec& x) const;
    // Euclidean clearance (length units), positive iff in free space.
    double clearance(const Vec& x) const;
    // Number of margins <= threshold, workspace included.
    std::size_t count_active(const Vec& x, double threshold) const;

private:
    double r_w_;
    double robot_r_;
    int dim_;
    std::vector<Obstacle> obstacles_;
    // Structure-of-arrays mirror for the batch kernels.
    std::vector<double> cx_, cy_, cz_, rr_;
    double min_inflated_radius_ = 0.0;
};

struct FeasibilityViolation {
    std::string what;  // e.g. "obstacle 3 / obstacle 7"
    double slack;      // <= 0 when violated
};

struct FeasibilityReport {
    bool ok = false;
    std::vector<FeasibilityViolation> violations;
    double r_bar = 0.0;    // clearance margin (length)
    double r_bar_d = 0.0;  // goal clearance (length^2)
};

// Pairwise/boundary spacing checks plus the clearance margin and goal
// clearance used for barrier range selection. Never throws on infeasible
// geometry; the report carries the violations.
FeasibilityReport validate(const World& world, const Vec& goal);

// Rejection-sample an obstacle layout with the given statistics such that the
// spacing checks hold with slack > 2*r_bar and every protected point keeps
// Euclidean clearance >= protect_clearance from all inflated obstacles.
struct RandomWorldSpec {
    double workspace_radius = 11.0;
    double robot_radius = 0.0;
    int dim = 2;
    std::size_t num_obstacles = 60;
    double radius_min = 0.25;
    double radius_max = 0.75;
    double r_bar = 0.5;
    std::uint64_t seed = 1;
    std::vector<Vec> protected_points;
    double protect_clearance = 1.0;
};

World make_random_world(const RandomWorldSpec& spec);

}  // namespace navsim
