#include "navsim/world.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "navsim/kernels.hpp"

namespace navsim {

World::World(double workspace_radius, double robot_radius, int dim,
             std::vector<Obstacle> obstacles)
    : r_w_(workspace_radius),
      robot_r_(robot_radius),
      dim_(dim),
      obstacles_(std::move(obstacles)) {
    if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("world: dim must be 2 or 3");
    if (r_w_ <= 0.0) throw std::invalid_argument("world: workspace radius must be positive");
    if (robot_r_ < 0.0) throw std::invalid_argument("world: robot radius must be nonnegative");
    if (r_w_ - robot_r_ <= 0.0) throw std::invalid_argument("world: robot does not fit in workspace");

    const std::size_t m = obstacles_.size();
    cx_.resize(m);
    cy_.resize(m);
    cz_.resize(dim_ == 3 ? m : 0);
    rr_.resize(m);
    min_inflated_radius_ = m ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const Obstacle& o = obstacles_[j];
        if (o.center.size() != dim_)
            throw std::invalid_argument("world: obstacle center dimension mismatch");
        if (o.radius <= 0.0) throw std::invalid_argument("world: obstacle radius must be positive");
        if (o.center.norm() >= r_w_)
            throw std::invalid_argument("world: obstacle center outside workspace");
        cx_[j] = o.center[0];
        cy_[j] = o.center[1];
        if (dim_ == 3) cz_[j] = o.center[2];
        const double ri = o.radius + robot_r_;
        rr_[j] = ri * ri;
        min_inflated_radius_ = std::min(min_inflated_radius_, ri);
    }
}

double World::inflated_radius(std::size_t j) const {
    return obstacles_.at(j).radius + robot_r_;
}

double World::margin_obstacle(std::size_t j, const Vec& x) const {
    if (j >= obstacles_.size()) throw std::out_of_range("world: obstacle index");
    if (x.size() != dim_) throw std::invalid_argument("world: query dimension mismatch");
    return (x - obstacles_[j].center).squaredNorm() - rr_[j];
}

double World::margin_workspace(const Vec& x) const {
    if (x.size() != dim_) throw std::invalid_argument("world: query dimension mismatch");
    const double rw = r_w_ - robot_r_;
    return rw * rw - x.squaredNorm();
}

void World::margins(const Vec& x, std::vector<double>& out) const {
    out.resize(obstacles_.size() + 1);
    out[0] = margin_workspace(x);
    kernels::batch_margin(cx_.data(), cy_.data(), dim_ == 3 ? cz_.data() : nullptr,
                          rr_.data(), obstacles_.size(), x[0], x[1],
                          dim_ == 3 ? x[2] : 0.0, out.data() + 1);
}

double World::min_margin(const Vec& x) const {
    static thread_local std::vector<double> buf;
    margins(x, buf);
    return kernels::min_element(buf.data(), buf.size()).value;
}

bool World::in_free_space(const Vec& x) const { return min_margin(x) > 0.0; }

double World::clearance(const Vec& x) const {
    if (x.size() != dim_) throw std::invalid_argument("world: query dimension mismatch");
    double c = (r_w_ - robot_r_) - x.norm();
    for (std::size_t j = 0; j < obstacles_.size(); ++j) {
        c = std::min(c, (x - obstacles_[j].center).norm() - (obstacles_[j].radius + robot_r_));
    }
    return c;
}

std::size_t World::count_active(const Vec& x, double threshold) const {
    static thread_local std::vector<double> buf;
    margins(x, buf);
    return kernels::count_leq(buf.data(), buf.size(), threshold);
}

FeasibilityReport validate(const World& world, const Vec& goal) {
    FeasibilityReport rep;
    const auto& obs = world.obstacles();
    const double r = world.robot_radius();
    double min_slack = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < obs.size(); ++i) {
        for (std::size_t j = i + 1; j < obs.size(); ++j) {
            const double slack = (obs[i].center - obs[j].center).norm() -
                                 (obs[i].radius + obs[j].radius + 2.0 * r);
            min_slack = std::min(min_slack, slack);
            if (slack <= 0.0)
                rep.violations.push_back({"obstacle " + std::to_string(i) + " / obstacle " +
                                              std::to_string(j),
                                          slack});
        }
        const double slack = (world.workspace_radius() - obs[i].center.norm()) -
                             (obs[i].radius + 2.0 * r);
        min_slack = std::min(min_slack, slack);
        if (slack <= 0.0)
            rep.violations.push_back({"obstacle " + std::to_string(i) + " / boundary", slack});
    }

    if (obs.empty()) {
        // No spacing constraints; any positive margin works.
        rep.r_bar = 0.5 * world.effective_workspace_radius();
    } else {
        rep.r_bar = 0.99 * 0.5 * min_slack;
    }

    if (goal.size() == world.dim()) {
        double rd = world.margin_workspace(goal);
        for (std::size_t j = 0; j < obs.size(); ++j)
            rd = std::min(rd, world.margin_obstacle(j, goal));
        rep.r_bar_d = rd;
        if (rd <= 0.0) rep.violations.push_back({"goal / free space", rd});
    } else {
        rep.violations.push_back({"goal dimension", -1.0});
    }

    rep.ok = rep.violations.empty() && rep.r_bar > 0.0;
    if (!rep.violations.empty()) rep.r_bar = std::min(rep.r_bar, 0.0);  // no usable margin
    return rep;
}

World make_random_world(const RandomWorldSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> rad(spec.radius_min, spec.radius_max);

    auto sample_point = [&]() {
        // Uniform in the ball of radius workspace_radius.
        Vec p(spec.dim);
        while (true) {
            for (int k = 0; k < spec.dim; ++k) p[k] = 2.0 * unit(rng) - 1.0;
            if (p.squaredNorm() <= 1.0) break;
        }
        return Vec(p * spec.workspace_radius);
    };

    std::vector<Obstacle> placed;
    placed.reserve(spec.num_obstacles);
    const double two_rbar = 2.0 * spec.r_bar;
    const std::size_t max_tries = 200000;

    for (std::size_t j = 0; j < spec.num_obstacles; ++j) {
        bool ok = false;
        for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
            Obstacle cand{sample_point(), rad(rng)};
            const double boundary_slack = (spec.workspace_radius - cand.center.norm()) -
                                          (cand.radius + 2.0 * spec.robot_radius);
            if (boundary_slack <= two_rbar) continue;
            bool clash = false;
            for (const auto& o : placed) {
                const double slack = (cand.center - o.center).norm() -
                                     (cand.radius + o.radius + 2.0 * spec.robot_radius);
                if (slack <= two_rbar) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            for (const auto& p : spec.protected_points) {
                if ((cand.center - p).norm() - (cand.radius + spec.robot_radius) <
                    spec.protect_clearance) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            placed.push_back(std::move(cand));
            ok = true;
            break;
        }
        if (!ok)
            throw std::runtime_error(
                "make_random_world: could not place obstacle " + std::to_string(j) +
                "; workspace too crowded for the requested statistics");
    }
    return World(spec.workspace_radius, spec.robot_radius, spec.dim, std::move(placed));
}

}  // namespace navsim
