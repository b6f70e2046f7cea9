#include "navsim/multiagent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace navsim {

namespace {

// One barrier term of an agent's potential. Static terms have a fixed center;
// agent terms move and carry the counterpart id for relative velocities.
struct Term {
    AgentDistance::Kind kind;
    std::size_t index;
    Vec center;
    double inflation;        // summed radii entering the squared margin
    const BarrierSpec* spec;
    double multiplier;       // 2 for inter-agent terms in the control potential
    bool workspace;          // d = inflation^2 - |x|^2 instead of |x-c|^2 - inflation^2
    bool moving;
};

template <typename Fn>
void for_each_term(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                   const std::vector<Vec>& pos, bool sensing_filter, Fn&& fn) {
    const auto& me = fleet.agents[i];
    const bool lead = (phase.leader == i);
    const double extra = lead ? 0.0 : 2.0 * fleet.r_max + 2.0 * fleet.r_bar;

    Term t;
    t.spec = &fleet.obstacle_barrier;
    t.multiplier = 1.0;
    t.moving = false;

    t.kind = AgentDistance::Kind::workspace;
    t.index = 0;
    t.workspace = true;
    t.center = Vec::Zero(fleet.world.dim());
    t.inflation = fleet.world.workspace_radius() - me.radius - extra;
    fn(t);

    t.workspace = false;
    t.kind = AgentDistance::Kind::obstacle;
    for (std::size_t k = 0; k < fleet.world.num_obstacles(); ++k) {
        t.index = k;
        t.center = fleet.world.obstacle(k).center;
        t.inflation = me.radius + fleet.world.obstacle(k).radius + extra;
        fn(t);
    }
    for (std::size_t k = 0; k < phase.extra_obstacles.size(); ++k) {
        t.index = fleet.world.num_obstacles() + k;
        t.center = phase.extra_obstacles[k].center;
        t.inflation = me.radius + phase.extra_obstacles[k].radius + extra;
        fn(t);
    }

    t.kind = AgentDistance::Kind::agent;
    t.spec = &fleet.agent_barrier;
    t.multiplier = 2.0;
    t.moving = true;
    for (std::size_t j = 0; j < fleet.agents.size(); ++j) {
        if (j == i || phase.frozen[j]) continue;
        if (sensing_filter && (pos[i] - pos[j]).norm() > me.sensing_radius) continue;
        t.index = j;
        t.center = pos[j];
        // The leader pair uses the tight inflation from either side.
        t.inflation = (lead || phase.leader == j)
                          ? me.radius + fleet.agents[j].radius
                          : me.radius + fleet.agents[j].radius + extra;
        fn(t);
    }

    if (!lead) {
        t.kind = AgentDistance::Kind::goal_exclusion;
        t.spec = &fleet.obstacle_barrier;
        t.multiplier = 1.0;
        t.moving = false;
        // Active agents with strictly higher priority than i.
        for (std::size_t r = 0; r < fleet.priority.size(); ++r) {
            const std::size_t j = fleet.priority[r];
            if (j == i) break;
            if (phase.frozen[j]) continue;
            t.index = j;
            t.center = fleet.agents[j].goal;
            t.inflation =
                me.radius + fleet.agents[j].radius + 2.0 * fleet.r_max + 2.0 * fleet.r_bar +
                fleet.eps;
            fn(t);
        }
    }
}

double term_margin(const Term& t, const Vec& xi) {
    if (t.workspace) return t.inflation * t.inflation - xi.squaredNorm();
    return (xi - t.center).squaredNorm() - t.inflation * t.inflation;
}

}  // namespace

std::vector<AgentDistance> agent_distances(const Fleet& fleet, const FleetPhase& phase,
                                           std::size_t i, const std::vector<Vec>& pos) {
    if (i >= fleet.agents.size()) throw std::out_of_range("fleet: agent index");
    if (phase.frozen[i]) throw std::invalid_argument("fleet: agent is frozen");
    std::vector<AgentDistance> out;
    for_each_term(fleet, phase, i, pos, false, [&](const Term& t) {
        out.push_back({t.kind, t.index, term_margin(t, pos[i])});
    });
    return out;
}

double agent_phi(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                 const std::vector<Vec>& pos) {
    const auto& me = fleet.agents[i];
    double barriers = 0.0;
    for_each_term(fleet, phase, i, pos, false, [&](const Term& t) {
        const double d = term_margin(t, pos[i]);
        if (d <= 0.0) throw std::domain_error("fleet: agent outside its free space");
        barriers += beta(*t.spec, d);
    });
    return me.k1 * (pos[i] - me.goal).squaredNorm() + me.k2 * barriers;
}

double agent_phi_normalized(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                            const std::vector<Vec>& pos) {
    std::size_t terms = 0;
    for_each_term(fleet, phase, i, pos, false, [&](const Term&) { ++terms; });
    return agent_phi(fleet, phase, i, pos) -
           fleet.agents[i].k2 * static_cast<double>(terms);
}

namespace {

struct GradEval {
    Vec grad;
    Vec hess_dot_v;  // H_static v_i + sum_j H_pair (v_i - v_j)
    double min_margin;
};

GradEval grad_eval(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                   const std::vector<Vec>& pos, const std::vector<Vec>* vel,
                   bool sensing_filter) {
    const auto& me = fleet.agents[i];
    const int n = fleet.world.dim();
    GradEval out;
    out.grad = 2.0 * me.k1 * (pos[i] - me.goal);
    out.hess_dot_v = vel ? Vec(2.0 * me.k1 * (*vel)[i]) : Vec(Vec::Zero(n));
    out.min_margin = std::numeric_limits<double>::infinity();

    for_each_term(fleet, phase, i, pos, sensing_filter, [&](const Term& t) {
        const double d = term_margin(t, pos[i]);
        out.min_margin = std::min(out.min_margin, d);
        if (d <= 0.0) throw std::domain_error("fleet: agent outside its free space");
        if (d >= t.spec->tau) return;
        const double b1 = beta_prime(*t.spec, d);
        const double coeff = me.k2 * t.multiplier;
        if (t.workspace) {
            out.grad -= 2.0 * coeff * b1 * pos[i];
            if (vel) {
                const double b2 = beta_second(*t.spec, d);
                const Vec& vi = (*vel)[i];
                out.hess_dot_v += coeff * (4.0 * b2 * pos[i].dot(vi) * pos[i] - 2.0 * b1 * vi);
            }
            return;
        }
        const Vec r = pos[i] - t.center;
        out.grad += 2.0 * coeff * b1 * r;
        if (vel) {
            const Vec vrel = t.moving ? Vec((*vel)[i] - (*vel)[t.index]) : (*vel)[i];
            const double b2 = beta_second(*t.spec, d);
            out.hess_dot_v += coeff * (4.0 * b2 * r.dot(vrel) * r + 2.0 * b1 * vrel);
        }
    });
    return out;
}

}  // namespace

Vec agent_grad_tilde(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                     const std::vector<Vec>& pos, bool sensing_filter) {
    return grad_eval(fleet, phase, i, pos, nullptr, sensing_filter).grad;
}

AgentEval agent_control(const Fleet& fleet, const FleetPhase& phase, std::size_t i,
                        const std::vector<Vec>& pos, const std::vector<Vec>& vel,
                        const EstimatorState& est, bool sensing_filter) {
    const auto& me = fleet.agents[i];
    const GradEval ge = grad_eval(fleet, phase, i, pos, &vel, sensing_filter);

    AgentEval out;
    out.v_des = -ge.grad;
    const Vec v_des_dot = -ge.hess_dot_v;
    out.e_v = vel[i] - out.v_des;
    out.u = -me.gains.k_phi * ge.grad + est.m_hat * (v_des_dot + me.plant.g) -
            (me.gains.k_v + 1.5 * est.alpha_hat) * out.e_v;
    out.m_hat_dot =
        -me.gains.k_m * out.e_v.dot(v_des_dot + me.plant.g) - me.gains.sigma_m * est.m_hat;
    out.alpha_hat_dot =
        me.gains.k_alpha * out.e_v.squaredNorm() - me.gains.sigma_alpha * est.alpha_hat;
    out.min_margin = ge.min_margin;
    return out;
}

std::vector<std::size_t> default_priority(const Fleet& fleet) {
    std::vector<std::size_t> order(fleet.agents.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return (fleet.agents[a].start - fleet.agents[a].goal).norm() >
               (fleet.agents[b].start - fleet.agents[b].goal).norm();
    });
    return order;
}

FleetPhase initial_phase(const Fleet& fleet) {
    FleetPhase ph;
    ph.rank = 0;
    ph.leader = fleet.priority.at(0);
    ph.frozen.assign(fleet.agents.size(), false);
    ph.frozen_pos.assign(fleet.agents.size(), Vec());
    return ph;
}

FleetPhase advance_phase(const Fleet& fleet, const FleetPhase& phase,
                         const std::vector<Vec>& pos) {
    const std::size_t lead = phase.leader;
    const double goal_err = (pos[lead] - fleet.agents[lead].goal).norm();
    if (goal_err > fleet.eps)
        throw FleetProtocolError("advance_phase: leader not within eps of its goal");

    FleetPhase next = phase;
    next.rank = phase.rank + 1;
    next.frozen[lead] = true;
    next.frozen_pos[lead] = pos[lead];
    next.extra_obstacles.push_back({pos[lead], fleet.agents[lead].radius});

    if (next.rank == fleet.agents.size()) {
        next.complete = true;
        return next;
    }
    next.leader = fleet.priority.at(next.rank);

    // Every remaining agent must still sit inside its rebuilt free space.
    for (std::size_t i = 0; i < fleet.agents.size(); ++i) {
        if (next.frozen[i]) continue;
        for (const AgentDistance& d : agent_distances(fleet, next, i, pos)) {
            if (d.value <= 0.0)
                throw FleetProtocolError("advance_phase: agent " + std::to_string(i) +
                                         " left outside its rebuilt free space");
        }
    }
    return next;
}

double beta_min(const Fleet& fleet, const std::vector<Vec>& pos) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fleet.agents.size(); ++i) {
        m = std::min(m, fleet.world.workspace_radius() - fleet.agents[i].radius -
                            pos[i].norm());
        for (std::size_t j = i + 1; j < fleet.agents.size(); ++j) {
            m = std::min(m, (pos[i] - pos[j]).norm() -
                                (fleet.agents[i].radius + fleet.agents[j].radius));
        }
        for (std::size_t k = 0; k < fleet.world.num_obstacles(); ++k) {
            m = std::min(m, (pos[i] - fleet.world.obstacle(k).center).norm() -
                                (fleet.agents[i].radius + fleet.world.obstacle(k).radius));
        }
    }
    return m;
}

FleetValidation validate_fleet(Fleet& fleet, bool select_ranges) {
    FleetValidation out;
    const std::size_t n_agents = fleet.agents.size();
    const World& w = fleet.world;
    auto record = [&](const std::string& what, double slack) {
        if (slack <= 0.0) out.violations.push_back({what, slack});
    };

    if (fleet.priority.empty()) fleet.priority = default_priority(fleet);
    fleet.r_max = 0.0;
    for (const auto& a : fleet.agents) fleet.r_max = std::max(fleet.r_max, a.radius);

    const double rb2 = 2.0 * fleet.r_bar;
    for (std::size_t i = 0; i < n_agents; ++i) {
        const auto& ai = fleet.agents[i];
        for (std::size_t k = 0; k < w.num_obstacles(); ++k) {
            const auto& ob = w.obstacle(k);
            record("goal " + std::to_string(i) + " / obstacle " + std::to_string(k),
                   (ai.goal - ob.center).norm() -
                       (ob.radius + ai.radius + 2.0 * fleet.r_max + fleet.eps + rb2));
            record("start " + std::to_string(i) + " / obstacle " + std::to_string(k),
                   (ai.start - ob.center).norm() -
                       (ob.radius + ai.radius + 2.0 * fleet.r_max + rb2));
        }
        record("goal " + std::to_string(i) + " / boundary",
               (w.workspace_radius() - ai.goal.norm()) -
                   (ai.radius + 2.0 * fleet.r_max + fleet.eps + rb2));
        record("start " + std::to_string(i) + " / boundary",
               (w.workspace_radius() - ai.start.norm()) -
                   (ai.radius + 2.0 * fleet.r_max + rb2));
        for (std::size_t j = 0; j < n_agents; ++j) {
            if (j == i) continue;
            const auto& aj = fleet.agents[j];
            if (j > i) {
                record("goal " + std::to_string(i) + " / goal " + std::to_string(j),
                       (ai.goal - aj.goal).norm() -
                           (ai.radius + aj.radius + 2.0 * fleet.r_max + 2.0 * fleet.eps + rb2));
                record("start " + std::to_string(i) + " / start " + std::to_string(j),
                       (ai.start - aj.start).norm() -
                           (ai.radius + aj.radius + 2.0 * fleet.r_max + rb2));
            }
            record("goal " + std::to_string(i) + " / start " + std::to_string(j),
                   (ai.goal - aj.start).norm() -
                       (ai.radius + aj.radius + 2.0 * fleet.r_max + fleet.eps + rb2));
        }
    }

    // Goal-quiet margin: leader-view distances of each agent's goal in the
    // terminal configuration (higher-priority agents frozen at their goals).
    double quiet = fleet.r_bar * fleet.r_bar;
    for (std::size_t r = 0; r < fleet.priority.size(); ++r) {
        const std::size_t i = fleet.priority[r];
        const auto& ai = fleet.agents[i];
        const double rw = w.workspace_radius() - ai.radius;
        quiet = std::min(quiet, rw * rw - ai.goal.squaredNorm());
        for (std::size_t k = 0; k < w.num_obstacles(); ++k) {
            const auto& ob = w.obstacle(k);
            const double infl = ai.radius + ob.radius;
            quiet = std::min(quiet, (ai.goal - ob.center).squaredNorm() - infl * infl);
        }
        for (std::size_t rr = 0; rr < r; ++rr) {
            const std::size_t j = fleet.priority[rr];
            const double infl = ai.radius + fleet.agents[j].radius;
            quiet = std::min(quiet,
                             (ai.goal - fleet.agents[j].goal).squaredNorm() - infl * infl);
        }
    }
    out.tau_bound = std::min(fleet.r_bar * fleet.r_bar, quiet);
    if (out.tau_bound <= 0.0) out.violations.push_back({"barrier range bound", out.tau_bound});

    if (select_ranges && out.tau_bound > 0.0) {
        fleet.agent_barrier.tau = 0.99 * out.tau_bound;
        fleet.obstacle_barrier.tau = 0.99 * out.tau_bound;
    }

    // Sensing adequacy for the selected range: any pair term below its plateau
    // must be inside the sensing radius.
    const double tau = fleet.agent_barrier.tau;
    if (tau > 0.0) {
        for (std::size_t i = 0; i < n_agents; ++i) {
            for (std::size_t j = 0; j < n_agents; ++j) {
                if (i == j) continue;
                const double reach = std::sqrt(tau) + fleet.agents[i].radius +
                                     fleet.agents[j].radius + 2.0 * fleet.r_max + rb2;
                record("sensing radius agent " + std::to_string(i) + " vs " + std::to_string(j),
                       fleet.agents[i].sensing_radius - reach);
            }
        }
    }

    out.ok = out.violations.empty();
    return out;
}

}  // namespace navsim
