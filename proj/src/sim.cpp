#include "navsim/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace navsim {

const char* event_kind_name(Event::Kind k) {
    switch (k) {
        case Event::Kind::converged: return "converged";
        case Event::Kind::collision: return "collision";
        case Event::Kind::promotion: return "phase_promotion";
        case Event::Kind::horizon: return "horizon";
        case Event::Kind::aborted: return "aborted";
    }
    return "?";
}

std::ptrdiff_t TrajectoryLog::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

namespace {

constexpr double kAscentTolerance = 1e-6;

std::size_t step_count(const SimParams& p) {
    if (p.h <= 0.0 || p.horizon <= p.h) throw std::invalid_argument("sim: need h > 0, T > h");
    return static_cast<std::size_t>(std::llround(p.horizon / p.h));
}

}  // namespace

RunResult run(const SingleScenario& sc) {
    if (sc.world.has_value() == sc.map.has_value())
        throw std::invalid_argument("sim: scenario needs exactly one of world/map");
    sc.gains.validate();

    const bool star = sc.map.has_value();
    const World world = star ? sc.map->target_world() : *sc.world;
    const int n = world.dim();
    const Vec field_goal = star ? sc.map->map(sc.goal) : sc.goal;

    const FeasibilityReport rep = validate(world, field_goal);
    if (!rep.ok) throw std::invalid_argument("sim: world infeasible for this goal");

    RunResult res;
    Summary& sum = res.summary;
    BarrierSpec spec{0.0};
    if (sc.tau_override) {
        spec.tau = *sc.tau_override;
    } else {
        const TauSelection sel =
            select_tau(rep, sc.k1, sc.k2, world.effective_workspace_radius(),
                       world.min_inflated_radius(), world.num_obstacles());
        spec = sel.spec;
        sum.d_star2 = sel.d_star2;
        if (sel.degenerate) sum.warnings.push_back("saddle non-degeneracy threshold unachievable");
    }
    sum.tau = spec.tau;

    if (star) {
        const StarMapReport mrep = validate_map(*sc.map, 160);
        if (!mrep.ok) throw std::invalid_argument("sim: star map failed validation");
        if (!sc.map->in_free_space(sc.start))
            throw std::invalid_argument("sim: start outside star free space");
    } else if (!world.in_free_space(sc.start)) {
        throw std::invalid_argument("sim: start outside free space");
    }
    if (sc.gains.k_phi <= 0.5 * sc.plant.alpha_true)
        sum.warnings.push_back("k_phi <= alpha/2: descent condition not certified (sufficient only)");

    const NavField field(world, spec, field_goal, sc.k1, sc.k2);

    auto control_eval = [&](const Vec& x, const Vec& v, const EstimatorState& est) {
        return star ? star_control_and_adapt(sc.gains, field, *sc.map, x, v, est, sc.plant.g)
                    : control_and_adapt(sc.gains, field, x, v, est, sc.plant.g);
    };

    auto deriv = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Vec x = y.segment(0, n);
        const Vec v = y.segment(n, n);
        const EstimatorState est{y[2 * n], y[2 * n + 1]};
        const ControlEval ce = control_eval(x, v, est);
        Vec xdot, vdot;
        plant_derivative(sc.plant, x, v, ce.u, t, xdot, vdot);
        dy.segment(0, n) = xdot;
        dy.segment(n, n) = vdot;
        dy[2 * n] = ce.m_hat_dot;
        dy[2 * n + 1] = ce.alpha_hat_dot;
    };

    TrajectoryLog& log = res.log;
    log.columns = {"t"};
    for (int i = 1; i <= n; ++i) log.columns.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) log.columns.push_back("v" + std::to_string(i));
    for (int i = 1; i <= n; ++i) log.columns.push_back("u" + std::to_string(i));
    log.columns.insert(log.columns.end(), {"m_hat", "alpha_hat", "V", "min_clearance"});

    Eigen::VectorXd y(2 * n + 2);
    y.segment(0, n) = sc.start;
    y.segment(n, n) = sc.v0.size() == n ? sc.v0 : Vec(Vec::Zero(n));
    y[2 * n] = sc.est0.m_hat;
    y[2 * n + 1] = sc.est0.alpha_hat;

    const std::size_t steps = step_count(sc.sim);
    const bool nominal_adaptation = sc.gains.sigma_alpha == 0.0;
    sum.min_clearance = std::numeric_limits<double>::infinity();
    double prev_v = std::numeric_limits<double>::infinity();
    double prev_alpha = -std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * sc.sim.h;
        const Vec x = y.segment(0, n);
        const Vec v = y.segment(n, n);
        const EstimatorState est{y[2 * n], y[2 * n + 1]};

        ControlEval ce;
        double clear = 0.0;
        double vlyap = 0.0;
        try {
            ce = control_eval(x, v, est);
            clear = star ? sc.map->clearance(x) : world.clearance(x);
            const double phin = star ? field.phi_normalized(sc.map->map(x))
                                     : field.phi_normalized(x);
            vlyap = lyapunov_value(sc.gains, phin, ce.e_v, est, sc.plant.m, sc.plant.alpha_true);
        } catch (const std::exception& e) {
            sum.aborted = true;
            log.events.push_back({t, Event::Kind::aborted, e.what()});
            break;
        }

        sum.min_clearance = std::min(sum.min_clearance, clear);
        sum.max_input_norm = std::max(sum.max_input_norm, ce.u.norm());
        if (vlyap > prev_v + kAscentTolerance) ++sum.v_ascent_steps;
        prev_v = vlyap;
        if (nominal_adaptation && est.alpha_hat < prev_alpha - 1e-12) ++sum.alpha_decreases;
        prev_alpha = est.alpha_hat;

        if (k % static_cast<std::size_t>(sc.sim.log_stride) == 0 || k == steps) {
            log.data.push_back(t);
            for (int i = 0; i < n; ++i) log.data.push_back(x[i]);
            for (int i = 0; i < n; ++i) log.data.push_back(v[i]);
            for (int i = 0; i < n; ++i) log.data.push_back(ce.u[i]);
            log.data.insert(log.data.end(), {est.m_hat, est.alpha_hat, vlyap, clear});
        }

        sum.terminal_goal_error = (x - sc.goal).norm();
        if (!sum.converged && sum.terminal_goal_error <= sc.sim.eps && v.norm() <= sc.sim.eps) {
            sum.converged = true;
            sum.convergence_time = t;
            log.events.push_back({t, Event::Kind::converged, ""});
            if (sc.sim.stop_on_converge) break;
        }
        if (clear <= 0.0) {
            sum.collision = true;
            log.events.push_back({t, Event::Kind::collision, ""});
            break;
        }
        if (k == steps) break;

        try {
            y = rk4_step(deriv, y, t, sc.sim.h);
        } catch (const std::exception& e) {
            sum.aborted = true;
            log.events.push_back({t, Event::Kind::aborted, e.what()});
            break;
        }
        if (!y.allFinite()) {
            sum.aborted = true;
            log.events.push_back({t, Event::Kind::aborted, "non-finite state"});
            break;
        }
        ++sum.steps;
    }

    if (!sum.converged && !sum.collision && !sum.aborted)
        log.events.push_back({sc.sim.horizon, Event::Kind::horizon, ""});
    sum.exit_code = sum.converged ? 0 : (sum.collision || sum.aborted ? 3 : 4);
    return res;
}

RunResult run(const FleetScenario& sc) {
    Fleet fleet = sc.fleet;  // ranges may be selected here
    const bool preset = fleet.agent_barrier.tau > 0.0 && fleet.obstacle_barrier.tau > 0.0;
    const FleetValidation val = validate_fleet(fleet, !preset);
    if (!val.ok) {
        std::string msg = "sim: fleet assumptions violated:";
        for (const auto& v : val.violations) msg += " [" + v.what + "]";
        throw std::invalid_argument(msg);
    }
    for (const auto& a : fleet.agents) a.gains.validate();

    const int n = fleet.world.dim();
    const std::size_t n_agents = fleet.agents.size();
    RunResult res;
    Summary& sum = res.summary;
    sum.tau = fleet.agent_barrier.tau;
    sum.agent_convergence_times.assign(n_agents, -1.0);

    TrajectoryLog& log = res.log;
    log.columns = {"t"};
    for (std::size_t a = 0; a < n_agents; ++a) {
        const std::string s = "_a" + std::to_string(a);
        for (int i = 1; i <= n; ++i) log.columns.push_back("x" + std::to_string(i) + s);
        for (int i = 1; i <= n; ++i) log.columns.push_back("v" + std::to_string(i) + s);
        for (int i = 1; i <= n; ++i) log.columns.push_back("u" + std::to_string(i) + s);
        log.columns.push_back("m_hat" + s);
        log.columns.push_back("alpha_hat" + s);
    }
    log.columns.insert(log.columns.end(), {"V", "min_clearance", "beta_min"});

    FleetPhase phase = initial_phase(fleet);
    std::vector<Vec> pos(n_agents), vel(n_agents);
    std::vector<EstimatorState> est(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) {
        pos[i] = fleet.agents[i].start;
        vel[i] = Vec::Zero(n);
        est[i] = fleet.agents[i].est0;
        if (!fleet.world.in_free_space(fleet.agents[i].start))
            throw std::invalid_argument("sim: fleet start outside free space");
    }

    // Stacked state over active agents, in agent-id order.
    auto active_ids = [&]() {
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < n_agents; ++i)
            if (!phase.frozen[i]) ids.push_back(i);
        return ids;
    };
    auto pack = [&](const std::vector<std::size_t>& ids) {
        Eigen::VectorXd y(ids.size() * (2 * n + 2));
        for (std::size_t s = 0; s < ids.size(); ++s) {
            const std::size_t i = ids[s];
            y.segment(s * (2 * n + 2), n) = pos[i];
            y.segment(s * (2 * n + 2) + n, n) = vel[i];
            y[s * (2 * n + 2) + 2 * n] = est[i].m_hat;
            y[s * (2 * n + 2) + 2 * n + 1] = est[i].alpha_hat;
        }
        return y;
    };
    auto unpack = [&](const std::vector<std::size_t>& ids, const Eigen::VectorXd& y) {
        for (std::size_t s = 0; s < ids.size(); ++s) {
            const std::size_t i = ids[s];
            pos[i] = y.segment(s * (2 * n + 2), n);
            vel[i] = y.segment(s * (2 * n + 2) + n, n);
            est[i].m_hat = y[s * (2 * n + 2) + 2 * n];
            est[i].alpha_hat = y[s * (2 * n + 2) + 2 * n + 1];
        }
    };

    std::vector<std::size_t> ids = active_ids();
    Eigen::VectorXd y = pack(ids);

    auto deriv = [&](double t, const Eigen::VectorXd& ys, Eigen::VectorXd& dy) {
        // Scratch state for the stage evaluation.
        std::vector<Vec> p = pos, w = vel;
        for (std::size_t s = 0; s < ids.size(); ++s) {
            const std::size_t i = ids[s];
            p[i] = ys.segment(s * (2 * n + 2), n);
            w[i] = ys.segment(s * (2 * n + 2) + n, n);
        }
        for (std::size_t s = 0; s < ids.size(); ++s) {
            const std::size_t i = ids[s];
            const EstimatorState es{ys[s * (2 * n + 2) + 2 * n], ys[s * (2 * n + 2) + 2 * n + 1]};
            const AgentEval ae = agent_control(fleet, phase, i, p, w, es);
            Vec xdot, vdot;
            plant_derivative(fleet.agents[i].plant, p[i], w[i], ae.u, t, xdot, vdot);
            dy.segment(s * (2 * n + 2), n) = xdot;
            dy.segment(s * (2 * n + 2) + n, n) = vdot;
            dy[s * (2 * n + 2) + 2 * n] = ae.m_hat_dot;
            dy[s * (2 * n + 2) + 2 * n + 1] = ae.alpha_hat_dot;
        }
    };

    const std::size_t steps = step_count(sc.sim);
    sum.min_clearance = std::numeric_limits<double>::infinity();
    sum.min_beta_min = std::numeric_limits<double>::infinity();
    double prev_v = std::numeric_limits<double>::infinity();
    std::vector<double> prev_alpha(n_agents, -std::numeric_limits<double>::infinity());
    bool phase_changed = true;  // suppress the V comparison across promotions

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * sc.sim.h;

        // Promotions happen between steps; chained promotions are legal.
        bool promoted = false;
        while (!phase.complete &&
               (pos[phase.leader] - fleet.agents[phase.leader].goal).norm() <= fleet.eps) {
            const std::size_t lead = phase.leader;
            try {
                phase = advance_phase(fleet, phase, pos);
            } catch (const FleetProtocolError& e) {
                sum.aborted = true;
                log.events.push_back({t, Event::Kind::aborted, e.what()});
                break;
            }
            vel[lead] = Vec::Zero(n);
            sum.agent_convergence_times[lead] = t;
            ++sum.promotions;
            log.events.push_back({t, Event::Kind::promotion, "agent " + std::to_string(lead)});
            promoted = true;
        }
        if (sum.aborted) break;
        if (promoted) {
            ids = active_ids();
            y = pack(ids);
            phase_changed = true;
        }

        double vlyap = 0.0;
        std::vector<AgentEval> evals(n_agents);
        try {
            for (const std::size_t i : ids) {
                evals[i] = agent_control(fleet, phase, i, pos, vel, est[i]);
                vlyap += lyapunov_value(fleet.agents[i].gains,
                                        agent_phi_normalized(fleet, phase, i, pos), evals[i].e_v,
                                        est[i], fleet.agents[i].plant.m,
                                        fleet.agents[i].plant.alpha_true);
                sum.max_input_norm = std::max(sum.max_input_norm, evals[i].u.norm());
            }
        } catch (const std::exception& e) {
            sum.aborted = true;
            log.events.push_back({t, Event::Kind::aborted, e.what()});
            break;
        }

        const double bmin = beta_min(fleet, pos);
        double clear = bmin;
        for (std::size_t i = 0; i < n_agents; ++i) {
            clear = std::min(clear, fleet.world.workspace_radius() - fleet.agents[i].radius -
                                        pos[i].norm());
        }
        sum.min_beta_min = std::min(sum.min_beta_min, bmin);
        sum.min_clearance = std::min(sum.min_clearance, clear);

        if (!phase_changed && vlyap > prev_v + kAscentTolerance) ++sum.v_ascent_steps;
        prev_v = vlyap;
        phase_changed = false;
        for (const std::size_t i : ids) {
            if (fleet.agents[i].gains.sigma_alpha == 0.0 &&
                est[i].alpha_hat < prev_alpha[i] - 1e-12)
                ++sum.alpha_decreases;
            prev_alpha[i] = est[i].alpha_hat;
        }

        if (k % static_cast<std::size_t>(sc.sim.log_stride) == 0 || k == steps ||
            phase.complete) {
            log.data.push_back(t);
            for (std::size_t i = 0; i < n_agents; ++i) {
                const Vec& p = phase.frozen[i] ? phase.frozen_pos[i] : pos[i];
                for (int c = 0; c < n; ++c) log.data.push_back(p[c]);
                for (int c = 0; c < n; ++c)
                    log.data.push_back(phase.frozen[i] ? 0.0 : vel[i][c]);
                for (int c = 0; c < n; ++c)
                    log.data.push_back(phase.frozen[i] ? 0.0 : evals[i].u[c]);
                log.data.push_back(est[i].m_hat);
                log.data.push_back(est[i].alpha_hat);
            }
            log.data.insert(log.data.end(), {vlyap, clear, bmin});
        }

        if (clear <= 0.0) {
            sum.collision = true;
            log.events.push_back({t, Event::Kind::collision, ""});
            break;
        }
        if (phase.complete) {
            sum.converged = true;
            sum.convergence_time = t;
            log.events.push_back({t, Event::Kind::converged, ""});
            break;
        }
        if (k == steps) break;

        try {
            y = rk4_step(deriv, y, t, sc.sim.h);
        } catch (const std::exception& e) {
            sum.aborted = true;
            log.events.push_back({t, Event::Kind::aborted, e.what()});
            break;
        }
        if (!y.allFinite()) {
            sum.aborted = true;
            log.events.push_back({t, Event::Kind::aborted, "non-finite state"});
            break;
        }
        unpack(ids, y);
        ++sum.steps;
    }

    double worst_err = 0.0;
    for (std::size_t i = 0; i < n_agents; ++i) {
        const Vec& p = phase.frozen[i] ? phase.frozen_pos[i] : pos[i];
        worst_err = std::max(worst_err, (p - fleet.agents[i].goal).norm());
    }
    sum.terminal_goal_error = worst_err;
    if (!sum.converged && !sum.collision && !sum.aborted)
        log.events.push_back({sc.sim.horizon, Event::Kind::horizon, ""});
    sum.exit_code = sum.converged ? 0 : (sum.collision || sum.aborted ? 3 : 4);
    return res;
}

Summary metrics(const TrajectoryLog& log, const std::vector<Vec>& goals, double eps) {
    Summary sum;
    if (log.rows() == 0 || goals.empty()) return sum;
    const std::size_t rows = log.rows();
    const int n = static_cast<int>(goals[0].size());
    const std::size_t n_agents = goals.size();
    const bool fleet = n_agents > 1 || log.column("x1_a0") >= 0;

    sum.min_clearance = std::numeric_limits<double>::infinity();
    const auto clear_col = log.column("min_clearance");
    const auto v_col = log.column("V");
    const auto bmin_col = log.column("beta_min");
    sum.agent_convergence_times.assign(n_agents, -1.0);
    if (bmin_col >= 0) sum.min_beta_min = std::numeric_limits<double>::infinity();

    double prev_v = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
        if (clear_col >= 0)
            sum.min_clearance = std::min(sum.min_clearance, log.at(r, clear_col));
        if (bmin_col >= 0) sum.min_beta_min = std::min(sum.min_beta_min, log.at(r, bmin_col));
        if (v_col >= 0) {
            const double v = log.at(r, v_col);
            if (v > prev_v + kAscentTolerance) ++sum.v_ascent_steps;
            prev_v = v;
        }
        double unorm2 = 0.0;
        for (std::size_t a = 0; a < n_agents; ++a) {
            const std::string s = fleet ? "_a" + std::to_string(a) : "";
            double err2 = 0.0, vel2 = 0.0, ua2 = 0.0;
            for (int c = 1; c <= n; ++c) {
                const auto xc = log.column("x" + std::to_string(c) + s);
                const auto vc = log.column("v" + std::to_string(c) + s);
                const auto uc = log.column("u" + std::to_string(c) + s);
                const double dx = log.at(r, xc) - goals[a][c - 1];
                err2 += dx * dx;
                vel2 += log.at(r, vc) * log.at(r, vc);
                ua2 += log.at(r, uc) * log.at(r, uc);
            }
            unorm2 = std::max(unorm2, ua2);
            const bool at_goal = std::sqrt(err2) <= eps && (fleet || std::sqrt(vel2) <= eps);
            if (at_goal && sum.agent_convergence_times[a] < 0.0)
                sum.agent_convergence_times[a] = log.at(r, 0);
            if (r + 1 == rows)
                sum.terminal_goal_error = std::max(sum.terminal_goal_error, std::sqrt(err2));
        }
        sum.max_input_norm = std::max(sum.max_input_norm, std::sqrt(unorm2));
    }
    for (const Event& e : log.events) {
        if (e.kind == Event::Kind::converged) {
            sum.converged = true;
            sum.convergence_time = e.t;
        }
        if (e.kind == Event::Kind::collision) sum.collision = true;
        if (e.kind == Event::Kind::promotion) ++sum.promotions;
    }
    sum.steps = rows ? rows - 1 : 0;
    sum.exit_code = sum.converged ? 0 : (sum.collision ? 3 : 4);
    return sum;
}

}  // namespace navsim
