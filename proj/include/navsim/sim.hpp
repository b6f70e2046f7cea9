#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navsim/controller.hpp"
#include "navsim/multiagent.hpp"
#include "navsim/navfield.hpp"
#include "navsim/plant.hpp"
#include "navsim/starmap.hpp"

namespace navsim {

// Classical fixed-step Runge-Kutta on a stacked state vector. The derivative
// callback fills dy from (t, y); non-finite stage derivatives abort.
template <typename F>
Eigen::VectorXd rk4_step(F&& deriv, const Eigen::VectorXd& y, double t, double h) {
    auto eval = [&](double ts, const Eigen::VectorXd& ys) {
        Eigen::VectorXd dy(y.size());
        deriv(ts, ys, dy);
        if (!dy.allFinite()) {
            std::string dump = "rk4: non-finite derivative at t=" + std::to_string(ts) +
                               ", state=[";
            for (int i = 0; i < ys.size(); ++i)
                dump += (i ? "," : "") + std::to_string(ys[i]);
            throw std::runtime_error(dump + "]");
        }
        return dy;
    };
    const Eigen::VectorXd k1 = eval(t, y);
    const Eigen::VectorXd k2 = eval(t + 0.5 * h, y + (0.5 * h) * k1);
    const Eigen::VectorXd k3 = eval(t + 0.5 * h, y + (0.5 * h) * k2);
    const Eigen::VectorXd k4 = eval(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct SimParams {
    double h = 1e-3;       // step (s)
    double horizon = 100.0;  // T (s)
    double eps = 0.1;      // convergence threshold on position and speed
    std::uint64_t seed = 1;
    int log_stride = 1;    // in-memory/output decimation; metrics stream every step
    bool stop_on_converge = false;
};

struct SingleScenario {
    std::optional<World> world;   // sphere-world variant
    std::optional<StarMap> map;   // star-world variant (field lives on the target world)
    double k1 = 0.04;
    double k2 = 5.0;
    std::optional<double> tau_override;
    Vec start;
    Vec v0;  // zero when empty
    Vec goal;
    PlantParams plant;
    ControllerGains gains;
    EstimatorState est0;
    SimParams sim;
};

struct FleetScenario {
    Fleet fleet;
    SimParams sim;
};

struct Event {
    enum class Kind { converged, collision, promotion, horizon, aborted };
    double t;
    Kind kind;
    std::string detail;
};

const char* event_kind_name(Event::Kind k);

struct TrajectoryLog {
    std::vector<std::string> columns;
    std::vector<double> data;  // row-major, rows() x columns.size()
    std::vector<Event> events;

    std::size_t width() const { return columns.size(); }
    std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
    double at(std::size_t row, std::size_t col) const { return data[row * width() + col]; }
    std::ptrdiff_t column(const std::string& name) const;
};

struct Summary {
    bool converged = false;
    bool collision = false;
    bool aborted = false;
    double convergence_time = -1.0;
    double terminal_goal_error = 0.0;
    double min_clearance = 0.0;
    double max_input_norm = 0.0;
    std::size_t v_ascent_steps = 0;      // V increments beyond +1e-6 between steps
    std::size_t alpha_decreases = 0;     // nominal-law monotonicity violations
    double min_beta_min = 0.0;           // fleet only
    std::vector<double> agent_convergence_times;  // fleet, by agent id (-1 if never)
    std::size_t promotions = 0;
    std::size_t steps = 0;
    double tau = 0.0;
    double d_star2 = 0.0;
    std::vector<std::string> warnings;
    int exit_code = 4;  // 0 converged, 3 collision/abort, 4 horizon without convergence
};

struct RunResult {
    TrajectoryLog log;
    Summary summary;
};

// Closed-loop run: sense -> control+adaptation -> one RK4 step of the coupled
// plant/estimator system -> event checks, every step logged (modulo stride).
// Deterministic for a fixed scenario and seed.
RunResult run(const SingleScenario& sc);
RunResult run(const FleetScenario& sc);

// Recompute summary statistics from a (stride-1) log; goals in agent order.
Summary metrics(const TrajectoryLog& log, const std::vector<Vec>& goals, double eps);

}  // namespace navsim
