#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "navsim/config.hpp"
#include "navsim/log_io.hpp"
#include "navsim/svg.hpp"

namespace fs = std::filesystem;
using namespace navsim;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCollision = 3;
constexpr int kExitHorizon = 4;

std::string resolve_out_dir(const std::string& flag_dir, const std::string& config_dir) {
    if (!flag_dir.empty()) return flag_dir;
    if (!config_dir.empty() && config_dir != ".") return config_dir;
    if (const char* env = std::getenv("NAVSIM_OUT_DIR"); env && *env) return env;
    return config_dir.empty() ? "." : config_dir;
}

std::string load_with_overrides(const std::string& path,
                                const std::vector<std::string>& overrides) {
    std::string text = read_file(path);
    if (!overrides.empty()) text = apply_overrides(text, overrides);
    return text;
}

struct ValidateOutcome {
    int exit_code = kExitOk;
    json report;
};

ValidateOutcome run_validation(const LoadedScenario& ls) {
    ValidateOutcome out;
    json& rep = out.report;
    rep["ok"] = true;
    auto fail = [&](const std::string& what) {
        rep["ok"] = false;
        rep["failures"].push_back(what);
        out.exit_code = kExitInfeasible;
    };

    if (ls.is_fleet) {
        Fleet fleet = ls.fleet->fleet;
        const FleetValidation v = validate_fleet(fleet, true);
        rep["kind"] = "fleet";
        rep["tau"] = fleet.agent_barrier.tau;
        rep["tau_bound"] = v.tau_bound;
        rep["r_bar"] = fleet.r_bar;
        for (const auto& viol : v.violations)
            fail(viol.what + " (slack " + std::to_string(viol.slack) + ")");
        if (v.ok) {
            const CertifyReport cert = certify(fleet.agent_barrier);
            rep["barrier_certified"] = cert.ok();
            if (!cert.ok()) fail("barrier family certification");
        }
        return out;
    }

    const SingleScenario& sc = *ls.single;
    const bool star = sc.map.has_value();
    const World world = star ? sc.map->target_world() : *sc.world;
    const Vec goal = star ? sc.map->map(sc.goal) : sc.goal;
    rep["kind"] = star ? "star" : "sphere";

    const FeasibilityReport fr = validate(world, goal);
    rep["r_bar"] = fr.r_bar;
    rep["r_bar_d"] = fr.r_bar_d;
    for (const auto& viol : fr.violations)
        fail(viol.what + " (slack " + std::to_string(viol.slack) + ")");
    if (!fr.ok && out.exit_code == kExitOk) fail("infeasible world");

    if (fr.ok) {
        BarrierSpec spec{0.0};
        if (sc.tau_override) {
            spec.tau = *sc.tau_override;
            rep["tau"] = spec.tau;
            rep["tau_overridden"] = true;
            const SaddleThreshold st =
                world.num_obstacles()
                    ? saddle_threshold(sc.k1, sc.k2, world.effective_workspace_radius(),
                                       world.min_inflated_radius(), spec)
                    : SaddleThreshold{0.0, true};
            rep["d_star2"] = st.d_star2;
        } else {
            const TauSelection sel =
                select_tau(fr, sc.k1, sc.k2, world.effective_workspace_radius(),
                           world.min_inflated_radius(), world.num_obstacles());
            spec = sel.spec;
            rep["tau"] = spec.tau;
            rep["d_star2"] = sel.d_star2;
            if (sel.degenerate) fail("saddle non-degeneracy threshold unachievable");
        }
        const CertifyReport cert = certify(spec);
        rep["barrier_certified"] = cert.ok();
        if (!cert.ok()) fail("barrier family certification");
        const bool start_free =
            star ? sc.map->in_free_space(sc.start) : world.in_free_space(sc.start);
        if (!start_free) fail("start outside free space");
        if (sc.gains.k_phi <= 0.5 * sc.plant.alpha_true)
            rep["warnings"].push_back("k_phi <= alpha/2 (condition is sufficient only)");

        const FrictionBoundCheck fb = friction_bound_certify(
            sc.plant.friction, sc.plant.alpha_true, world.dim(), 20000,
            world.workspace_radius(), 12345);
        rep["friction_bound_ok"] = fb.ok;
        rep["friction_worst_ratio"] = fb.worst_ratio;
        if (!fb.ok) fail("declared alpha bound violated by friction model");
    }

    if (star) {
        const StarMapReport mr = validate_map(*sc.map, 200);
        rep["star_min_abs_det"] = mr.min_abs_det;
        rep["star_boundary_residual"] = mr.max_boundary_residual;
        if (!mr.ok) {
            for (const auto& f : mr.failures) fail("star map: " + f);
        }
    }
    return out;
}

void print_validation(const json& rep) {
    std::printf("validation: %s\n", rep["ok"].get<bool>() ? "OK" : "FAILED");
    for (const auto& key :
         {"kind", "r_bar", "r_bar_d", "tau", "tau_bound", "d_star2", "barrier_certified",
          "star_min_abs_det", "star_boundary_residual", "friction_worst_ratio"}) {
        if (rep.contains(key)) std::printf("  %-22s %s\n", key, rep[key].dump().c_str());
    }
    if (rep.contains("warnings"))
        for (const auto& w : rep["warnings"]) std::printf("  warning: %s\n", w.get<std::string>().c_str());
    if (rep.contains("failures"))
        for (const auto& f : rep["failures"]) std::printf("  failure: %s\n", f.get<std::string>().c_str());
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::string& out_dir_flag) {
    const std::string text = load_with_overrides(config_path, overrides);
    const LoadedScenario ls = parse_config(text);
    const ValidateOutcome out = run_validation(ls);
    print_validation(out.report);
    const std::string dir = resolve_out_dir(out_dir_flag, ls.out_dir);
    fs::create_directories(dir);
    const std::string path = dir + "/" + ls.prefix + ".validate.json";
    write_file(path, out.report.dump(2) + "\n");
    std::printf("report: %s\n", path.c_str());
    return out.exit_code;
}

int run_one(const LoadedScenario& ls, const std::string& dir) {
    RunResult res = ls.is_fleet ? run(*ls.fleet) : run(*ls.single);
    fs::create_directories(dir);
    const std::string csv_path = dir + "/" + ls.prefix + ".csv";
    const std::string sum_path = dir + "/" + ls.prefix + ".summary.json";
    write_file(csv_path, to_csv(res.log));
    write_file(sum_path, summary_to_json(res.summary, res.log.events, ls.geometry));
    std::printf("run: %s  steps=%zu  min_clearance=%.6g  exit=%d\n", csv_path.c_str(),
                res.summary.steps, res.summary.min_clearance, res.summary.exit_code);
    for (const auto& w : res.summary.warnings) std::printf("  warning: %s\n", w.c_str());
    for (const auto& e : res.log.events)
        std::printf("  event t=%-10.4g %s %s\n", e.t, event_kind_name(e.kind),
                    e.detail.c_str());
    return res.summary.exit_code;
}

int cmd_run(const std::string& config_path, std::vector<std::string> overrides,
            const std::string& out_dir_flag, const std::string& seed,
            const std::string& step, const std::string& horizon) {
    if (!seed.empty()) overrides.push_back("sim.seed=" + seed);
    if (!step.empty()) overrides.push_back("sim.h=" + step);
    if (!horizon.empty()) overrides.push_back("sim.T=" + horizon);
    const std::string text = load_with_overrides(config_path, overrides);
    const LoadedScenario ls = parse_config(text);
    return run_one(ls, resolve_out_dir(out_dir_flag, ls.out_dir));
}

int cmd_critical_points(const std::string& config_path,
                        const std::vector<std::string>& overrides) {
    const std::string text = load_with_overrides(config_path, overrides);
    const LoadedScenario ls = parse_config(text);
    if (ls.is_fleet || ls.single->map)
        throw std::invalid_argument("critical-points expects a single-robot sphere config");
    const SingleScenario& sc = *ls.single;
    const World& world = *sc.world;

    const FeasibilityReport fr = validate(world, sc.goal);
    if (!fr.ok) {
        std::printf("world infeasible\n");
        return kExitInfeasible;
    }
    BarrierSpec spec{0.0};
    double dss = 0.0;
    if (sc.tau_override) {
        spec.tau = *sc.tau_override;
        if (world.num_obstacles())
            dss = saddle_threshold(sc.k1, sc.k2, world.effective_workspace_radius(),
                                   world.min_inflated_radius(), spec)
                      .d_star2;
    } else {
        const TauSelection sel =
            select_tau(fr, sc.k1, sc.k2, world.effective_workspace_radius(),
                       world.min_inflated_radius(), world.num_obstacles());
        spec = sel.spec;
        dss = sel.d_star2;
    }
    const NavField field(world, spec, sc.goal, sc.k1, sc.k2);
    const CriticalPointReport rep = find_critical_points(field);

    std::printf("tau=%.9g  d_star2=%.9g  (tau %s d_star2)\n", spec.tau, dss,
                spec.tau < dss ? "<" : ">=");
    std::printf("critical points: %zu  (failed seeds: %zu)\n", rep.points.size(),
                rep.failed_seeds);
    for (const auto& cp : rep.points) {
        std::string pos = "(";
        for (int i = 0; i < cp.x.size(); ++i)
            pos += (i ? "," : "") + std::to_string(cp.x[i]);
        pos += ")";
        const char* kind = cp.kind == CriticalPoint::Kind::goal
                               ? "goal"
                               : (cp.kind == CriticalPoint::Kind::saddle ? "saddle"
                                                                         : "degenerate");
        std::string eig;
        double margin_val = 0.0;
        // active barrier margin, if any, and its non-degeneracy margin
        double dmin = field.barrier().tau;
        for (std::size_t j = 0; j < world.num_obstacles(); ++j)
            dmin = std::min(dmin, world.margin_obstacle(j, cp.x));
        if (world.num_obstacles() && dmin < field.barrier().tau)
            margin_val = nondegeneracy_margin(sc.k1, sc.k2, world.effective_workspace_radius(),
                                              world.min_inflated_radius(), spec, dmin);
        for (int i = 0; i < cp.eigenvalues.size(); ++i)
            eig += (i ? "," : "") + std::to_string(cp.eigenvalues[i]);
        std::printf("  %-10s x=%s  eig=[%s]  f_margin=%.6g\n", kind, pos.c_str(), eig.c_str(),
                    margin_val);
    }
    return kExitOk;
}

int cmd_plot(const std::string& log_path, const std::string& summary_path,
             const std::string& kind, std::string out_path) {
    const TrajectoryLog log = parse_csv(read_file(log_path));
    PlotGeometry geo;
    Summary sum;
    std::vector<Event> events;
    std::string spath = summary_path;
    if (spath.empty()) {
        spath = log_path;
        const auto dot = spath.rfind(".csv");
        if (dot != std::string::npos) spath = spath.substr(0, dot);
        spath += ".summary.json";
    }
    if (fs::exists(spath)) parse_summary_json(read_file(spath), sum, events, geo);
    if (out_path.empty()) {
        out_path = log_path;
        const auto dot = out_path.rfind(".csv");
        if (dot != std::string::npos) out_path = out_path.substr(0, dot);
        out_path += "." + kind + ".svg";
    }
    write_file(out_path, render_svg(log, geo, kind));
    std::printf("plot: %s\n", out_path.c_str());
    return kExitOk;
}

int cmd_batch(const std::vector<std::string>& configs, int jobs,
              const std::string& out_dir_flag) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{0};
    const std::string root = resolve_out_dir(out_dir_flag, "");
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                const LoadedScenario ls = parse_config(read_file(configs[i]));
                const std::string stem = fs::path(configs[i]).stem().string();
                const int code = run_one(ls, root + "/" + stem);
                int cur = worst.load();
                while (code > cur && !worst.compare_exchange_weak(cur, code)) {}
            } catch (const std::exception& e) {
                std::fprintf(stderr, "batch: %s failed: %s\n", configs[i].c_str(), e.what());
                int cur = worst.load();
                while (kExitConfig > cur && !worst.compare_exchange_weak(cur, kExitConfig)) {}
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive potential-field navigation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seed, step, horizon;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* cmd, bool with_run_flags) {
        cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
        cmd->add_option("--override", overrides, "dotted-path override key=value");
        cmd->add_option("--out-dir", out_dir, "output directory (or $NAVSIM_OUT_DIR)");
        if (with_run_flags) {
            cmd->add_option("--seed", seed, "override sim.seed");
            cmd->add_option("--step", step, "override sim.h");
            cmd->add_option("--horizon", horizon, "override sim.T");
        }
    };

    auto* validate_cmd = app.add_subcommand("validate", "feasibility and range selection checks");
    add_common(validate_cmd, false);
    auto* run_cmd = app.add_subcommand("run", "simulate a scenario, write CSV + summary");
    add_common(run_cmd, true);
    auto* cp_cmd = app.add_subcommand("critical-points", "locate and classify critical points");
    cp_cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
    cp_cmd->add_option("--override", overrides, "dotted-path override key=value");

    std::string log_path, summary_path, kind = "trajectory", svg_out;
    auto* plot_cmd = app.add_subcommand("plot", "render a run log as SVG");
    plot_cmd->add_option("--log", log_path, "trajectory CSV")->required();
    plot_cmd->add_option("--summary", summary_path, "summary JSON (default: next to the log)");
    plot_cmd->add_option("--kind", kind, "trajectory | signals | beta-min");
    plot_cmd->add_option("--out", svg_out, "output SVG path");

    std::vector<std::string> batch_configs;
    int jobs = 2;
    auto* batch_cmd = app.add_subcommand("batch", "run several scenario configs");
    batch_cmd->add_option("configs", batch_configs, "config files")->required();
    batch_cmd->add_option("--jobs", jobs, "parallel workers");
    batch_cmd->add_option("--out-dir", out_dir, "output root");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) return cmd_validate(config_path, overrides, out_dir);
        if (run_cmd->parsed()) return cmd_run(config_path, overrides, out_dir, seed, step, horizon);
        if (cp_cmd->parsed()) return cmd_critical_points(config_path, overrides);
        if (plot_cmd->parsed()) return cmd_plot(log_path, summary_path, kind, svg_out);
        if (batch_cmd->parsed()) return cmd_batch(batch_configs, jobs, out_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInfeasible;
    }
    return kExitOk;
}
