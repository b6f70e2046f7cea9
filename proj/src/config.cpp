#include "navsim/config.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <json.hpp>

namespace navsim {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config: malformed JSON document");
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    return j;
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + key + "' in '" + where + "'");
    }
}

double num_at(const json& obj, const std::string& where, const std::string& key,
              std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("config: '" + where + "' needs '" + key + "'");
    }
    if (!obj[key].is_number()) throw ConfigError("config: '" + where + "." + key + "' must be a number");
    return obj[key].get<double>();
}

Vec vec_at(const json& obj, const std::string& where, const std::string& key, int dim = 0) {
    if (!obj.contains(key) || !obj[key].is_array())
        throw ConfigError("config: '" + where + "' needs array '" + key + "'");
    const auto& a = obj[key];
    if (a.size() != 2 && a.size() != 3)
        throw ConfigError("config: '" + where + "." + key + "' must have 2 or 3 entries");
    if (dim && static_cast<int>(a.size()) != dim)
        throw ConfigError("config: '" + where + "." + key + "' has wrong dimension");
    Vec v(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ConfigError("config: '" + where + "." + key + "' must be numeric");
        v[static_cast<int>(i)] = a[i].get<double>();
    }
    return v;
}

FrictionModel parse_friction(const json& j) {
    require_keys(j, "plant.friction", {"kind", "coeff"});
    FrictionModel f;
    const std::string kind = j.value("kind", "zero");
    if (kind == "zero") f.kind = FrictionModel::Kind::zero;
    else if (kind == "viscous") f.kind = FrictionModel::Kind::viscous;
    else if (kind == "sinusoidal") f.kind = FrictionModel::Kind::sinusoidal;
    else throw ConfigError("config: unknown friction kind '" + kind + "'");
    f.coeff = num_at(j, "plant.friction", "coeff", 0.0);
    return f;
}

DisturbanceModel parse_disturbance(const json& j) {
    require_keys(j, "plant.disturbance", {"kind", "d_bar", "seed"});
    DisturbanceModel d;
    const std::string kind = j.value("kind", "none");
    if (kind == "none") d.kind = DisturbanceModel::Kind::none;
    else if (kind == "sinusoid") d.kind = DisturbanceModel::Kind::sinusoid;
    else if (kind == "bounded_random") d.kind = DisturbanceModel::Kind::bounded_random;
    else throw ConfigError("config: unknown disturbance kind '" + kind + "'");
    d.d_bar = num_at(j, "plant.disturbance", "d_bar", 0.0);
    d.seed = static_cast<std::uint64_t>(num_at(j, "plant.disturbance", "seed", 0.0));
    return d;
}

PlantParams parse_plant(const json& root, int dim) {
    PlantParams p;
    p.g = Vec::Zero(dim);
    if (dim == 3) p.g = vec3(0.0, 0.0, -9.81);
    if (!root.contains("plant")) {
        p.alpha_true = p.friction.default_alpha_bound();
        return p;
    }
    const json& j = root["plant"];
    require_keys(j, "plant", {"m", "g", "friction", "disturbance", "alpha_true"});
    p.m = num_at(j, "plant", "m", 1.0);
    if (p.m <= 0.0) throw std::invalid_argument("plant: mass must be positive");
    if (j.contains("g")) p.g = vec_at(j, "plant", "g", dim);
    if (j.contains("friction")) p.friction = parse_friction(j["friction"]);
    if (j.contains("disturbance")) p.disturbance = parse_disturbance(j["disturbance"]);
    p.alpha_true = j.contains("alpha_true") ? num_at(j, "plant", "alpha_true")
                                            : p.friction.default_alpha_bound();
    return p;
}

struct ControllerBlock {
    double k1 = 0.04, k2 = 5.0;
    ControllerGains gains;
    EstimatorState est0;
    std::optional<double> tau_override;
};

ControllerBlock parse_controller(const json& root) {
    ControllerBlock c;
    if (!root.contains("controller")) return c;
    const json& j = root["controller"];
    require_keys(j, "controller",
                 {"k1", "k2", "k_phi", "k_v", "k_m", "k_alpha", "sigma_m", "sigma_alpha",
                  "tau_override", "m_hat0", "alpha_hat0"});
    c.k1 = num_at(j, "controller", "k1", 0.04);
    c.k2 = num_at(j, "controller", "k2", 5.0);
    c.gains.k_phi = num_at(j, "controller", "k_phi", 1.0);
    c.gains.k_v = num_at(j, "controller", "k_v", 20.0);
    c.gains.k_m = num_at(j, "controller", "k_m", 0.01);
    c.gains.k_alpha = num_at(j, "controller", "k_alpha", 0.01);
    c.gains.sigma_m = num_at(j, "controller", "sigma_m", 0.0);
    c.gains.sigma_alpha = num_at(j, "controller", "sigma_alpha", 0.0);
    if (j.contains("tau_override") && !j["tau_override"].is_null())
        c.tau_override = num_at(j, "controller", "tau_override");
    c.est0.m_hat = num_at(j, "controller", "m_hat0", 0.0);
    c.est0.alpha_hat = num_at(j, "controller", "alpha_hat0", 0.0);
    if (c.est0.alpha_hat < 0.0)
        throw std::invalid_argument("controller: alpha_hat0 must be nonnegative");
    return c;
}

SimParams parse_sim_params(const json& root) {
    SimParams s;
    if (!root.contains("sim")) return s;
    const json& j = root["sim"];
    require_keys(j, "sim",
                 {"h", "T", "eps", "seed", "start", "v0", "goal", "log_stride",
                  "stop_on_converge"});
    s.h = num_at(j, "sim", "h", 1e-3);
    s.horizon = num_at(j, "sim", "T", 100.0);
    s.eps = num_at(j, "sim", "eps", 0.1);
    s.seed = static_cast<std::uint64_t>(num_at(j, "sim", "seed", 1.0));
    s.log_stride = static_cast<int>(num_at(j, "sim", "log_stride", 1.0));
    if (s.log_stride < 1) throw ConfigError("config: sim.log_stride must be >= 1");
    if (j.contains("stop_on_converge")) {
        if (!j["stop_on_converge"].is_boolean())
            throw ConfigError("config: sim.stop_on_converge must be boolean");
        s.stop_on_converge = j["stop_on_converge"].get<bool>();
    }
    return s;
}

World parse_world(const json& j, const std::vector<Vec>& protect) {
    require_keys(j, "world", {"r_W", "robot_radius", "dim", "obstacles", "random"});
    const double r_w = num_at(j, "world", "r_W");
    const double robot_r = num_at(j, "world", "robot_radius", 0.0);
    const int dim = static_cast<int>(num_at(j, "world", "dim", 2.0));
    if (j.contains("random")) {
        const json& r = j["random"];
        require_keys(r, "world.random",
                     {"M", "r_min", "r_max", "r_bar", "seed", "protect_clearance"});
        RandomWorldSpec spec;
        spec.workspace_radius = r_w;
        spec.robot_radius = robot_r;
        spec.dim = dim;
        spec.num_obstacles = static_cast<std::size_t>(num_at(r, "world.random", "M"));
        spec.radius_min = num_at(r, "world.random", "r_min", 0.25);
        spec.radius_max = num_at(r, "world.random", "r_max", 0.75);
        spec.r_bar = num_at(r, "world.random", "r_bar", 0.5);
        spec.seed = static_cast<std::uint64_t>(num_at(r, "world.random", "seed", 1.0));
        spec.protect_clearance =
            num_at(r, "world.random", "protect_clearance", 2.0 * spec.r_bar);
        spec.protected_points = protect;
        return make_random_world(spec);
    }
    if (!j.contains("obstacles") || !j["obstacles"].is_array())
        throw ConfigError("config: world needs 'obstacles' or 'random'");
    std::vector<Obstacle> obs;
    for (const auto& o : j["obstacles"]) {
        require_keys(o, "world.obstacles[]", {"c", "r"});
        obs.push_back({vec_at(o, "world.obstacles[]", "c", dim),
                       num_at(o, "world.obstacles[]", "r")});
    }
    return World(r_w, robot_r, dim, std::move(obs));
}

RadialProfile parse_profile(const json& o, const std::string& where) {
    RadialProfile p;
    const std::string shape = o.value("shape", "disk");
    if (shape == "disk") {
        p.kind = RadialProfile::Kind::disk;
        p.base_radius = num_at(o, where, "base_radius");
    } else if (shape == "star_polygon") {
        p.kind = RadialProfile::Kind::cosine_lobes;
        p.base_radius = num_at(o, where, "base_radius");
        p.amplitude = num_at(o, where, "amplitude", 0.3);
        p.lobes = static_cast<int>(num_at(o, where, "lobes", 5.0));
        p.phase = num_at(o, where, "phase", 0.0);
    } else if (shape == "spline") {
        p.kind = RadialProfile::Kind::spline;
        if (!o.contains("control_radii") || !o["control_radii"].is_array())
            throw ConfigError("config: spline star obstacle needs 'control_radii'");
        for (const auto& v : o["control_radii"]) p.control_radii.push_back(v.get<double>());
    } else {
        throw ConfigError("config: unknown star shape '" + shape + "'");
    }
    return p;
}

StarMap parse_star_world(const json& j) {
    require_keys(j, "star_world", {"r_W", "obstacles"});
    const double r_w = num_at(j, "star_world", "r_W");
    if (!j.contains("obstacles") || !j["obstacles"].is_array())
        throw ConfigError("config: star_world needs 'obstacles'");
    std::vector<StarObstacle> obs;
    for (const auto& o : j["obstacles"]) {
        require_keys(o, "star_world.obstacles[]",
                     {"c", "shape", "base_radius", "amplitude", "lobes", "phase",
                      "control_radii", "influence_margin", "target_radius"});
        StarObstacle so;
        so.center = vec_at(o, "star_world.obstacles[]", "c");
        so.profile = parse_profile(o, "star_world.obstacles[]");
        so.influence_margin = num_at(o, "star_world.obstacles[]", "influence_margin", 0.5);
        so.target_radius = num_at(o, "star_world.obstacles[]", "target_radius", 0.5);
        obs.push_back(std::move(so));
    }
    return StarMap(r_w, std::move(obs));
}

// Rejection-sampled fleet layout honoring the goal/initial spacing rules.
struct FleetRandom {
    std::size_t agents;
    std::size_t obstacles;
    double agent_radius;
    double obstacle_radius;
    double sensing_radius;
    std::uint64_t seed;
};

void generate_fleet_layout(const FleetRandom& fr, double r_w, double r_bar, double eps,
                           std::vector<Obstacle>& obstacles, std::vector<Vec>& starts,
                           std::vector<Vec>& goals) {
    std::mt19937_64 rng(fr.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double r_max = fr.agent_radius;
    const double margin = 1.01;  // keeps the strict inequalities strict

    auto sample_in = [&](double radius) {
        Vec p(2);
        while (true) {
            p[0] = unit(rng);
            p[1] = unit(rng);
            if (p.squaredNorm() <= 1.0) break;
        }
        return Vec(p * radius);
    };
    auto try_place = [&](double max_center_norm, auto&& accept) {
        for (int attempt = 0; attempt < 200000; ++attempt) {
            Vec p = sample_in(max_center_norm);
            if (accept(p)) return p;
        }
        throw std::invalid_argument("fleet layout: workspace too crowded, raise r_W");
    };

    const double slack = 2.0 * r_max + 2.0 * r_bar;
    obstacles.clear();
    for (std::size_t k = 0; k < fr.obstacles; ++k) {
        Vec c = try_place(r_w - margin * (fr.obstacle_radius + slack), [&](const Vec& p) {
            for (const auto& o : obstacles) {
                if ((p - o.center).norm() <=
                    margin * (fr.obstacle_radius + o.radius + slack))
                    return false;
            }
            return true;
        });
        obstacles.push_back({c, fr.obstacle_radius});
    }
    goals.clear();
    for (std::size_t i = 0; i < fr.agents; ++i) {
        goals.push_back(try_place(
            r_w - margin * (fr.agent_radius + 2.0 * r_max + eps + 2.0 * r_bar),
            [&](const Vec& p) {
                for (const auto& o : obstacles) {
                    if ((p - o.center).norm() <=
                        margin * (o.radius + fr.agent_radius + 2.0 * r_max + eps + 2.0 * r_bar))
                        return false;
                }
                for (const auto& g : goals) {
                    if ((p - g).norm() <= margin * (2.0 * fr.agent_radius + 2.0 * r_max +
                                                    2.0 * eps + 2.0 * r_bar))
                        return false;
                }
                return true;
            }));
    }
    starts.clear();
    for (std::size_t i = 0; i < fr.agents; ++i) {
        starts.push_back(try_place(
            r_w - margin * (fr.agent_radius + 2.0 * r_max + 2.0 * r_bar), [&](const Vec& p) {
                for (const auto& o : obstacles) {
                    if ((p - o.center).norm() <=
                        margin * (o.radius + fr.agent_radius + 2.0 * r_max + 2.0 * r_bar))
                        return false;
                }
                for (const auto& g : goals) {
                    if ((p - g).norm() <= margin * (2.0 * fr.agent_radius + 2.0 * r_max + eps +
                                                    2.0 * r_bar))
                        return false;
                }
                for (const auto& s : starts) {
                    if ((p - s).norm() <=
                        margin * (2.0 * fr.agent_radius + 2.0 * r_max + 2.0 * r_bar))
                        return false;
                }
                return true;
            }));
    }
}

FleetScenario parse_fleet(const json& root, const json& j, SimParams sim) {
    require_keys(j, "fleet",
                 {"r_W", "r_bar", "eps", "priority", "agents", "obstacles", "random"});
    FleetScenario fs;
    const double r_w = num_at(j, "fleet", "r_W");
    const double r_bar = num_at(j, "fleet", "r_bar", 4.0);
    const double eps = num_at(j, "fleet", "eps", 0.1);
    const ControllerBlock cb = parse_controller(root);

    std::vector<Obstacle> obstacles;
    std::vector<Vec> starts, goals;
    double agent_radius = 1.0, sensing = 0.0;
    std::size_t n_agents = 0;

    if (j.contains("random")) {
        const json& r = j["random"];
        require_keys(r, "fleet.random",
                     {"N", "M", "agent_radius", "obstacle_radius", "sensing_radius", "seed"});
        FleetRandom fr;
        fr.agents = static_cast<std::size_t>(num_at(r, "fleet.random", "N"));
        fr.obstacles = static_cast<std::size_t>(num_at(r, "fleet.random", "M"));
        fr.agent_radius = num_at(r, "fleet.random", "agent_radius", 1.0);
        fr.obstacle_radius = num_at(r, "fleet.random", "obstacle_radius", 1.0);
        fr.sensing_radius = num_at(r, "fleet.random", "sensing_radius", 20.0);
        fr.seed = static_cast<std::uint64_t>(num_at(r, "fleet.random", "seed", 1.0));
        generate_fleet_layout(fr, r_w, r_bar, eps, obstacles, starts, goals);
        agent_radius = fr.agent_radius;
        sensing = fr.sensing_radius;
        n_agents = fr.agents;
    } else if (j.contains("agents") && j["agents"].is_array()) {
        n_agents = j["agents"].size();
        if (j.contains("obstacles")) {
            if (!j["obstacles"].is_array())
                throw ConfigError("config: fleet.obstacles must be an array");
            for (const auto& o : j["obstacles"]) {
                require_keys(o, "fleet.obstacles[]", {"c", "r"});
                obstacles.push_back({vec_at(o, "fleet.obstacles[]", "c", 2),
                                     num_at(o, "fleet.obstacles[]", "r")});
            }
        }
    } else {
        throw ConfigError("config: fleet needs 'agents' or 'random'");
    }

    PlantParams plant = parse_plant(root, 2);
    fs.fleet.world = World(r_w, 0.0, 2, std::move(obstacles));
    fs.fleet.r_bar = r_bar;
    fs.fleet.eps = eps;
    for (std::size_t i = 0; i < n_agents; ++i) {
        FleetAgentSpec a;
        a.k1 = cb.k1;
        a.k2 = cb.k2;
        a.gains = cb.gains;
        a.plant = plant;
        a.est0 = cb.est0;
        if (j.contains("random")) {
            a.radius = agent_radius;
            a.sensing_radius = sensing;
            a.start = starts[i];
            a.goal = goals[i];
        } else {
            const json& aj = j["agents"][i];
            require_keys(aj, "fleet.agents[]", {"radius", "start", "goal", "sensing_radius"});
            a.radius = num_at(aj, "fleet.agents[]", "radius", 1.0);
            a.start = vec_at(aj, "fleet.agents[]", "start", 2);
            a.goal = vec_at(aj, "fleet.agents[]", "goal", 2);
            a.sensing_radius = num_at(aj, "fleet.agents[]", "sensing_radius");
        }
        fs.fleet.agents.push_back(std::move(a));
    }
    if (j.contains("priority")) {
        if (!j["priority"].is_array() || j["priority"].size() != n_agents)
            throw ConfigError("config: fleet.priority must list every agent once");
        for (const auto& v : j["priority"])
            fs.fleet.priority.push_back(v.get<std::size_t>());
    }
    fs.sim = sim;
    return fs;
}

PlotGeometry geometry_for(const LoadedScenario& ls) {
    PlotGeometry g;
    if (ls.is_fleet) {
        const Fleet& f = ls.fleet->fleet;
        g.kind = "fleet";
        g.dim = f.world.dim();
        g.workspace_radius = f.world.workspace_radius();
        g.obstacles = f.world.obstacles();
        for (const auto& a : f.agents) {
            g.starts.push_back(a.start);
            g.goals.push_back(a.goal);
            g.agent_radii.push_back(a.radius);
        }
        return g;
    }
    const SingleScenario& sc = *ls.single;
    g.starts.push_back(sc.start);
    g.goals.push_back(sc.goal);
    if (sc.map) {
        g.kind = "star";
        g.dim = sc.map->dim();
        g.workspace_radius = sc.map->workspace_radius();
        for (const auto& o : sc.map->obstacles()) {
            std::vector<Vec> poly;
            const int samples = 256;
            for (int k = 0; k < samples; ++k) {
                const double a = 2.0 * std::numbers::pi * k / samples;
                poly.push_back(
                    Vec(o.center + o.profile.rho(a) * vec2(std::cos(a), std::sin(a))));
            }
            g.star_boundaries.push_back(std::move(poly));
        }
    } else {
        g.kind = "sphere";
        g.dim = sc.world->dim();
        g.workspace_radius = sc.world->workspace_radius();
        g.obstacles = sc.world->obstacles();
    }
    return g;
}

}  // namespace

LoadedScenario parse_config(const std::string& text) {
    const json root = parse_json(text);
    require_keys(root, "<top>",
                 {"world", "star_world", "fleet", "plant", "controller", "sim", "output"});
    const int kinds = root.contains("world") + root.contains("star_world") +
                      root.contains("fleet");
    if (kinds != 1)
        throw ConfigError("config: exactly one of 'world', 'star_world', 'fleet' required");

    LoadedScenario ls;
    if (root.contains("output")) {
        require_keys(root["output"], "output", {"dir", "prefix"});
        ls.out_dir = root["output"].value("dir", ".");
        ls.prefix = root["output"].value("prefix", "run");
    }
    SimParams sim = parse_sim_params(root);

    if (root.contains("fleet")) {
        ls.is_fleet = true;
        ls.fleet = parse_fleet(root, root["fleet"], sim);
        ls.geometry = geometry_for(ls);
        return ls;
    }

    SingleScenario sc;
    sc.sim = sim;
    const json& sj = root.contains("sim") ? root["sim"] : json::object();
    int dim = 2;
    if (root.contains("star_world")) {
        sc.map = parse_star_world(root["star_world"]);
        dim = sc.map->dim();
    }
    if (root.contains("world")) dim = static_cast<int>(num_at(root["world"], "world", "dim", 2.0));
    sc.start = vec_at(sj, "sim", "start", dim);
    sc.goal = vec_at(sj, "sim", "goal", dim);
    if (sj.contains("v0")) sc.v0 = vec_at(sj, "sim", "v0", dim);

    if (root.contains("world"))
        sc.world = parse_world(root["world"], {sc.start, sc.goal});

    const ControllerBlock cb = parse_controller(root);
    sc.k1 = cb.k1;
    sc.k2 = cb.k2;
    sc.gains = cb.gains;
    sc.est0 = cb.est0;
    sc.tau_override = cb.tau_override;
    sc.plant = parse_plant(root, dim);
    ls.single = std::move(sc);
    ls.geometry = geometry_for(ls);
    return ls;
}

std::string canonicalize_config(const std::string& text) {
    parse_config(text);  // schema gate
    const json root = parse_json(text);
    return root.dump(2) + "\n";
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
    json root = parse_json(text);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must look like section.key=value: " + kv);
        const std::string path = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;

        json* node = &root;
        std::size_t begin = 0;
        while (true) {
            const std::size_t dot = path.find('.', begin);
            const std::string key = path.substr(begin, dot - begin);
            if (key.empty()) throw ConfigError("override has an empty path segment: " + kv);
            if (dot == std::string::npos) {
                (*node)[key] = value;
                break;
            }
            node = &(*node)[key];
            begin = dot + 1;
        }
    }
    return root.dump(2) + "\n";
}

}  // namespace navsim
