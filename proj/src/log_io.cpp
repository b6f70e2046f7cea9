#include "navsim/log_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace navsim {

using nlohmann::json;

std::string to_csv(const TrajectoryLog& log) {
    std::string out;
    out.reserve(log.data.size() * 20 + 256);
    for (std::size_t c = 0; c < log.columns.size(); ++c) {
        if (c) out.push_back(',');
        out += log.columns[c];
    }
    out.push_back('\n');
    char buf[40];
    const std::size_t w = log.width();
    for (std::size_t r = 0; r < log.rows(); ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            if (c) out.push_back(',');
            std::snprintf(buf, sizeof buf, "%.17g", log.at(r, c));
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

TrajectoryLog parse_csv(const std::string& text) {
    TrajectoryLog log;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) log.columns.push_back(cell);
    if (log.columns.empty()) throw std::runtime_error("csv: no columns");

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t begin = 0;
        std::size_t fields = 0;
        while (begin <= line.size()) {
            std::size_t end = line.find(',', begin);
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            const auto res = std::from_chars(line.data() + begin, line.data() + end, v);
            if (res.ec != std::errc())
                throw std::runtime_error("csv: bad number in row " +
                                         std::to_string(log.rows() + 1));
            log.data.push_back(v);
            ++fields;
            begin = end + 1;
            if (end == line.size()) break;
        }
        if (fields != log.columns.size()) throw std::runtime_error("csv: ragged row");
    }
    return log;
}

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
    return v;
}

}  // namespace

std::string summary_to_json(const Summary& s, const std::vector<Event>& events,
                            const PlotGeometry& g) {
    json j;
    j["converged"] = s.converged;
    j["collision"] = s.collision;
    j["aborted"] = s.aborted;
    j["convergence_time"] = s.convergence_time;
    j["terminal_goal_error"] = s.terminal_goal_error;
    j["min_clearance"] = s.min_clearance;
    j["max_input_norm"] = s.max_input_norm;
    j["v_ascent_steps"] = s.v_ascent_steps;
    j["alpha_decreases"] = s.alpha_decreases;
    j["min_beta_min"] = s.min_beta_min;
    j["agent_convergence_times"] = s.agent_convergence_times;
    j["promotions"] = s.promotions;
    j["steps"] = s.steps;
    j["tau"] = s.tau;
    j["d_star2"] = s.d_star2;
    j["warnings"] = s.warnings;
    j["exit_code"] = s.exit_code;

    json ev = json::array();
    for (const Event& e : events) {
        ev.push_back({{"t", e.t}, {"kind", event_kind_name(e.kind)}, {"detail", e.detail}});
    }
    j["events"] = ev;

    json geo;
    geo["kind"] = g.kind;
    geo["workspace_radius"] = g.workspace_radius;
    geo["dim"] = g.dim;
    json obs = json::array();
    for (const Obstacle& o : g.obstacles)
        obs.push_back({{"c", vec_to_json(o.center)}, {"r", o.radius}});
    geo["obstacles"] = obs;
    json polys = json::array();
    for (const auto& poly : g.star_boundaries) {
        json p = json::array();
        for (const Vec& v : poly) p.push_back(vec_to_json(v));
        polys.push_back(p);
    }
    geo["star_boundaries"] = polys;
    json starts = json::array(), goals = json::array();
    for (const Vec& v : g.starts) starts.push_back(vec_to_json(v));
    for (const Vec& v : g.goals) goals.push_back(vec_to_json(v));
    geo["starts"] = starts;
    geo["goals"] = goals;
    geo["agent_radii"] = g.agent_radii;
    j["geometry"] = geo;
    return j.dump(2) + "\n";
}

void parse_summary_json(const std::string& text, Summary& s, std::vector<Event>& events,
                        PlotGeometry& g) {
    const json j = json::parse(text);
    s.converged = j.value("converged", false);
    s.collision = j.value("collision", false);
    s.aborted = j.value("aborted", false);
    s.convergence_time = j.value("convergence_time", -1.0);
    s.terminal_goal_error = j.value("terminal_goal_error", 0.0);
    s.min_clearance = j.value("min_clearance", 0.0);
    s.max_input_norm = j.value("max_input_norm", 0.0);
    s.v_ascent_steps = j.value("v_ascent_steps", std::size_t{0});
    s.alpha_decreases = j.value("alpha_decreases", std::size_t{0});
    s.min_beta_min = j.value("min_beta_min", 0.0);
    s.agent_convergence_times = j.value("agent_convergence_times", std::vector<double>{});
    s.promotions = j.value("promotions", std::size_t{0});
    s.steps = j.value("steps", std::size_t{0});
    s.tau = j.value("tau", 0.0);
    s.d_star2 = j.value("d_star2", 0.0);
    s.warnings = j.value("warnings", std::vector<std::string>{});
    s.exit_code = j.value("exit_code", 4);

    events.clear();
    for (const auto& e : j.value("events", json::array())) {
        Event ev;
        ev.t = e.value("t", 0.0);
        ev.detail = e.value("detail", "");
        const std::string kind = e.value("kind", "horizon");
        if (kind == "converged") ev.kind = Event::Kind::converged;
        else if (kind == "collision") ev.kind = Event::Kind::collision;
        else if (kind == "phase_promotion") ev.kind = Event::Kind::promotion;
        else if (kind == "aborted") ev.kind = Event::Kind::aborted;
        else ev.kind = Event::Kind::horizon;
        events.push_back(ev);
    }

    g = PlotGeometry{};
    if (!j.contains("geometry")) return;
    const json& geo = j["geometry"];
    g.kind = geo.value("kind", "sphere");
    g.workspace_radius = geo.value("workspace_radius", 0.0);
    g.dim = geo.value("dim", 2);
    for (const auto& o : geo.value("obstacles", json::array()))
        g.obstacles.push_back({vec_from_json(o["c"]), o["r"].get<double>()});
    for (const auto& poly : geo.value("star_boundaries", json::array())) {
        std::vector<Vec> pts;
        for (const auto& v : poly) pts.push_back(vec_from_json(v));
        g.star_boundaries.push_back(std::move(pts));
    }
    for (const auto& v : geo.value("starts", json::array())) g.starts.push_back(vec_from_json(v));
    for (const auto& v : geo.value("goals", json::array())) g.goals.push_back(vec_from_json(v));
    g.agent_radii = geo.value("agent_radii", std::vector<double>{});
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace navsim
