#include "navsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace navsim {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Canvas {
    std::string body;
    double width, height;

    Canvas(double w, double h) : width(w), height(h) {}

    void circle(double cx, double cy, double r, const std::string& style) {
        body += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                "\" style=\"" + style + "\"/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& style) {
        body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                "\" y2=\"" + num(y2) + "\" style=\"" + style + "\"/>\n";
    }
    void poly(const std::string& points, bool closed, const std::string& style) {
        body += std::string(closed ? "<polygon" : "<polyline") + " points=\"" + points +
                "\" style=\"" + style + "\"/>\n";
    }
    void text(double x, double y, const std::string& s) {
        body += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"11\">" + s +
                "</text>\n";
    }
    std::string finish() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
               "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
               num(height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body + "</svg>\n";
    }
};

// World coordinates -> canvas pixels, y flipped.
struct Frame {
    double x0, y0, scale, cx, cy;
    double px(double x) const { return cx + (x - x0) * scale; }
    double py(double y) const { return cy - (y - y0) * scale; }
};

std::string trajectory_svg(const TrajectoryLog& log, const PlotGeometry& g) {
    const double size = 720.0;
    Canvas cv(size, size);
    const double r = g.workspace_radius > 0 ? g.workspace_radius : 1.0;
    Frame f{0.0, 0.0, size * 0.46 / r, size / 2, size / 2};

    cv.circle(f.px(0), f.py(0), r * f.scale, "fill:none;stroke:black;stroke-width:1.5");
    for (const Obstacle& o : g.obstacles) {
        cv.circle(f.px(o.center[0]), f.py(o.center[1]), o.radius * f.scale,
                  "fill:#d62728;fill-opacity:0.55;stroke:#7f1d1d;stroke-width:0.8");
    }
    for (const auto& poly : g.star_boundaries) {
        std::string pts;
        for (const Vec& p : poly) pts += num(f.px(p[0])) + "," + num(f.py(p[1])) + " ";
        cv.poly(pts, true, "fill:#d62728;fill-opacity:0.55;stroke:#7f1d1d;stroke-width:0.8");
    }

    // Agent paths: single runs use x1/x2; fleets use x1_aK/x2_aK.
    const char* palette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                             "#17becf", "#8c564b", "#e377c2", "#bcbd22"};
    std::size_t n_agents = 0;
    while (log.column("x1_a" + std::to_string(n_agents)) >= 0) ++n_agents;
    const bool fleet = n_agents > 0;
    if (!fleet && log.column("x1") >= 0) n_agents = 1;
    for (std::size_t a = 0; a < n_agents; ++a) {
        const std::string sfx = fleet ? "_a" + std::to_string(a) : "";
        const auto xc = log.column("x1" + sfx);
        const auto yc = log.column("x2" + sfx);
        if (xc < 0 || yc < 0) continue;
        // keep paths at plotting resolution
        const std::size_t stride = std::max<std::size_t>(1, log.rows() / 4000);
        std::string pts;
        for (std::size_t rr = 0; rr < log.rows(); rr += stride)
            pts += num(f.px(log.at(rr, xc))) + "," + num(f.py(log.at(rr, yc))) + " ";
        if (log.rows() > 1 && (log.rows() - 1) % stride != 0) {
            const std::size_t last = log.rows() - 1;
            pts += num(f.px(log.at(last, xc))) + "," + num(f.py(log.at(last, yc))) + " ";
        }
        if (!pts.empty()) {
            cv.poly(pts, false,
                    std::string("fill:none;stroke:") + palette[a % 8] + ";stroke-width:1.2");
        }
    }
    for (std::size_t i = 0; i < g.starts.size(); ++i) {
        const Vec& s = g.starts[i];
        cv.circle(f.px(s[0]), f.py(s[1]), 4.0,
                  std::string("fill:none;stroke:") + palette[i % 8] + ";stroke-width:1.5");
    }
    for (std::size_t i = 0; i < g.goals.size(); ++i) {
        const Vec& p = g.goals[i];
        const double x = f.px(p[0]), y = f.py(p[1]);
        const std::string st = std::string("stroke:") + palette[i % 8] + ";stroke-width:1.5";
        cv.line(x - 5, y - 5, x + 5, y + 5, st);
        cv.line(x - 5, y + 5, x + 5, y - 5, st);
    }
    return cv.finish();
}

struct Series {
    std::string label;
    std::ptrdiff_t col;
    const char* color;
};

void panel(Canvas& cv, const TrajectoryLog& log, const std::vector<Series>& series,
           double px0, double py0, double pw, double ph, const std::string& title,
           bool clamp_ymin_zero) {
    cv.line(px0, py0 + ph, px0 + pw, py0 + ph, "stroke:black;stroke-width:1");
    cv.line(px0, py0, px0, py0 + ph, "stroke:black;stroke-width:1");
    cv.text(px0 + 4, py0 + 12, title);
    if (log.rows() < 2) return;

    const auto tc = log.column("t");
    double tmax = log.at(log.rows() - 1, tc);
    if (tmax <= 0) tmax = 1.0;
    double ymin = 1e300, ymax = -1e300;
    for (const Series& s : series) {
        if (s.col < 0) continue;
        for (std::size_t r = 0; r < log.rows(); ++r) {
            ymin = std::min(ymin, log.at(r, s.col));
            ymax = std::max(ymax, log.at(r, s.col));
        }
    }
    if (ymin > ymax) return;
    if (clamp_ymin_zero) ymin = std::min(0.0, ymin);
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto sx = [&](double t) { return px0 + t / tmax * pw; };
    auto sy = [&](double y) { return py0 + ph - (y - ymin) / (ymax - ymin) * ph; };
    if (ymin < 0 && ymax > 0)
        cv.line(px0, sy(0), px0 + pw, sy(0), "stroke:#999;stroke-width:0.6");

    const std::size_t stride = std::max<std::size_t>(1, log.rows() / 4000);
    double label_y = py0 + 24;
    for (const Series& s : series) {
        if (s.col < 0) continue;
        std::string pts;
        for (std::size_t r = 0; r < log.rows(); r += stride)
            pts += num(sx(log.at(r, tc))) + "," + num(sy(log.at(r, s.col))) + " ";
        cv.poly(pts, false, std::string("fill:none;stroke:") + s.color + ";stroke-width:1.1");
        cv.text(px0 + pw - 72, label_y, s.label);
        cv.line(px0 + pw - 86, label_y - 4, px0 + pw - 76, label_y - 4,
                std::string("stroke:") + s.color + ";stroke-width:2");
        label_y += 14;
    }
    cv.text(px0 + pw - 30, py0 + ph + 14, "t [s]");
    cv.text(px0, py0 + ph + 14, num(ymin + pad) + " .. " + num(ymax - pad));
}

std::string signals_svg(const TrajectoryLog& log) {
    Canvas cv(900, 360);
    std::vector<Series> inputs;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c"};
    for (int i = 1; i <= 3; ++i) {
        const auto c = log.column("u" + std::to_string(i));
        if (c >= 0) inputs.push_back({"u" + std::to_string(i), c, palette[i - 1]});
    }
    panel(cv, log, inputs, 50, 30, 360, 270, "input", false);
    std::vector<Series> est = {{"m_hat", log.column("m_hat"), "#1f77b4"},
                               {"alpha_hat", log.column("alpha_hat"), "#d62728"}};
    panel(cv, log, est, 490, 30, 360, 270, "estimates", false);
    return cv.finish();
}

std::string beta_min_svg(const TrajectoryLog& log) {
    Canvas cv(560, 360);
    auto c = log.column("beta_min");
    std::string label = "beta_min";
    if (c < 0) {
        c = log.column("min_clearance");
        label = "min_clearance";
    }
    panel(cv, log, {{label, c, "#1f77b4"}}, 50, 30, 460, 280, label, true);
    return cv.finish();
}

}  // namespace

std::string render_svg(const TrajectoryLog& log, const PlotGeometry& g,
                       const std::string& kind) {
    if (kind == "trajectory") return trajectory_svg(log, g);
    if (kind == "signals") return signals_svg(log);
    if (kind == "beta-min" || kind == "beta_min") return beta_min_svg(log);
    throw std::invalid_argument("svg: unknown plot kind '" + kind + "'");
}

}  // namespace navsim
