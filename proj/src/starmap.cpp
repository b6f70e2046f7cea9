#include "navsim/starmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace navsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double quintic(double s) { return ((6.0 * s - 15.0) * s + 10.0) * s * s * s; }
double quintic_d1(double s) { return 30.0 * s * s * (s - 1.0) * (s - 1.0); }

// Periodic cubic spline with uniform knots over [0, 2pi); returns second
// derivatives at the knots (cyclic tridiagonal solve, dense is fine at this
// size).
std::vector<double> periodic_spline_m(const std::vector<double>& y) {
    const int k = static_cast<int>(y.size());
    const double h = kTwoPi / k;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
        a(i, (i + k - 1) % k) += 1.0;
        a(i, i) += 4.0;
        a(i, (i + 1) % k) += 1.0;
        rhs(i) = 6.0 / (h * h) *
                 (y[(i + k - 1) % k] - 2.0 * y[i] + y[(i + 1) % k]);
    }
    Eigen::VectorXd m = a.partialPivLu().solve(rhs);
    return {m.data(), m.data() + k};
}

}  // namespace

RadialProfile RadialProfile::make_disk(double radius) {
    RadialProfile p;
    p.kind = Kind::disk;
    p.base_radius = radius;
    return p;
}

RadialProfile RadialProfile::make_star_polygon(double base, double amplitude, int lobes,
                                               double phase) {
    RadialProfile p;
    p.kind = Kind::cosine_lobes;
    p.base_radius = base;
    p.amplitude = amplitude;
    p.lobes = lobes;
    p.phase = phase;
    return p;
}

RadialProfile RadialProfile::make_spline(std::vector<double> radii) {
    RadialProfile p;
    p.kind = Kind::spline;
    p.control_radii = std::move(radii);
    return p;
}

void RadialProfile::ensure_spline() const {
    if (kind != Kind::spline) return;
    if (control_radii.size() < 3)
        throw std::invalid_argument("radial profile: spline needs >= 3 radii");
    if (spline_m_.size() != control_radii.size()) spline_m_ = periodic_spline_m(control_radii);
}

double RadialProfile::rho(double angle) const {
    switch (kind) {
        case Kind::disk:
            return base_radius;
        case Kind::cosine_lobes:
            return base_radius * (1.0 + amplitude * std::cos(lobes * angle + phase));
        case Kind::spline: {
            ensure_spline();
            const int k = static_cast<int>(control_radii.size());
            const double h = kTwoPi / k;
            double a = std::fmod(angle, kTwoPi);
            if (a < 0.0) a += kTwoPi;
            const int i = std::min(static_cast<int>(a / h), k - 1);
            const int j = (i + 1) % k;
            const double t = a - i * h;
            const double y0 = control_radii[i], y1 = control_radii[j];
            const double m0 = spline_m_[i], m1 = spline_m_[j];
            return m0 * (h - t) * (h - t) * (h - t) / (6.0 * h) + m1 * t * t * t / (6.0 * h) +
                   (y0 / h - m0 * h / 6.0) * (h - t) + (y1 / h - m1 * h / 6.0) * t;
        }
    }
    return base_radius;
}

double RadialProfile::drho(double angle) const {
    switch (kind) {
        case Kind::disk:
            return 0.0;
        case Kind::cosine_lobes:
            return -base_radius * amplitude * lobes * std::sin(lobes * angle + phase);
        case Kind::spline: {
            ensure_spline();
            const int k = static_cast<int>(control_radii.size());
            const double h = kTwoPi / k;
            double a = std::fmod(angle, kTwoPi);
            if (a < 0.0) a += kTwoPi;
            const int i = std::min(static_cast<int>(a / h), k - 1);
            const int j = (i + 1) % k;
            const double t = a - i * h;
            const double y0 = control_radii[i], y1 = control_radii[j];
            const double m0 = spline_m_[i], m1 = spline_m_[j];
            return -m0 * (h - t) * (h - t) / (2.0 * h) + m1 * t * t / (2.0 * h) +
                   (y1 - y0) / h - (m1 - m0) * h / 6.0;
        }
    }
    return 0.0;
}

double RadialProfile::rho_min() const {
    if (kind == Kind::disk) return base_radius;
    if (kind == Kind::cosine_lobes) return base_radius * (1.0 - std::abs(amplitude));
    double m = rho(0.0);
    for (int i = 1; i < 4096; ++i) m = std::min(m, rho(kTwoPi * i / 4096));
    return m;
}

double RadialProfile::rho_max() const {
    if (kind == Kind::disk) return base_radius;
    if (kind == Kind::cosine_lobes) return base_radius * (1.0 + std::abs(amplitude));
    double m = rho(0.0);
    for (int i = 1; i < 4096; ++i) m = std::max(m, rho(kTwoPi * i / 4096));
    return m;
}

StarMap::StarMap(double workspace_radius, std::vector<StarObstacle> obstacles)
    : r_w_(workspace_radius), obstacles_(std::move(obstacles)) {
    if (r_w_ <= 0.0) throw std::invalid_argument("starmap: workspace radius must be positive");
    if (!obstacles_.empty()) dim_ = static_cast<int>(obstacles_[0].center.size());
    if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("starmap: dimension must be 2 or 3");
    for (const auto& o : obstacles_) {
        if (o.center.size() != dim_)
            throw std::invalid_argument("starmap: obstacle center dimension mismatch");
        if (o.profile.rho_min() <= 0.0)
            throw std::invalid_argument("starmap: boundary radius must stay positive");
        if (o.influence_margin <= 0.0)
            throw std::invalid_argument("starmap: influence margin must be positive");
        if (o.target_radius <= 0.0)
            throw std::invalid_argument("starmap: target radius must be positive");
        o.profile.rho(0.0);  // warms any spline state before concurrent use
    }
}

World StarMap::target_world() const {
    std::vector<Obstacle> obs;
    obs.reserve(obstacles_.size());
    for (const auto& o : obstacles_) obs.push_back({o.center, o.target_radius});
    return World(r_w_, 0.0, dim_, std::move(obs));
}

namespace {

struct LocalFrame {
    double s;        // |x - p|
    Vec unit;        // (x - p)/s
    double rho;      // boundary radius along unit
    double drho;     // profile derivative w.r.t. the angle parameter
    Vec grad_angle;  // spatial gradient of the angle parameter (0 at 3-D poles)
};

LocalFrame local_frame(const StarObstacle& o, const Vec& x) {
    LocalFrame f;
    const Vec y = x - o.center;
    f.s = y.norm();
    if (f.s == 0.0) throw std::domain_error("starmap: query at an obstacle center");
    f.unit = y / f.s;
    if (x.size() == 2) {
        const double psi = std::atan2(y[1], y[0]);
        f.rho = o.profile.rho(psi);
        f.drho = o.profile.drho(psi);
        f.grad_angle = vec2(-y[1], y[0]) / (f.s * f.s);
    } else {
        const double c = std::clamp(y[2] / f.s, -1.0, 1.0);
        const double omega = std::acos(c);
        f.rho = o.profile.rho(omega);
        f.drho = o.profile.drho(omega);
        const double sin_om = std::sqrt(std::max(0.0, 1.0 - c * c));
        if (sin_om < 1e-12) {
            // Axisymmetric profiles have drho = 0 on the axis.
            f.grad_angle = Vec::Zero(3);
            f.drho = 0.0;
        } else {
            Vec e3 = vec3(0.0, 0.0, 1.0);
            f.grad_angle = Vec(-(e3 - c * f.unit) / (f.s * sin_om));
        }
    }
    return f;
}

}  // namespace

bool StarMap::in_free_space(const Vec& x) const {
    if (x.size() != dim_) throw std::invalid_argument("starmap: query dimension mismatch");
    if (x.norm() >= r_w_) return false;
    for (const auto& o : obstacles_) {
        const double s = (x - o.center).norm();
        if (s == 0.0) return false;
        if (s > o.profile.rho_max()) continue;
        if (s <= local_frame(o, x).rho) return false;
    }
    return true;
}

double StarMap::clearance(const Vec& x) const {
    double c = r_w_ - x.norm();
    for (const auto& o : obstacles_) {
        const LocalFrame f = local_frame(o, x);
        c = std::min(c, f.s - f.rho);
    }
    return c;
}

void StarMap::map_with_jacobian(const Vec& x, Vec& h, Mat& jac) const {
    if (x.size() != dim_) throw std::invalid_argument("starmap: query dimension mismatch");
    const int n = dim_;
    h = x;
    jac = Mat::Identity(n, n);
    for (const auto& o : obstacles_) {
        const double s_quick = (x - o.center).norm();
        if (s_quick >= o.profile.rho_max() + o.influence_margin) continue;  // identity branch
        const LocalFrame f = local_frame(o, x);
        if (f.s < f.rho - 1e-9 * std::max(1.0, f.rho))
            throw std::domain_error("starmap: query inside a star obstacle");
        const double w = std::max(0.0, (f.s - f.rho) / o.influence_margin);
        if (w >= 1.0) continue;
        const double sigma = 1.0 - quintic(w);
        const double dsigma_dw = -quintic_d1(w);
        const double delta = o.target_radius - f.rho;  // radial displacement at the boundary

        // H = x + sigma * delta * unit
        const Vec grad_rho = f.drho * f.grad_angle;            // spatial gradient of rho
        const Vec grad_w = Vec((f.unit - grad_rho) / o.influence_margin);
        const Vec grad_sigma = dsigma_dw * grad_w;
        const Vec grad_delta = -grad_rho;
        const Mat unit_jac = (Mat::Identity(n, n) - f.unit * f.unit.transpose()) / f.s;

        h += sigma * delta * f.unit;
        jac += f.unit * (delta * grad_sigma + sigma * grad_delta).transpose() +
               (sigma * delta) * unit_jac;
    }
}

Vec StarMap::map(const Vec& x) const {
    Vec h;
    Mat j;
    map_with_jacobian(x, h, j);
    return h;
}

Mat StarMap::jacobian(const Vec& x) const {
    Vec h;
    Mat j;
    map_with_jacobian(x, h, j);
    return j;
}

StarMapReport validate_map(const StarMap& map, int grid_resolution) {
    StarMapReport rep;
    const int n = map.dim();
    const auto& obs = map.obstacles();

    rep.shells_inside_workspace = true;
    rep.shells_disjoint = true;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double reach_i = obs[i].profile.rho_max() + obs[i].influence_margin;
        if (obs[i].center.norm() + reach_i >= map.workspace_radius()) {
            rep.shells_inside_workspace = false;
            rep.failures.push_back("shell " + std::to_string(i) + " reaches the boundary");
        }
        for (std::size_t j = i + 1; j < obs.size(); ++j) {
            const double reach_j = obs[j].profile.rho_max() + obs[j].influence_margin;
            if ((obs[i].center - obs[j].center).norm() <= reach_i + reach_j) {
                rep.shells_disjoint = false;
                rep.failures.push_back("shells " + std::to_string(i) + "/" + std::to_string(j) +
                                       " overlap");
            }
        }
    }

    // Boundary points must land on the target spheres.
    rep.max_boundary_residual = 0.0;
    const int boundary_samples = 1000;
    for (std::size_t j = 0; j < obs.size(); ++j) {
        for (int k = 0; k < boundary_samples; ++k) {
            Vec u;
            double angle;
            if (n == 2) {
                angle = kTwoPi * k / boundary_samples;
                u = vec2(std::cos(angle), std::sin(angle));
            } else {
                const double zc = 1.0 - 2.0 * (k + 0.5) / boundary_samples;
                const double rc = std::sqrt(std::max(0.0, 1.0 - zc * zc));
                const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0)) * k;
                u = vec3(rc * std::cos(ga), rc * std::sin(ga), zc);
                angle = std::acos(zc);
            }
            const Vec xb = Vec(obs[j].center + obs[j].profile.rho(angle) * u);
            const Vec hb = map.map(xb);
            rep.max_boundary_residual =
                std::max(rep.max_boundary_residual,
                         std::abs((hb - obs[j].center).norm() - obs[j].target_radius));
        }
    }

    // Jacobian regularity over a free-space grid.
    rep.min_abs_det = std::numeric_limits<double>::infinity();
    const double r = map.workspace_radius();
    const int g = std::max(grid_resolution, 8);
    Vec x(n);
    Vec h;
    Mat jac;
    auto visit = [&](const Vec& pt) {
        if (!map.in_free_space(pt)) return;
        map.map_with_jacobian(pt, h, jac);
        rep.min_abs_det = std::min(rep.min_abs_det, std::abs(Eigen::MatrixXd(jac).determinant()));
    };
    if (n == 2) {
        for (int i = 0; i <= g; ++i) {
            for (int j = 0; j <= g; ++j) {
                visit(vec2(-r + 2.0 * r * i / g, -r + 2.0 * r * j / g));
            }
        }
    } else {
        const int g3 = std::max(g / 3, 8);
        for (int i = 0; i <= g3; ++i)
            for (int j = 0; j <= g3; ++j)
                for (int k = 0; k <= g3; ++k)
                    visit(vec3(-r + 2.0 * r * i / g3, -r + 2.0 * r * j / g3,
                               -r + 2.0 * r * k / g3));
    }
    if (!std::isfinite(rep.min_abs_det)) rep.min_abs_det = 0.0;

    if (rep.min_abs_det <= 1e-6) rep.failures.push_back("jacobian determinant too small");
    if (rep.max_boundary_residual > 1e-6) rep.failures.push_back("boundary residual too large");
    rep.ok = rep.shells_inside_workspace && rep.shells_disjoint && rep.min_abs_det > 1e-6 &&
             rep.max_boundary_residual <= 1e-6;
    return rep;
}

}  // namespace navsim
