#include "navsim/navfield.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace navsim {

NavField::NavField(World world, BarrierSpec spec, Vec goal, double k1, double k2)
    : world_(std::move(world)), spec_(spec), goal_(std::move(goal)), k1_(k1), k2_(k2) {
    if (k1_ <= 0.0 || k2_ <= 0.0) throw std::invalid_argument("navfield: gains must be positive");
    if (goal_.size() != world_.dim())
        throw std::invalid_argument("navfield: goal dimension mismatch");
    if (spec_.tau <= 0.0) throw std::invalid_argument("navfield: barrier range must be positive");
    // The goal must sit on every barrier plateau, otherwise it is not a
    // critical point of phi.
    std::vector<double> d;
    world_.margins(goal_, d);
    for (double v : d) {
        if (v <= spec_.tau)
            throw std::invalid_argument("navfield: goal too close to an obstacle or the boundary");
    }
}

void NavField::scan(const Vec& x) const {
    world_.margins(x, margins_);
    for (double v : margins_) {
        if (v <= 0.0) throw std::domain_error("navfield: query outside free space");
    }
}

double NavField::phi(const Vec& x) const {
    scan(x);
    double barriers = 0.0;
    for (double d : margins_) barriers += beta(spec_, d);
    return k1_ * (x - goal_).squaredNorm() + k2_ * barriers;
}

double NavField::phi_normalized(const Vec& x) const {
    const double plateau = k2_ * static_cast<double>(world_.num_obstacles() + 1);
    return phi(x) - plateau;
}

NavField::Derivs NavField::grad_and_hess(const Vec& x) const {
    scan(x);
    const int n = world_.dim();
    Derivs out;
    out.grad = 2.0 * k1_ * (x - goal_);
    out.hess = Mat::Zero(n, n);
    double iso = 2.0 * k1_;  // coefficient of the identity block
    double min_d = margins_[0];

    if (margins_[0] < spec_.tau) {  // workspace boundary active
        const double b1 = beta_prime(spec_, margins_[0]);
        const double b2 = beta_second(spec_, margins_[0]);
        out.grad -= 2.0 * k2_ * b1 * x;
        iso -= 2.0 * k2_ * b1;
        out.hess += 4.0 * k2_ * b2 * (x * x.transpose());
    }
    for (std::size_t j = 0; j < world_.num_obstacles(); ++j) {
        const double d = margins_[j + 1];
        min_d = std::min(min_d, d);
        if (d >= spec_.tau) continue;
        const Vec r = x - world_.obstacle(j).center;
        const double b1 = beta_prime(spec_, d);
        const double b2 = beta_second(spec_, d);
        out.grad += 2.0 * k2_ * b1 * r;
        iso += 2.0 * k2_ * b1;
        out.hess += 4.0 * k2_ * b2 * (r * r.transpose());
    }
    out.hess += iso * Mat::Identity(n, n);
    out.hess = 0.5 * (out.hess + Mat(out.hess.transpose()));  // kill float asymmetry
    out.min_margin = min_d;
    return out;
}

Vec NavField::grad(const Vec& x) const { return grad_and_hess(x).grad; }

Mat NavField::hess(const Vec& x) const { return grad_and_hess(x).hess; }

double distance_to_line(const Vec& p, const Vec& a, const Vec& b) {
    const Vec dir = b - a;
    const double len = dir.norm();
    if (len == 0.0) return (p - a).norm();
    const Vec rel = p - a;
    const Vec along = (rel.dot(dir) / (len * len)) * dir;
    return (rel - along).norm();
}

namespace {

std::vector<Vec> unit_directions(int dim, int angular, int sphere_points) {
    std::vector<Vec> dirs;
    if (dim == 2) {
        dirs.reserve(angular);
        for (int a = 0; a < angular; ++a) {
            const double th = 2.0 * std::numbers::pi * a / angular;
            dirs.push_back(vec2(std::cos(th), std::sin(th)));
        }
    } else {
        // Fibonacci sphere
        dirs.reserve(sphere_points);
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int a = 0; a < sphere_points; ++a) {
            const double zc = 1.0 - 2.0 * (a + 0.5) / sphere_points;
            const double rc = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            const double th = ga * a;
            dirs.push_back(vec3(rc * std::cos(th), rc * std::sin(th), zc));
        }
    }
    return dirs;
}

}  // namespace

CriticalPointReport find_critical_points(const NavField& field,
                                         const CriticalPointOptions& opts) {
    const World& w = field.world();
    const int n = w.dim();
    const double tau = field.barrier().tau;

    std::vector<Vec> seeds;
    seeds.push_back(field.goal());
    const auto dirs = unit_directions(n, opts.angular, opts.sphere_points);
    for (std::size_t j = 0; j < w.num_obstacles(); ++j) {
        const double ri2 = w.inflated_radius(j) * w.inflated_radius(j);
        for (int k = 0; k < opts.radial; ++k) {
            // radius covering margins d in (0, tau)
            const double d = tau * (k + 0.5) / opts.radial;
            const double radius = std::sqrt(ri2 + d);
            for (const Vec& u : dirs) {
                seeds.push_back(Vec(w.obstacle(j).center + radius * u));
            }
        }
    }

    const double grad_scale = 2.0 * field.k1() * w.effective_workspace_radius();
    const double gtol = 1e-12 * std::max(1.0, grad_scale);

    CriticalPointReport rep;
    std::vector<Vec> found;
    for (const Vec& seed : seeds) {
        if (!w.in_free_space(seed)) continue;
        Vec x = seed;
        bool converged = false;
        for (int it = 0; it < opts.max_newton_iters; ++it) {
            NavField::Derivs d;
            try {
                d = field.grad_and_hess(x);
            } catch (const std::domain_error&) {
                break;  // stepped out of free space
            }
            if (d.grad.norm() <= gtol) {
                converged = true;
                break;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(d.hess));
            if (!lu.isInvertible()) break;
            Eigen::VectorXd step = lu.solve(Eigen::VectorXd(-d.grad));
            if (!step.allFinite() || step.norm() > w.effective_workspace_radius()) break;
            x += Vec(step);
        }
        if (!converged) {
            ++rep.failed_seeds;
            continue;
        }
        bool dup = false;
        for (const Vec& p : found) {
            if ((p - x).norm() <= 1e-6) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        found.push_back(x);

        const Mat h = field.hess(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
        Eigen::VectorXd ev = es.eigenvalues();
        const double emax = ev.cwiseAbs().maxCoeff();
        CriticalPoint cp;
        cp.x = x;
        cp.eigenvalues = ev;
        if ((ev.cwiseAbs().array() <= 1e-8 * emax).any()) {
            cp.kind = CriticalPoint::Kind::degenerate;
        } else if ((ev.array() > 0.0).all()) {
            cp.kind = CriticalPoint::Kind::goal;
        } else {
            cp.kind = CriticalPoint::Kind::saddle;
        }
        rep.points.push_back(std::move(cp));
    }
    return rep;
}

}  // namespace navsim
