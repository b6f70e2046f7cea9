#pragma once

#include <vector>

#include "navsim/barrier.hpp"
#include "navsim/world.hpp"

namespace navsim {

// Navigation potential over a sphere world: quadratic goal attraction plus
// one barrier term per obstacle and one for the workspace boundary.
//   phi(x) = k1 |x - goal|^2 + k2 * sum_j beta(d_j(x))
// Immutable; evaluations are pure and reentrant apart from a per-instance
// scratch buffer (guarded use: one evaluation at a time per instance).
class NavField {
public:
    NavField(World world, BarrierSpec spec, Vec goal, double k1, double k2);

    const World& world() const { return world_; }
    const BarrierSpec& barrier() const { return spec_; }
    const Vec& goal() const { return goal_; }
    double k1() const { return k1_; }
    double k2() const { return k2_; }

    double phi(const Vec& x) const;
    // phi minus its plateau value k2 (M+1) beta(tau), so the reported
    // potential vanishes at the goal.
    double phi_normalized(const Vec& x) const;

    Vec grad(const Vec& x) const;
    Mat hess(const Vec& x) const;

    struct Derivs {
        Vec grad;
        Mat hess;
        double min_margin;
    };
    // Gradient and Hessian from a single distance scan.
    Derivs grad_and_hess(const Vec& x) const;

    Vec v_des(const Vec& x) const { return -grad(x); }
    Vec v_des_dot(const Vec& x, const Vec& v) const { return Vec(-(hess(x) * v)); }

private:
    void scan(const Vec& x) const;  // fills margins_, throws outside free space

    World world_;
    BarrierSpec spec_;
    Vec goal_;
    double k1_, k2_;
    mutable std::vector<double> margins_;
};

struct CriticalPoint {
    enum class Kind { goal, saddle, degenerate };
    Vec x;
    Kind kind;
    Eigen::VectorXd eigenvalues;  // ascending
};

struct CriticalPointOptions {
    int angular = 32;        // seeds per ring (2-D)
    int sphere_points = 128; // seeds per shell (3-D)
    int radial = 8;
    int max_newton_iters = 60;
};

struct CriticalPointReport {
    std::vector<CriticalPoint> points;
    std::size_t failed_seeds = 0;
};

// Newton iteration on grad phi = 0 seeded inside the barrier-active annuli
// plus the goal; deduplicates within 1e-6 and classifies by Hessian spectrum.
CriticalPointReport find_critical_points(const NavField& field,
                                         const CriticalPointOptions& opts = {});

// Distance from p to the infinite line through a and b (diagnostics: saddles
// lie on the goal/obstacle-center line).
double distance_to_line(const Vec& p, const Vec& a, const Vec& b);

}  // namespace navsim
