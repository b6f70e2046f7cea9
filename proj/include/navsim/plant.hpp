#pragma once

#include <cstdint>
#include <vector>

#include "navsim/types.hpp"

namespace navsim {

// Simulation-side truth: mass, friction and disturbance. The controller never
// sees any of this beyond the measured (x, v).

struct FrictionModel {
    enum class Kind { zero, viscous, sinusoidal };
    Kind kind = Kind::zero;
    // viscous: f = coeff * v.
    // sinusoidal: f = (coeff/16) sin(0.5 (x1+x2)) F(v) v,
    //             F(v) = diag(exp(-sgn(v_i) v_i) + 1), sgn(0) = 0.
    double coeff = 0.0;

    // Tight velocity-gain bound implied by the model: 0, coeff, or coeff/8.
    double default_alpha_bound() const;
};

Vec friction_eval(const FrictionModel& model, const Vec& x, const Vec& v);

struct FrictionBoundCheck {
    bool ok = false;
    double worst_ratio = 0.0;
};

// Monte-Carlo max of |f|/|v| over |x|_inf <= region, |v|_inf <= region.
FrictionBoundCheck friction_bound_certify(const FrictionModel& model, double alpha_bound,
                                          int dim, std::size_t samples, double region,
                                          std::uint64_t seed);

struct DisturbanceModel {
    enum class Kind { none, sinusoid, bounded_random };
    Kind kind = Kind::none;
    double d_bar = 0.0;      // bounded_random amplitude bound
    std::uint64_t seed = 0;  // bounded_random phase/frequency seed

    // Smooth in t and deterministic per seed so stage evaluations inside one
    // integration step are consistent.
    Vec eval(int dim, double t) const;
    double bound(int dim) const;

private:
    mutable std::vector<double> freq_, phase_;
    mutable std::uint64_t built_seed_ = ~std::uint64_t{0};
    void ensure_params(int dim) const;
};

struct PlantParams {
    double m = 1.0;
    Vec g;  // enters the dynamics as m*vdot + f + m*g + d = u
    FrictionModel friction;
    DisturbanceModel disturbance;
    double alpha_true = 0.0;  // declared velocity-gain bound for the friction
};

// xdot = v; vdot = (u - f(x,v) - m g - d(x,v,t)) / m.
void plant_derivative(const PlantParams& p, const Vec& x, const Vec& v, const Vec& u,
                      double t, Vec& xdot, Vec& vdot);

}  // namespace navsim
