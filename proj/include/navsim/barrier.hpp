#pragma once

#include <functional>

#include "navsim/world.hpp"

namespace navsim {

// Reciprocal quintic barrier with plateau threshold tau (squared-distance
// units): beta(z) = 1/p(z/tau) for z <= tau, 1 beyond, with the smoothstep
// p(s) = 6s^5 - 15s^4 + 10s^3. C^2 at the junction since p'(1) = p''(1) = 0.
struct BarrierSpec {
    double tau;
};

double beta(const BarrierSpec& spec, double z);
double beta_prime(const BarrierSpec& spec, double z);
double beta_second(const BarrierSpec& spec, double z);

// Lower bound on the Hessian-determinant factor at a barrier-active critical
// point: (k2 / (2 k1 rw_bar)) * beta''(d) * (d + r_under^2)^(3/2).
// Decreasing on (0, tau), +inf at 0+, 0 at tau.
double nondegeneracy_margin(double k1, double k2, double rw_bar, double r_under,
                            const BarrierSpec& spec, double d);

struct SaddleThreshold {
    double d_star2 = 0.0;   // largest d** with margin > 1 for all d < d**
    bool achievable = false;  // false when the margin never exceeds 1
};

// Bisection of nondegeneracy_margin(d) = 1 on (0, tau).
SaddleThreshold saddle_threshold(double k1, double k2, double rw_bar, double r_under,
                                 const BarrierSpec& spec);

struct TauSelection {
    BarrierSpec spec{0.0};
    double tau_separation = 0.0;  // min(r_bar^2, r_bar_d) before the saddle cap
    double d_star2 = 0.0;         // 0 for an obstacle-free world (no saddles)
    bool degenerate = false;      // saddle threshold unachievable
};

// tau = 0.99 * min(r_bar^2, r_bar_d, d**); d** computed for the provisional
// spec with tau = min(r_bar^2, r_bar_d). Throws on an infeasible report.
TauSelection select_tau(const FeasibilityReport& report, double k1, double k2,
                        double rw_bar, double r_under, std::size_t num_obstacles);

struct CertifyReport {
    bool strictly_decreasing = false;
    bool blows_up_at_zero = false;
    bool convex_inside = false;        // beta'' > 0 on (0, tau)
    bool tilde_decreasing = false;     // beta''(z) z sqrt(z) strictly decreasing
    bool ok() const {
        return strictly_decreasing && blows_up_at_zero && convex_inside && tilde_decreasing;
    }
};

// Dense-grid certification of the four barrier-family properties for an
// arbitrary (value, second-derivative) pair; used with fakes as negative
// controls in tests.
CertifyReport certify_family(const std::function<double(double)>& value,
                             const std::function<double(double)>& second, double tau);

CertifyReport certify(const BarrierSpec& spec);

}  // namespace navsim
