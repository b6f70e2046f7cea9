#include "navsim/barrier.hpp"

#include <cmath>
#include <stdexcept>

namespace navsim {

namespace {

double quintic(double s) { return ((6.0 * s - 15.0) * s + 10.0) * s * s * s; }
double quintic_d1(double s) { return 30.0 * s * s * (s - 1.0) * (s - 1.0); }
double quintic_d2(double s) { return 60.0 * s * (2.0 * s - 1.0) * (s - 1.0); }

void check_positive(double z) {
    if (!(z > 0.0)) throw std::invalid_argument("barrier: argument must be positive");
}

}  // namespace

double beta(const BarrierSpec& spec, double z) {
    check_positive(z);
    if (z >= spec.tau) return 1.0;
    return 1.0 / quintic(z / spec.tau);
}

double beta_prime(const BarrierSpec& spec, double z) {
    check_positive(z);
    if (z >= spec.tau) return 0.0;
    const double s = z / spec.tau;
    const double p = quintic(s);
    return -quintic_d1(s) / (spec.tau * p * p);
}

double beta_second(const BarrierSpec& spec, double z) {
    check_positive(z);
    if (z >= spec.tau) return 0.0;
    const double s = z / spec.tau;
    const double p = quintic(s);
    const double p1 = quintic_d1(s);
    return (2.0 * p1 * p1 - p * quintic_d2(s)) / (spec.tau * spec.tau * p * p * p);
}

double nondegeneracy_margin(double k1, double k2, double rw_bar, double r_under,
                            const BarrierSpec& spec, double d) {
    const double a = d + r_under * r_under;
    return k2 / (2.0 * k1 * rw_bar) * beta_second(spec, d) * a * std::sqrt(a);
}

SaddleThreshold saddle_threshold(double k1, double k2, double rw_bar, double r_under,
                                 const BarrierSpec& spec) {
    if (k1 <= 0.0 || k2 <= 0.0 || rw_bar <= 0.0 || r_under <= 0.0 || spec.tau <= 0.0)
        throw std::invalid_argument("saddle_threshold: inputs must be positive");

    auto margin = [&](double d) { return nondegeneracy_margin(k1, k2, rw_bar, r_under, spec, d); };

    double lo = spec.tau * 1e-15;
    double hi = spec.tau * (1.0 - 1e-15);
    if (margin(lo) <= 1.0) return {0.0, false};  // gains make non-degeneracy unachievable
    if (margin(hi) > 1.0) return {hi, true};     // margin > 1 everywhere inside

    // margin is strictly decreasing: bisect the unique crossing.
    while (hi - lo > 1e-15 * spec.tau) {
        const double mid = 0.5 * (lo + hi);
        if (margin(mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), true};
}

TauSelection select_tau(const FeasibilityReport& report, double k1, double k2,
                        double rw_bar, double r_under, std::size_t num_obstacles) {
    if (!report.ok) throw std::invalid_argument("select_tau: infeasible world report");

    TauSelection sel;
    sel.tau_separation = std::min(report.r_bar * report.r_bar, report.r_bar_d);
    if (num_obstacles == 0) {
        sel.spec.tau = 0.99 * sel.tau_separation;
        return sel;
    }

    const BarrierSpec provisional{sel.tau_separation};
    const SaddleThreshold st = saddle_threshold(k1, k2, rw_bar, r_under, provisional);
    sel.d_star2 = st.d_star2;
    sel.degenerate = !st.achievable;
    sel.spec.tau = 0.99 * std::min(sel.tau_separation, st.achievable ? st.d_star2
                                                                     : sel.tau_separation);
    if (!(sel.spec.tau > 0.0)) throw std::runtime_error("select_tau: no positive tau available");
    return sel;
}

CertifyReport certify_family(const std::function<double(double)>& value,
                             const std::function<double(double)>& second, double tau) {
    CertifyReport rep;
    const int n = 10000;

    rep.strictly_decreasing = true;
    rep.convex_inside = true;
    rep.tilde_decreasing = true;
    double prev = value(tau * (0.5 / n));
    for (int i = 1; i <= n; ++i) {
        const double z = tau * (i + 0.5) / n;
        if (z >= tau) break;
        const double v = value(z);
        if (!(v < prev)) rep.strictly_decreasing = false;
        prev = v;
    }
    for (int i = 1; i < n; ++i) {
        const double z = tau * i / n;
        if (!(second(z) > 0.0)) rep.convex_inside = false;
        const double z2 = 1.01 * z;
        if (z2 < tau) {
            const double t1 = second(z) * z * std::sqrt(z);
            const double t2 = second(z2) * z2 * std::sqrt(z2);
            if (!(t1 > t2)) rep.tilde_decreasing = false;
        }
    }
    rep.blows_up_at_zero = value(tau * 1e-6) > 1e6 * value(tau);
    return rep;
}

CertifyReport certify(const BarrierSpec& spec) {
    return certify_family([&](double z) { return beta(spec, z); },
                          [&](double z) { return beta_second(spec, z); }, spec.tau);
}

}  // namespace navsim
