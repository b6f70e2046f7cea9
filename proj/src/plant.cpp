#include "navsim/plant.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace navsim {

double FrictionModel::default_alpha_bound() const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::viscous: return std::abs(coeff);
        // |sin| <= 1 and the F(v) entries lie in (1, 2].
        case Kind::sinusoidal: return std::abs(coeff) / 8.0;
    }
    return 0.0;
}

Vec friction_eval(const FrictionModel& model, const Vec& x, const Vec& v) {
    if (x.size() != v.size()) throw std::invalid_argument("friction: dimension mismatch");
    switch (model.kind) {
        case FrictionModel::Kind::zero:
            return Vec(Vec::Zero(v.size()));
        case FrictionModel::Kind::viscous:
            return Vec(model.coeff * v);
        case FrictionModel::Kind::sinusoidal: {
            const double s = std::sin(0.5 * (x[0] + x[1]));
            Vec f(v.size());
            for (int i = 0; i < v.size(); ++i) {
                const double sgn = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
                f[i] = (model.coeff / 16.0) * s * (std::exp(-sgn * v[i]) + 1.0) * v[i];
            }
            return f;
        }
    }
    return Vec(Vec::Zero(v.size()));
}

FrictionBoundCheck friction_bound_certify(const FrictionModel& model, double alpha_bound,
                                          int dim, std::size_t samples, double region,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-region, region);
    FrictionBoundCheck out;
    Vec x(dim), v(dim);
    for (std::size_t s = 0; s < samples; ++s) {
        for (int i = 0; i < dim; ++i) {
            x[i] = u(rng);
            v[i] = u(rng);
        }
        const double vn = v.norm();
        if (vn == 0.0) continue;
        out.worst_ratio = std::max(out.worst_ratio, friction_eval(model, x, v).norm() / vn);
    }
    out.ok = out.worst_ratio <= alpha_bound;
    return out;
}

void DisturbanceModel::ensure_params(int dim) const {
    if (kind != Kind::bounded_random) return;
    if (freq_.size() == static_cast<std::size_t>(dim) && built_seed_ == seed) return;
    built_seed_ = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> fr(0.1, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    freq_.resize(dim);
    phase_.resize(dim);
    for (int i = 0; i < dim; ++i) {
        freq_[i] = fr(rng);
        phase_[i] = ph(rng);
    }
}

Vec DisturbanceModel::eval(int dim, double t) const {
    Vec d = Vec::Zero(dim);
    switch (kind) {
        case Kind::none:
            break;
        case Kind::sinusoid:
            d[0] = 2.0 * std::sin(0.5 * t + std::numbers::pi / 3.0);
            d[1] = 2.0 * std::cos(0.4 * t - std::numbers::pi / 4.0);
            break;
        case Kind::bounded_random: {
            ensure_params(dim);
            const double amp = d_bar / std::sqrt(static_cast<double>(dim));
            for (int i = 0; i < dim; ++i) d[i] = amp * std::sin(freq_[i] * t + phase_[i]);
            break;
        }
    }
    return d;
}

double DisturbanceModel::bound(int dim) const {
    switch (kind) {
        case Kind::none: return 0.0;
        case Kind::sinusoid: return 2.0 * std::sqrt(2.0);
        case Kind::bounded_random: return d_bar;
    }
    (void)dim;
    return 0.0;
}

void plant_derivative(const PlantParams& p, const Vec& x, const Vec& v, const Vec& u,
                      double t, Vec& xdot, Vec& vdot) {
    if (p.m <= 0.0) throw std::invalid_argument("plant: mass must be positive");
    xdot = v;
    Vec resist = friction_eval(p.friction, x, v);
    if (p.disturbance.kind != DisturbanceModel::Kind::none)
        resist += p.disturbance.eval(static_cast<int>(x.size()), t);
    vdot = (u - resist - p.m * p.g) / p.m;
}

}  // namespace navsim
