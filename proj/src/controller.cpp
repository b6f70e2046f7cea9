#include "navsim/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace navsim {

void ControllerGains::validate() const {
    if (k_phi <= 0.0 || k_v <= 0.0 || k_m <= 0.0 || k_alpha <= 0.0)
        throw std::invalid_argument("controller: gains must be positive");
    if (sigma_m < 0.0 || sigma_alpha < 0.0)
        throw std::invalid_argument("controller: leakage gains must be nonnegative");
    if ((sigma_m > 0.0 || sigma_alpha > 0.0) && k_v <= 0.5)
        throw std::invalid_argument("controller: leakage variant requires k_v > 1/2");
}

ControlEval control_and_adapt(const ControllerGains& gains, const NavField& field,
                              const Vec& x, const Vec& v, const EstimatorState& est,
                              const Vec& g) {
    const NavField::Derivs d = field.grad_and_hess(x);
    ControlEval out;
    out.v_des = -d.grad;
    const Vec v_des_dot = Vec(-(d.hess * v));
    out.e_v = v - out.v_des;
    out.u = -gains.k_phi * d.grad + est.m_hat * (v_des_dot + g) -
            (gains.k_v + 1.5 * est.alpha_hat) * out.e_v;
    out.m_hat_dot = -gains.k_m * out.e_v.dot(v_des_dot + g) - gains.sigma_m * est.m_hat;
    out.alpha_hat_dot = gains.k_alpha * out.e_v.squaredNorm() - gains.sigma_alpha * est.alpha_hat;
    return out;
}

Vec control(const ControllerGains& gains, const NavField& field, const Vec& x, const Vec& v,
            const EstimatorState& est, const Vec& g) {
    return control_and_adapt(gains, field, x, v, est, g).u;
}

void estimator_derivative(const ControllerGains& gains, const NavField& field, const Vec& x,
                          const Vec& v, const EstimatorState& est, const Vec& g,
                          double& m_hat_dot, double& alpha_hat_dot) {
    const ControlEval e = control_and_adapt(gains, field, x, v, est, g);
    m_hat_dot = e.m_hat_dot;
    alpha_hat_dot = e.alpha_hat_dot;
}

namespace {

struct MappedGrad {
    Vec grad;   // grad(phi) at H(x)
    Vec v_des;  // -J^{-1} grad
    Mat jac;
};

MappedGrad mapped_grad(const NavField& field, const StarMap& map, const Vec& x) {
    MappedGrad out;
    Vec h;
    map.map_with_jacobian(x, h, out.jac);
    out.grad = field.grad(h);
    const Mat inv = out.jac.inverse();
    const double cond_bound = out.jac.norm() * inv.norm();
    if (!std::isfinite(cond_bound) || cond_bound > 1e12)
        throw std::runtime_error("star controller: map jacobian near-singular");
    out.v_des = -(inv * out.grad);
    return out;
}

}  // namespace

ControlEval star_control_and_adapt(const ControllerGains& gains, const NavField& field,
                                   const StarMap& map, const Vec& x, const Vec& v,
                                   const EstimatorState& est, const Vec& g) {
    const MappedGrad m0 = mapped_grad(field, map, x);
    ControlEval out;
    out.v_des = m0.v_des;
    out.e_v = v - out.v_des;

    // Richardson-extrapolated central directional difference of v_des along
    // v; exact for a locally quadratic potential. The base step balances
    // rounding against truncation for workspace-scale coordinates.
    Vec v_des_dot = Vec::Zero(x.size());
    const double vn = v.norm();
    if (vn > 0.0) {
        auto central = [&](double h) {
            const MappedGrad mp = mapped_grad(field, map, Vec(x + 0.5 * h * v));
            const MappedGrad mm = mapped_grad(field, map, Vec(x - 0.5 * h * v));
            return Vec((mp.v_des - mm.v_des) / h);
        };
        const double h = 1e-4 / std::max(vn, 1.0);
        v_des_dot = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }

    out.u = -gains.k_phi * (m0.jac.transpose() * m0.grad) + est.m_hat * (v_des_dot + g) -
            (gains.k_v + 1.5 * est.alpha_hat) * out.e_v;
    out.m_hat_dot = -gains.k_m * out.e_v.dot(v_des_dot + g) - gains.sigma_m * est.m_hat;
    out.alpha_hat_dot = gains.k_alpha * out.e_v.squaredNorm() - gains.sigma_alpha * est.alpha_hat;
    return out;
}

Vec star_control(const ControllerGains& gains, const NavField& field, const StarMap& map,
                 const Vec& x, const Vec& v, const EstimatorState& est, const Vec& g) {
    return star_control_and_adapt(gains, field, map, x, v, est, g).u;
}

double lyapunov_value(const ControllerGains& gains, double phi_normalized, const Vec& e_v,
                      const EstimatorState& est, double m_true, double alpha_true) {
    const double m_err = est.m_hat - m_true;
    const double a_err = est.alpha_hat - alpha_true;
    return gains.k_phi * phi_normalized + 0.5 * m_true * e_v.squaredNorm() +
           3.0 / (4.0 * gains.k_alpha) * a_err * a_err +
           1.0 / (2.0 * gains.k_m) * m_err * m_err;
}

double lyapunov(const ControllerGains& gains, const NavField& field, const Vec& x, const Vec& v,
                const EstimatorState& est, double m_true, double alpha_true) {
    const Vec e_v = v - field.v_des(x);
    return lyapunov_value(gains, field.phi_normalized(x), e_v, est, m_true, alpha_true);
}

}  // namespace navsim
