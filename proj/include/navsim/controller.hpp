#pragma once

#include "navsim/navfield.hpp"
#include "navsim/starmap.hpp"

namespace navsim {

struct ControllerGains {
    double k_phi = 1.0;
    double k_v = 20.0;
    double k_m = 0.01;
    double k_alpha = 0.01;
    double sigma_m = 0.0;      // 0 disables the leakage terms
    double sigma_alpha = 0.0;

    void validate() const;
};

struct EstimatorState {
    double m_hat = 0.0;
    double alpha_hat = 0.0;  // must start nonnegative
};

struct ControlEval {
    Vec u;
    Vec v_des;
    Vec e_v;
    double m_hat_dot = 0.0;
    double alpha_hat_dot = 0.0;
};

// u = -k_phi grad(phi) + m_hat (vdot_des + g) - (k_v + 1.5 alpha_hat) e_v
// m_hat' = -k_m e_v . (vdot_des + g) - sigma_m m_hat
// alpha_hat' = k_alpha |e_v|^2 - sigma_alpha alpha_hat
// The evaluation sees only (x, v, estimates, field); plant truth never enters.
ControlEval control_and_adapt(const ControllerGains& gains, const NavField& field,
                              const Vec& x, const Vec& v, const EstimatorState& est,
                              const Vec& g);

Vec control(const ControllerGains& gains, const NavField& field, const Vec& x, const Vec& v,
            const EstimatorState& est, const Vec& g);

void estimator_derivative(const ControllerGains& gains, const NavField& field, const Vec& x,
                          const Vec& v, const EstimatorState& est, const Vec& g,
                          double& m_hat_dot, double& alpha_hat_dot);

// Star-world variant: the potential is evaluated through the workspace map,
//   v_des = -J(x)^{-1} grad(phi)(H(x)),
//   u = -k_phi J(x)^T grad(phi)(H(x)) + m_hat (vdot_des + g) - (k_v + 1.5 alpha_hat) e_v,
// with vdot_des from a central directional difference of v_des along v.
ControlEval star_control_and_adapt(const ControllerGains& gains, const NavField& field,
                                   const StarMap& map, const Vec& x, const Vec& v,
                                   const EstimatorState& est, const Vec& g);

Vec star_control(const ControllerGains& gains, const NavField& field, const StarMap& map,
                 const Vec& x, const Vec& v, const EstimatorState& est, const Vec& g);

// Diagnostic energy (simulation side; needs the true mass and friction bound):
// V = k_phi phi_n + (m/2)|e_v|^2 + 3/(4 k_alpha) (alpha_hat - alpha)^2
//     + 1/(2 k_m) (m_hat - m)^2.
double lyapunov_value(const ControllerGains& gains, double phi_normalized, const Vec& e_v,
                      const EstimatorState& est, double m_true, double alpha_true);

double lyapunov(const ControllerGains& gains, const NavField& field, const Vec& x, const Vec& v,
                const EstimatorState& est, double m_true, double alpha_true);

}  // namespace navsim
