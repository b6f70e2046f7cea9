#include <doctest.h>

#include <random>

#include "navsim/controller.hpp"
#include "support/oracles.hpp"

using namespace navsim;
using namespace navsim::testing;

namespace {

// Straight-line transcription of the control and adaptation formulas,
// componentwise, kept independent of the library's evaluation path.
struct Transcribed {
    Vec u;
    double m_dot, a_dot;
};

Transcribed transcribe(const ControllerGains& k, const NavField& field, const Vec& x,
                       const Vec& v, const EstimatorState& est, const Vec& g) {
    const Vec grad = field.grad(x);
    const Mat hess = field.hess(x);
    const int n = static_cast<int>(x.size());
    Vec v_d(n), vd_dot(n), e_v(n), u(n);
    for (int i = 0; i < n; ++i) v_d[i] = -grad[i];
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += hess(i, j) * v[j];
        vd_dot[i] = -acc;
    }
    for (int i = 0; i < n; ++i) e_v[i] = v[i] - v_d[i];
    for (int i = 0; i < n; ++i)
        u[i] = -k.k_phi * grad[i] + est.m_hat * (vd_dot[i] + g[i]) -
               (k.k_v + 1.5 * est.alpha_hat) * e_v[i];
    double dot = 0.0, ev2 = 0.0;
    for (int i = 0; i < n; ++i) {
        dot += e_v[i] * (vd_dot[i] + g[i]);
        ev2 += e_v[i] * e_v[i];
    }
    return {u, -k.k_m * dot - k.sigma_m * est.m_hat, k.k_alpha * ev2 - k.sigma_alpha * est.alpha_hat};
}

NavField test_field() {
    World w(11.0, 0.0, 2, {{vec2(2.0, 0.0), 0.5}});
    const FeasibilityReport rep = validate(w, vec2(5.0, 0.0));
    const TauSelection sel = select_tau(rep, 0.04, 5.0, w.effective_workspace_radius(),
                                        w.min_inflated_radius(), w.num_obstacles());
    return NavField(std::move(w), sel.spec, vec2(5.0, 0.0), 0.04, 5.0);
}

}  // namespace

TEST_SUITE("controller") {

TEST_CASE("equilibrium hold applies the gravity feedforward only") {
    NavField f = test_field();
    ControllerGains k;
    EstimatorState est{1.3, 0.7};
    const Vec g = vec2(0.0, -9.81);
    const Vec u = control(k, f, f.goal(), Vec(Vec::Zero(2)), est, g);
    CHECK(u[0] == doctest::Approx(est.m_hat * g[0]));
    CHECK(u[1] == doctest::Approx(est.m_hat * g[1]));
}

TEST_CASE("pure quadratic region arithmetic") {
    World w(11.0, 0.0, 2, {});
    NavField f(w, BarrierSpec{0.25}, vec2(0.0, 0.0), 1.0, 5.0);
    ControllerGains k;
    k.k_phi = 1.0;
    EstimatorState est{0.0, 0.0};
    const Vec x = vec2(1.0, 0.0);
    const Vec v = f.v_des(x);  // e_v = 0
    const Vec u = control(k, f, x, v, est, Vec(Vec::Zero(2)));
    CHECK(u[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(u[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("independent transcription agrees bit for bit") {
    NavField f = test_field();
    ControllerGains k;
    k.sigma_m = 0.1;
    k.sigma_alpha = 0.1;
    std::mt19937_64 rng(31);
    const Vec g = vec2(0.0, -9.81);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x = sample_free(f.world(), rng, 0.02);
        const Vec v = random_vec(2, rng, 2.0);
        EstimatorState est{random_vec(1, rng, 1.0)[0], std::abs(random_vec(1, rng, 1.0)[0])};
        const ControlEval got = control_and_adapt(k, f, x, v, est, g);
        const Transcribed want = transcribe(k, f, x, v, est, g);
        CHECK(got.u[0] == want.u[0]);
        CHECK(got.u[1] == want.u[1]);
        CHECK(got.m_hat_dot == want.m_dot);
        CHECK(got.alpha_hat_dot == want.a_dot);
    }
}

TEST_CASE("adaptation law arithmetic") {
    World w(11.0, 0.0, 2, {});
    NavField f(w, BarrierSpec{0.25}, vec2(0.0, 0.0), 1.0, 5.0);
    ControllerGains k;
    double m_dot = 0.0, a_dot = 0.0;

    // e_v = 0 and no leakage: both derivatives vanish
    const Vec x = vec2(1.0, 1.0);
    estimator_derivative(k, f, x, f.v_des(x), EstimatorState{0.5, 0.5}, Vec(Vec::Zero(2)),
                         m_dot, a_dot);
    CHECK(m_dot == doctest::Approx(0.0).scale(1.0));
    CHECK(a_dot == doctest::Approx(0.0).scale(1.0));

    // k_m = 0.01, e_v = (1,0), vdot_des + g = (2,0) -> m_dot = -0.02. The
    // plateau makes vdot_des = -2 k1 v, so pick v and g accordingly.
    ControllerGains k2;
    k2.k_m = 0.01;
    NavField f1(w, BarrierSpec{0.25}, vec2(0.0, 0.0), 1.0, 5.0);  // k1 = 1
    const Vec v = Vec(f1.v_des(x) + vec2(1.0, 0.0));              // e_v = (1,0)
    const Vec g = Vec(vec2(2.0, 0.0) + 2.0 * 1.0 * v);            // vdot_des + g = (2,0)
    estimator_derivative(k2, f1, x, v, EstimatorState{0.0, 0.0}, g, m_dot, a_dot);
    CHECK(m_dot == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(a_dot == doctest::Approx(k2.k_alpha * 1.0).epsilon(1e-12));

    // leakage pulls the estimate down when the error is quiet
    ControllerGains k3;
    k3.sigma_alpha = 0.1;
    estimator_derivative(k3, f1, x, f1.v_des(x), EstimatorState{0.0, 1.0}, Vec(Vec::Zero(2)),
                         m_dot, a_dot);
    CHECK(a_dot == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("gains validation") {
    ControllerGains bad;
    bad.k_v = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    ControllerGains sigma;
    sigma.k_v = 0.4;
    sigma.sigma_m = 0.1;
    CHECK_THROWS_AS(sigma.validate(), std::invalid_argument);
    sigma.k_v = 20.0;
    CHECK_NOTHROW(sigma.validate());
}

TEST_CASE("lyapunov diagnostic zero at truth and quadratic in the mass error") {
    NavField f = test_field();
    ControllerGains k;
    const double m_true = 1.0, alpha_true = 1.25;
    const double v0 = lyapunov(k, f, f.goal(), Vec(Vec::Zero(2)),
                               EstimatorState{m_true, alpha_true}, m_true, alpha_true);
    CHECK(v0 == doctest::Approx(0.0).scale(1.0));

    const double delta = 0.37;
    const double v1 = lyapunov(k, f, f.goal(), Vec(Vec::Zero(2)),
                               EstimatorState{m_true + delta, alpha_true}, m_true, alpha_true);
    CHECK(v1 - v0 == doctest::Approx(delta * delta / (2.0 * k.k_m)).epsilon(1e-12));
}

TEST_CASE("identity star map reduces the star controller to the sphere one") {
    NavField f = test_field();
    const StarMap identity(11.0, {});  // no star obstacles: H = id exactly
    ControllerGains k;
    std::mt19937_64 rng(131);
    const Vec g = vec2(0.0, 0.0);
    // The star feedforward uses a finite difference, so agreement is absolute
    // 1e-9 on barrier-quiet states and relative (FD truncation) where a
    // barrier is active.
    for (int trial = 0; trial < 300; ++trial) {
        const Vec x = sample_free(f.world(), rng, 0.02);
        const Vec v = random_vec(2, rng, 1.0);
        EstimatorState est{1.0 + 0.3 * random_vec(1, rng)[0],
                           std::abs(random_vec(1, rng)[0])};
        const ControlEval ref = control_and_adapt(k, f, x, v, est, g);
        const Vec u_star = star_control(k, f, identity, x, v, est, g);
        const double ff_scale = std::abs(est.m_hat) * (f.hess(x) * v).norm();
        CHECK((u_star - ref.u).norm() <= 1e-5 * (1.0 + ff_scale));
        const bool quiet = f.world().margin_obstacle(0, x) >= f.barrier().tau &&
                           f.world().margin_workspace(x) >= f.barrier().tau;
        if (quiet) CHECK((u_star - ref.u).norm() <= 1e-9);
    }
}

TEST_CASE("star reference acceleration is stable under step halving") {
    // 2-obstacle star world with modest shapes
    std::vector<StarObstacle> obs;
    obs.push_back({vec2(-3.0, -3.0),
                   RadialProfile::make_star_polygon(1.2, 0.25, 5, 0.3),
                   0.8,
                   0.5});
    obs.push_back({vec2(0.0, 1.0),
                   RadialProfile::make_star_polygon(1.0, 0.3, 4, 0.0),
                   0.8,
                   0.5});
    StarMap map(8.0, std::move(obs));
    const World target = map.target_world();
    const FeasibilityReport rep = validate(target, map.map(vec2(3.0, 4.0)));
    REQUIRE(rep.ok);
    const TauSelection sel = select_tau(rep, 0.04, 0.2, target.effective_workspace_radius(),
                                        target.min_inflated_radius(), target.num_obstacles());
    NavField field(target, sel.spec, map.map(vec2(3.0, 4.0)), 0.04, 0.2);

    // directional difference of v_des along v at two step sizes; the error
    // should shrink by about 4x (second order)
    auto v_des = [&](const Vec& x) {
        Vec h;
        Mat j;
        map.map_with_jacobian(x, h, j);
        return Vec(-(j.inverse() * field.grad(h)));
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 20; ++trial) {
        // sample inside the blend shells where the map is genuinely curved
        const auto& o = map.obstacles()[rng() % 2];
        const double ang = 3.14159265358979 * u(rng);
        const double s = o.profile.rho(ang) + (0.15 + 0.7 * std::abs(u(rng))) * 0.8;
        const Vec x = Vec(o.center + s * vec2(std::cos(ang), std::sin(ang)));
        if (!map.in_free_space(x) || map.clearance(x) < 0.1) continue;
        const Vec v = random_vec(2, rng, 1.0);
        auto fd = [&](double h) {
            return Vec((v_des(Vec(x + 0.5 * h * v)) - v_des(Vec(x - 0.5 * h * v))) / h);
        };
        const Vec d1 = fd(1e-3);
        const Vec d2 = fd(5e-4);
        const Vec d4 = fd(2.5e-4);
        const double e1 = (d1 - d4).norm();
        const double e2 = (d2 - d4).norm();
        // skip locally-quadratic or roundoff-floor samples
        if (e2 < 1e-9 * std::max(1.0, d4.norm())) continue;
        const double ratio = e1 / e2;  // about 5 for a second-order scheme
        CHECK(ratio > 2.5);
        CHECK(ratio < 9.0);
        ++checked;
    }
    CHECK(checked >= 10);
}

}  // TEST_SUITE
