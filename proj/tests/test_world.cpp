#include <doctest.h>

#include <random>

#include "navsim/world.hpp"
#include "support/oracles.hpp"

using namespace navsim;
using navsim::testing::sample_free;

TEST_SUITE("world") {

TEST_CASE("obstacle margin arithmetic") {
    World w(11.0, 0.0, 2, {{vec2(5.0, 5.0), 0.75}});
    CHECK(w.margin_obstacle(0, vec2(5.0, 6.0)) == doctest::Approx(0.4375).epsilon(1e-15));
    // on the inflated boundary
    CHECK(w.margin_obstacle(0, vec2(5.0 + 0.75, 5.0)) == doctest::Approx(0.0).scale(1.0));
    // at the center
    CHECK(w.margin_obstacle(0, vec2(5.0, 5.0)) == doctest::Approx(-0.5625).epsilon(1e-15));
    CHECK_THROWS_AS((void)w.margin_obstacle(1, vec2(0, 0)), std::out_of_range);
}

TEST_CASE("workspace margin arithmetic") {
    World plain(11.0, 0.0, 2, {});
    CHECK(plain.margin_workspace(vec2(0, 0)) == 121.0);
    World inflated(11.0, 1.0, 2, {});
    CHECK(inflated.margin_workspace(vec2(6.0, 8.0)) == doctest::Approx(0.0).scale(1.0));
    CHECK(plain.margin_workspace(vec2(11.0, 0.0)) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("free-space membership") {
    World w(11.0, 0.0, 2, {{vec2(5.0, 5.0), 0.75}});
    CHECK(w.in_free_space(vec2(0, 0)));
    CHECK(w.in_free_space(vec2(5.0, 6.0)));      // margin 0.4375
    CHECK_FALSE(w.in_free_space(vec2(5.0, 5.2)));  // inside the inflated ball
    CHECK_FALSE(w.in_free_space(vec2(12.0, 0.0)));
}

TEST_CASE("free space iff all margins positive, sampled") {
    World w(8.0, 0.25, 2, {{vec2(2.0, 1.0), 0.5}, {vec2(-3.0, -2.0), 1.0}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-9.0, 9.0);
    std::vector<double> d;
    for (int k = 0; k < 5000; ++k) {
        const Vec x = vec2(u(rng), u(rng));
        w.margins(x, d);
        bool all_pos = true;
        for (double v : d) all_pos = all_pos && v > 0.0;
        CHECK(w.in_free_space(x) == all_pos);
        CHECK((w.clearance(x) > 0.0) == all_pos);
    }
}

TEST_CASE("margins are exactly quadratic: fd hessian equals 2I") {
    World w(6.0, 0.1, 3, {{vec3(1.0, 2.0, -1.0), 0.4}});
    auto f = [&](const Vec& x) { return w.margin_obstacle(0, x); };
    const Mat h = navsim::testing::fd_hessian(f, vec3(0.3, -0.8, 0.9), 1e-2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(h(i, j) - (i == j ? 2.0 : 0.0)) <= 1e-8);
}

TEST_CASE("validate computes the margin from the worst slack") {
    World w(10.0, 0.5, 2, {{vec2(0.0, 4.0), 1.0}});
    const FeasibilityReport rep = validate(w, vec2(0.0, 0.0));
    CHECK(rep.ok);
    // boundary slack = 10 - 4 - 1 - 1 = 4
    CHECK(rep.r_bar == doctest::Approx(0.99 * 2.0).epsilon(1e-12));
    // goal clearance: min((10-0.5)^2 - 0, |g-c|^2 - 1.5^2)
    CHECK(rep.r_bar_d == doctest::Approx(16.0 - 2.25).epsilon(1e-12));
}

TEST_CASE("validate rejects zero-slack pairs by name") {
    // centers exactly r1 + r2 + 2r apart
    World w(20.0, 0.5, 2, {{vec2(-2.0, 0.0), 1.0}, {vec2(1.0, 0.0), 1.0}});
    const FeasibilityReport rep = validate(w, vec2(0.0, 5.0));
    CHECK_FALSE(rep.ok);
    REQUIRE_FALSE(rep.violations.empty());
    CHECK(rep.violations[0].what == "obstacle 0 / obstacle 1");
}

TEST_CASE("obstacle-free world") {
    World w(11.0, 0.5, 2, {});
    const FeasibilityReport rep = validate(w, vec2(0.0, 0.0));
    CHECK(rep.ok);
    CHECK(rep.r_bar > 0.0);
    CHECK(rep.r_bar_d == doctest::Approx(10.5 * 10.5));
}

TEST_CASE("accepted margin satisfies the strict spacing inequalities") {
    RandomWorldSpec spec;
    spec.num_obstacles = 40;
    spec.seed = 3;
    const World w = make_random_world(spec);
    const FeasibilityReport rep = validate(w, vec2(5.0, 5.0));
    REQUIRE(rep.ok);
    const auto& obs = w.obstacles();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        for (std::size_t j = i + 1; j < obs.size(); ++j) {
            CHECK((obs[i].center - obs[j].center).norm() >
                  obs[i].radius + obs[j].radius + 2.0 * w.robot_radius() + 2.0 * rep.r_bar);
        }
        CHECK(w.workspace_radius() - obs[i].center.norm() >
              obs[i].radius + 2.0 * w.robot_radius() + 2.0 * rep.r_bar);
    }
}

TEST_CASE("random worlds honor protected points and statistics") {
    RandomWorldSpec spec;
    spec.num_obstacles = 60;
    spec.seed = 11;
    spec.protected_points = {vec2(5.0, 5.0), vec2(-5.0, -5.0)};
    spec.protect_clearance = 1.0;
    const World w = make_random_world(spec);
    REQUIRE(w.num_obstacles() == 60);
    for (const auto& o : w.obstacles()) {
        CHECK(o.radius >= 0.25);
        CHECK(o.radius <= 0.75);
    }
    for (const auto& p : spec.protected_points) CHECK(w.clearance(p) >= 1.0);
    // same seed, same world
    const World w2 = make_random_world(spec);
    for (std::size_t j = 0; j < 60; ++j) {
        CHECK(w.obstacle(j).center == w2.obstacle(j).center);
        CHECK(w.obstacle(j).radius == w2.obstacle(j).radius);
    }
}

TEST_CASE("count_active counts the workspace margin too") {
    World w(4.0, 0.0, 2, {{vec2(2.0, 0.0), 0.5}});
    // near the obstacle: obstacle margin small, workspace margin large
    CHECK(w.count_active(vec2(1.4, 0.0), 0.2) == 1);
    CHECK(w.count_active(vec2(-3.9, 0.0), 1.0) == 1);  // near the boundary
    CHECK(w.count_active(vec2(0.5, 0.5), 1e-6) == 0);
}

TEST_CASE("construction rejects bad geometry") {
    CHECK_THROWS_AS(World(-1.0, 0.0, 2, {}), std::invalid_argument);
    CHECK_THROWS_AS(World(5.0, 0.0, 4, {}), std::invalid_argument);
    CHECK_THROWS_AS(World(5.0, 0.0, 2, {{vec2(6.0, 0.0), 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(World(5.0, 0.0, 2, {{vec3(1.0, 0.0, 0.0), 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(World(5.0, 0.0, 2, {{vec2(1.0, 0.0), -0.5}}), std::invalid_argument);
}

TEST_CASE("sampled free points stay in free space") {
    World w(8.0, 0.25, 2, {{vec2(2.0, 1.0), 0.5}});
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) CHECK(w.in_free_space(sample_free(w, rng)));
}

}  // TEST_SUITE
