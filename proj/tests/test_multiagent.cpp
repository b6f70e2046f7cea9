#include <doctest.h>

#include <random>

#include "navsim/multiagent.hpp"
#include "support/oracles.hpp"

using namespace navsim;
using namespace navsim::testing;

namespace {

// Three agents, one obstacle, generous workspace; radii and margins shaped
// like the fleet experiments (r_i = r_oj = 2, r_bar = 4).
Fleet small_fleet() {
    Fleet f;
    f.world = World(80.0, 0.0, 2, {{vec2(0.0, 30.0), 2.0}});
    f.r_bar = 4.0;
    f.eps = 0.1;
    auto agent = [&](Vec start, Vec goal) {
        FleetAgentSpec a;
        a.radius = 2.0;
        a.start = std::move(start);
        a.goal = std::move(goal);
        a.k1 = 0.04;
        a.k2 = 5.0;
        a.gains = ControllerGains{};
        a.plant.g = Vec::Zero(2);
        a.plant.m = 1.0;
        a.sensing_radius = 20.0;
        return a;
    };
    f.agents.push_back(agent(vec2(-40.0, 0.0), vec2(40.0, 0.0)));
    f.agents.push_back(agent(vec2(40.0, 20.0), vec2(-40.0, 20.0)));
    f.agents.push_back(agent(vec2(0.0, -40.0), vec2(20.0, 40.0)));
    return f;
}

}  // namespace

TEST_SUITE("multiagent") {

TEST_CASE("fleet validation selects a usable shared range") {
    Fleet f = small_fleet();
    const FleetValidation v = validate_fleet(f, true);
    REQUIRE(v.ok);
    CHECK(f.agent_barrier.tau == doctest::Approx(0.99 * v.tau_bound));
    CHECK(v.tau_bound <= f.r_bar * f.r_bar);
    CHECK(f.r_max == 2.0);
    CHECK(f.priority.size() == 3);
}

TEST_CASE("follower inflation exceeds the leader inflation by 2 r_max + 2 r_bar") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    const FleetPhase ph = initial_phase(f);
    std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};

    const std::size_t lead = ph.leader;
    std::size_t follower = (lead + 1) % 3;
    const auto lead_d = agent_distances(f, ph, lead, pos);
    const auto foll_d = agent_distances(f, ph, follower, pos);

    auto find = [](const std::vector<AgentDistance>& ds, AgentDistance::Kind k,
                   std::size_t index) {
        for (const auto& d : ds)
            if (d.kind == k && d.index == index) return d.value;
        REQUIRE(false);
        return 0.0;
    };

    // obstacle margins: follower subtracts the enlarged inflation
    const double dl = find(lead_d, AgentDistance::Kind::obstacle, 0);
    const double df = find(foll_d, AgentDistance::Kind::obstacle, 0);
    const double rl = (pos[lead] - f.world.obstacle(0).center).norm();
    const double rf = (pos[follower] - f.world.obstacle(0).center).norm();
    const double tight = 2.0 + 2.0;
    const double enlarged = tight + 2.0 * f.r_max + 2.0 * f.r_bar;
    CHECK(dl == doctest::Approx(rl * rl - tight * tight));
    CHECK(df == doctest::Approx(rf * rf - enlarged * enlarged));
    // reference fleet numbers: inflation = 2+2+4+8 = 16
    CHECK(enlarged == 16.0);
}

TEST_CASE("pair margins are symmetric") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    const FleetPhase ph = initial_phase(f);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec> pos;
        for (int i = 0; i < 3; ++i)
            pos.push_back(Vec(small_fleet().agents[i].start + random_vec(2, rng, 3.0)));
        for (std::size_t i = 0; i < 3; ++i) {
            const auto di = agent_distances(f, ph, i, pos);
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                const auto dj = agent_distances(f, ph, j, pos);
                for (const auto& a : di) {
                    if (a.kind != AgentDistance::Kind::agent || a.index != j) continue;
                    for (const auto& b : dj) {
                        if (b.kind != AgentDistance::Kind::agent || b.index != i) continue;
                        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
                    }
                }
            }
        }
    }
}

TEST_CASE("leader-follower contact margin vanishes at touching") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    const FleetPhase ph = initial_phase(f);
    std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
    // place a follower exactly touching the leader
    const std::size_t lead = ph.leader;
    const std::size_t foll = (lead + 1) % 3;
    pos[foll] = Vec(pos[lead] + vec2(4.0, 0.0));  // r_i + r_j = 4
    const auto ds = agent_distances(f, ph, lead, pos);
    for (const auto& d : ds) {
        if (d.kind == AgentDistance::Kind::agent && d.index == foll)
            CHECK(d.value == doctest::Approx(0.0).scale(1.0));
    }
}

TEST_CASE("gradient of the control potential matches finite differences") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    FleetPhase ph = initial_phase(f);
    std::mt19937_64 rng(17);

    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
        // bring two agents near each other so pair terms activate
        pos[1] = Vec(pos[0] + vec2(16.3 + 0.4 * trial / 40.0, 0.5));
        for (auto& p : pos) p += random_vec(2, rng, 0.2);

        for (std::size_t i = 0; i < 3; ++i) {
            bool ok = true;
            for (std::size_t j = 0; j < 3; ++j) {
                const auto ds = agent_distances(f, ph, j, pos);
                for (const auto& d : ds) ok = ok && d.value > 1e-3;
            }
            if (!ok) continue;
            // phi_tilde as a function of x_i, with the pair terms doubled
            auto phit = [&](const Vec& xi) {
                std::vector<Vec> q = pos;
                q[i] = xi;
                double base = agent_phi(f, ph, i, q);
                for (const auto& d : agent_distances(f, ph, i, q)) {
                    if (d.kind == AgentDistance::Kind::agent)
                        base += f.agents[i].k2 * beta(f.agent_barrier, d.value);
                }
                return base;
            };
            const Vec g = agent_grad_tilde(f, ph, i, pos);
            const Vec gfd = fd_gradient(phit, pos[i], 1e-6);
            CHECK((g - gfd).norm() <= 1e-6 * std::max(1.0, gfd.norm()));
        }
    }
}

TEST_CASE("plateau gradient reduces to the goal pull") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    const FleetPhase ph = initial_phase(f);
    const std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec g = agent_grad_tilde(f, ph, i, pos);
        const Vec expect = 2.0 * f.agents[i].k1 * (pos[i] - f.agents[i].goal);
        CHECK(g[0] == expect[0]);
        CHECK(g[1] == expect[1]);
    }
}

TEST_CASE("leader ignores higher-priority goal exclusions") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    const FleetPhase ph = initial_phase(f);
    std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
    const auto ds = agent_distances(f, ph, ph.leader, pos);
    for (const auto& d : ds) CHECK(d.kind != AgentDistance::Kind::goal_exclusion);
    // followers do see exclusions for strictly higher priority agents
    std::size_t lowest = f.priority.back();
    const auto dl = agent_distances(f, ph, lowest, pos);
    std::size_t exclusions = 0;
    for (const auto& d : dl)
        if (d.kind == AgentDistance::Kind::goal_exclusion) ++exclusions;
    CHECK(exclusions == 2);
}

TEST_CASE("decentralized control equals the centralized evaluation") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    const FleetPhase ph = initial_phase(f);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
        pos[1] = Vec(pos[0] + vec2(16.35, 1.0));  // inside sensing range, pair active
        for (auto& p : pos) p += random_vec(2, rng, 0.05);
        std::vector<Vec> vel;
        for (int i = 0; i < 3; ++i) vel.push_back(random_vec(2, rng, 1.0));
        const EstimatorState est{0.8, 0.2};
        for (std::size_t i = 0; i < 3; ++i) {
            const AgentEval dec = agent_control(f, ph, i, pos, vel, est, true);
            const AgentEval cen = agent_control(f, ph, i, pos, vel, est, false);
            CHECK((dec.u - cen.u).norm() <= 1e-12);
            CHECK(dec.m_hat_dot == doctest::Approx(cen.m_hat_dot).epsilon(1e-12));
            CHECK(dec.alpha_hat_dot == doctest::Approx(cen.alpha_hat_dot).epsilon(1e-12));
        }
    }
}

TEST_CASE("promotion freezes the leader and rebuilds the obstacle set") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    FleetPhase ph = initial_phase(f);
    std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
    const std::size_t lead = ph.leader;
    pos[lead] = Vec(f.agents[lead].goal + vec2(0.05, 0.0));

    const FleetPhase next = advance_phase(f, ph, pos);
    CHECK(next.rank == 1);
    CHECK(next.frozen[lead]);
    REQUIRE(next.extra_obstacles.size() == 1);
    CHECK(next.extra_obstacles[0].radius == f.agents[lead].radius);
    CHECK((next.extra_obstacles[0].center - f.agents[lead].goal).norm() <= f.eps);
    CHECK(next.leader == f.priority[1]);

    // frozen-obstacle spacing against the static obstacles
    for (std::size_t k = 0; k < f.world.num_obstacles(); ++k) {
        CHECK((next.extra_obstacles[0].center - f.world.obstacle(k).center).norm() >
              f.world.obstacle(k).radius + f.agents[lead].radius + 2.0 * f.r_max +
                  2.0 * f.r_bar);
    }

    // premature promotion is rejected
    FleetPhase ph2 = initial_phase(f);
    std::vector<Vec> far = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
    CHECK_THROWS_AS(advance_phase(f, ph2, far), FleetProtocolError);
}

TEST_CASE("single-agent fleet completes after one promotion") {
    Fleet f = small_fleet();
    f.agents.resize(1);
    f.priority.clear();
    REQUIRE(validate_fleet(f, true).ok);
    FleetPhase ph = initial_phase(f);
    std::vector<Vec> pos = {f.agents[0].goal};
    const FleetPhase done = advance_phase(f, ph, pos);
    CHECK(done.complete);
    CHECK(done.rank == 1);
}

TEST_CASE("protocol violation reported when an agent is stranded") {
    Fleet f = small_fleet();
    REQUIRE(validate_fleet(f, true).ok);
    FleetPhase ph = initial_phase(f);
    std::vector<Vec> pos = {f.agents[0].start, f.agents[1].start, f.agents[2].start};
    const std::size_t lead = ph.leader;
    const std::size_t foll = f.priority[2];
    pos[lead] = Vec(f.agents[lead].goal + vec2(0.05, 0.0));
    // park a follower inside the frozen leader's enlarged keep-out (16)
    pos[foll] = Vec(pos[lead] + vec2(10.0, 0.0));
    CHECK_THROWS_AS(advance_phase(f, ph, pos), FleetProtocolError);
}

TEST_CASE("beta_min reports the worst surface distance") {
    Fleet f = small_fleet();
    std::vector<Vec> pos = {vec2(-10.0, 0.0), vec2(-3.0, 0.0), vec2(0.0, -40.0)};
    // agents 0 and 1: surface distance = 7 - 4 = 3
    CHECK(beta_min(f, pos) == doctest::Approx(3.0));
    pos[1] = vec2(0.0, 25.0);  // near the obstacle at (0,30): 5 - 4 = 1
    CHECK(beta_min(f, pos) == doctest::Approx(1.0));
}

}  // TEST_SUITE
