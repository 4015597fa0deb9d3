#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "crowdnav/prm_planner.hpp"
#include "crowdnav/rng.hpp"
#include "crowdnav/world_model.hpp"

using namespace crowdnav;

namespace {

/// Brute-force single-source shortest paths: |V| rounds of Bellman-Ford over
/// the full edge list. Deliberately naive and independent of the planner.
std::vector<double> bellman_ford_to_goal(const Roadmap& map) {
    const size_t n = map.nodes.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    dist[Roadmap::kGoal] = 0.0;
    for (size_t round = 0; round < n; ++round) {
        bool changed = false;
        for (size_t u = 0; u < n; ++u)
            for (const auto& [v, w] : map.edges[u])
                if (dist[v] + w < dist[u] - 1e-15) {
                    dist[u] = dist[v] + w;
                    changed = true;
                }
        if (!changed) break;
    }
    return dist;
}

/// Independent segment-disk intersection check via ternary search over the
/// parameterized segment.
double segment_disk_clearance_oracle(const Vec2& a, const Vec2& b, const CircularObstacle& obs) {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const Vec2 p1 = a + (b - a) * m1;
        const Vec2 p2 = a + (b - a) * m2;
        if (distance(p1, obs.center) < distance(p2, obs.center))
            hi = m2;
        else
            lo = m1;
    }
    const Vec2 p = a + (b - a) * (0.5 * (lo + hi));
    return distance(p, obs.center) - obs.radius;
}

}  // namespace

TEST_CASE("two-node roadmap in the open field is the straight start-goal edge") {
    const Environment env = build_scenario(ScenarioId::OPEN_FIELD);
    PrmParams params;
    params.node_count = 2;
    params.neighbor_count = 1;
    const Roadmap map = build_roadmap(env, params, 42);
    REQUIRE(map.nodes.size() == 2);
    CHECK(map.nodes[Roadmap::kStart] == env.vehicle_start);
    CHECK(map.nodes[Roadmap::kGoal] == env.vehicle_goal);
    REQUIRE(map.edges[Roadmap::kStart].size() == 1);
    CHECK(map.cost_to_goal[Roadmap::kStart] ==
          doctest::Approx(distance(env.vehicle_start, env.vehicle_goal)));
    CHECK(map.next_hop[Roadmap::kStart] == Roadmap::kGoal);
    CHECK(map.cost_to_goal[Roadmap::kGoal] == 0.0);
}

TEST_CASE("costs equal the brute-force oracle on sampled roadmaps") {
    const Environment env = build_scenario(ScenarioId::SCATTERED);
    PrmParams params;
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        const Roadmap map = build_roadmap(env, params, seed);
        const auto oracle = bellman_ford_to_goal(map);
        REQUIRE(oracle.size() == map.cost_to_goal.size());
        for (size_t i = 0; i < oracle.size(); ++i) {
            if (std::isfinite(oracle[i]))
                CHECK(map.cost_to_goal[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
            else
                CHECK(!map.reachable(static_cast<int>(i)));
        }
    }
}

TEST_CASE("roadmap construction is deterministic per seed") {
    const Environment env = build_scenario(ScenarioId::SCATTERED);
    PrmParams params;
    const Roadmap a = build_roadmap(env, params, 77);
    const Roadmap b = build_roadmap(env, params, 77);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i] == b.nodes[i]);
    CHECK(a.cost_to_goal == b.cost_to_goal);
    CHECK(a.next_hop == b.next_hop);
}

TEST_CASE("every stored edge keeps the required clearance") {
    const Environment env = build_scenario(ScenarioId::SCATTERED);
    PrmParams params;
    const Roadmap map = build_roadmap(env, params, 3);
    for (size_t u = 0; u < map.edges.size(); ++u)
        for (const auto& [v, w] : map.edges[u]) {
            CHECK(w == doctest::Approx(distance(map.nodes[u], map.nodes[v])));
            for (const auto& obs : env.obstacles) {
                const double clearance =
                    segment_disk_clearance_oracle(map.nodes[u], map.nodes[v], obs);
                CHECK(clearance >= params.clearance - 1e-6);
            }
        }
}

TEST_CASE("costs satisfy the triangle relaxation along every edge") {
    const Environment env = build_scenario(ScenarioId::L_LOBBY);
    const Roadmap map = build_roadmap(env, PrmParams{}, 5);
    for (size_t u = 0; u < map.edges.size(); ++u) {
        if (!map.reachable(static_cast<int>(u))) continue;
        for (const auto& [v, w] : map.edges[u])
            if (map.reachable(v)) CHECK(map.cost_to_goal[u] <= map.cost_to_goal[v] + w + 1e-9);
    }
}

TEST_CASE("hand graph: chain beats the expensive direct edge") {
    Roadmap map;
    map.nodes = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}};  // start, goal, midpoint
    map.edges.assign(3, {});
    auto link = [&](int u, int v, double w) {
        map.edges[u].emplace_back(v, w);
        map.edges[v].emplace_back(u, w);
    };
    link(0, 2, 1.0);
    link(2, 1, 1.0);
    link(0, 1, 3.0);
    for (auto& adj : map.edges) std::sort(adj.begin(), adj.end());
    map = shortest_paths_to_goal(std::move(map));
    CHECK(map.cost_to_goal[0] == doctest::Approx(2.0));
    CHECK(map.next_hop[0] == 2);
    CHECK(map.next_hop[2] == 1);
}

TEST_CASE("equal-cost successors resolve to the lower node index") {
    Roadmap map;
    map.nodes = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}, {1.0, -1.0}};
    map.edges.assign(4, {});
    auto link = [&](int u, int v, double w) {
        map.edges[u].emplace_back(v, w);
        map.edges[v].emplace_back(u, w);
    };
    link(0, 2, 1.0);
    link(0, 3, 1.0);
    link(2, 1, 1.0);
    link(3, 1, 1.0);
    for (auto& adj : map.edges) std::sort(adj.begin(), adj.end());
    map = shortest_paths_to_goal(std::move(map));
    CHECK(map.cost_to_goal[0] == doctest::Approx(2.0));
    CHECK(map.next_hop[0] == 2);
}

TEST_CASE("query on a node heads for its successor") {
    Roadmap map;
    map.nodes = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    map.edges.assign(3, {});
    auto link = [&](int u, int v, double w) {
        map.edges[u].emplace_back(v, w);
        map.edges[v].emplace_back(u, w);
    };
    link(0, 2, 1.0);
    link(2, 1, 1.0);
    for (auto& adj : map.edges) std::sort(adj.begin(), adj.end());
    map = shortest_paths_to_goal(std::move(map));

    const Environment env = build_scenario(ScenarioId::OPEN_FIELD);
    const auto heading = prm_next_heading(map, {0.0, 0.0}, env, 1.0);
    REQUIRE(heading.has_value());
    CHECK(*heading == doctest::Approx(0.0));  // toward the midpoint, due east
}

TEST_CASE("only the goal visible: head straight for it") {
    Environment env = build_scenario(ScenarioId::OPEN_FIELD);
    env.obstacles.push_back({{50.0, 30.0}, 20.0});
    Roadmap map;
    map.nodes = {{10.0, 10.0}, {50.0, 80.0}, {50.0, 2.0}};
    map.edges.assign(3, {});
    map.edges[0].emplace_back(1, distance(map.nodes[0], map.nodes[1]));
    map.edges[1].emplace_back(0, map.edges[0][0].second);
    map = shortest_paths_to_goal(std::move(map));

    // From high above the obstacle, node 2 is occluded; the goal is visible.
    const Vec2 p{50.0, 70.0};
    const auto heading = prm_next_heading(map, p, env, 1.0);
    REQUIRE(heading.has_value());
    CHECK(*heading == doctest::Approx(heading_of(map.nodes[1] - p)));
}

TEST_CASE("a fully occluded query is a dead state") {
    Environment env = build_scenario(ScenarioId::OPEN_FIELD);
    env.obstacles.push_back({{50.0, 50.0}, 10.0});
    Roadmap map;
    map.nodes = {{20.0, 50.0}, {80.0, 50.0}};
    map.edges.assign(2, {});
    map = shortest_paths_to_goal(std::move(map));
    // Point hugging the disk's east side: every sight line dips below the
    // required clearance.
    const auto heading = prm_next_heading(map, {60.5, 50.0}, env, 1.0);
    CHECK(!heading.has_value());
}

TEST_CASE("path following from random free points reaches the goal") {
    const Environment env = build_scenario(ScenarioId::SCATTERED);
    const Roadmap map = build_roadmap(env, PrmParams{}, 21);
    Rng rng(8);
    const double diagonal = std::sqrt(env.width * env.width + env.height * env.height);
    int followed = 0;
    for (int trial = 0; trial < 25; ++trial) {
        Vec2 p{rng.uniform(0.0, env.width), rng.uniform(0.0, env.height)};
        if (env.obstacle_clearance(p) < 1.0) continue;
        if (!prm_next_heading(map, p, env, 1.0)) continue;  // occluded start
        double traveled = 0.0;
        bool reached = false;
        while (traveled < 4.0 * diagonal) {
            if (distance(p, env.vehicle_goal) <= 1.0) {
                reached = true;
                break;
            }
            const auto heading = prm_next_heading(map, p, env, 1.0);
            REQUIRE(heading.has_value());
            const double step = std::min(1.0, distance(p, env.vehicle_goal));
            p += unit_from_angle(*heading) * step;
            traveled += step;
        }
        CHECK(reached);
        ++followed;
    }
    CHECK(followed >= 15);
}

TEST_CASE("unreachable goal exhausts its retries") {
    Environment env = build_scenario(ScenarioId::OPEN_FIELD);
    // Wall the goal off completely: a ring of disks around it.
    for (int k = 0; k < 16; ++k) {
        const double angle = 2.0 * kPi * k / 16.0;
        env.obstacles.push_back({{90.0 + 7.0 * std::cos(angle), 90.0 + 7.0 * std::sin(angle)},
                                 2.0});
    }
    PrmParams params;
    params.max_retries = 2;
    CHECK_THROWS_AS(build_roadmap(env, params, 11), std::runtime_error);
}
