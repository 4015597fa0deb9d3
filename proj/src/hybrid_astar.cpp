#include "crowdnav/hybrid_astar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "crowdnav/config.hpp"

namespace crowdnav {

std::vector<double> PathCostParams::holonomic_heading_set() {
    std::vector<double> set;
    for (int deg = -170; deg <= 180; deg += 10) set.push_back(deg_to_rad(deg));
    return set;
}

std::vector<double> PathCostParams::dubins_heading_set() {
    std::vector<double> set;
    for (int deg = -45; deg <= 45; deg += 5) set.push_back(deg_to_rad(deg));
    return set;
}

PathCostParams PathCostParams::from_config(const Config& cfg, VehicleModel::Kind kind) {
    PathCostParams p;
    p.heading_changes = kind == VehicleModel::Kind::DUBINS ? dubins_heading_set()
                                                           : holonomic_heading_set();
    p.w_static = cfg.get_double("astar_static_weight", p.w_static);
    p.w_pedestrian = cfg.get_double("astar_pedestrian_weight", p.w_pedestrian);
    p.lambda = cfg.get_double("astar_lambda", p.lambda);
    p.step_length = cfg.get_double("astar_step_length", p.step_length);
    p.goal_tolerance = cfg.get_double("dist_goal", p.goal_tolerance);
    p.clearance = cfg.get_double("dist_obstacle", p.clearance);
    p.budget_s = cfg.get_double("astar_budget_s", p.budget_s);
    p.max_expansions = cfg.get_int("astar_max_expansions", p.max_expansions);
    return p;
}

EntropyMode entropy_mode(std::span<const double> belief_row) {
    if (belief_row.size() < 2) return EntropyMode::B;
    double h = 0.0;
    for (double p : belief_row)
        if (p > 0.0) h -= p * std::log(p);
    const double normalized = h / std::log(static_cast<double>(belief_row.size()));
    return normalized >= 0.5 ? EntropyMode::A : EntropyMode::B;
}

std::vector<PotentialDisk> pedestrian_potential(const PedestrianState& ped,
                                                std::span<const double> belief_row,
                                                const std::vector<Vec2>& goals,
                                                double w_pedestrian) {
    std::vector<PotentialDisk> disks;
    if (entropy_mode(belief_row) == EntropyMode::A) {
        double h = 0.0;
        for (double p : belief_row)
            if (p > 0.0) h -= p * std::log(p);
        const double normalized =
            belief_row.size() < 2 ? 1.0 : h / std::log(static_cast<double>(belief_row.size()));
        disks.push_back({ped.pos, 2.0 + 2.0 * normalized, w_pedestrian});
        return disks;
    }
    // Mode B: disks along the ray to the most likely goal, 1 m apart over a
    // 5 s prediction horizon.
    size_t best = 0;
    for (size_t g = 1; g < belief_row.size(); ++g)
        if (belief_row[g] > belief_row[best]) best = g;
    const Vec2 to_goal = goals.at(best) - ped.pos;
    const double dist = to_goal.norm();
    const double horizon = std::min(dist, ped.speed * 5.0);
    const Vec2 dir = dist > 1e-12 ? to_goal * (1.0 / dist) : Vec2{0.0, 0.0};
    for (double s = 0.0; s <= horizon + 1e-9; s += 1.0)
        disks.push_back({ped.pos + dir * s, 1.5, w_pedestrian});
    return disks;
}

double potential_cost(const Vec2& p, std::span<const PotentialDisk> disks) {
    double cost = 0.0;
    for (const auto& d : disks) {
        const double dist = distance(p, d.center);
        if (dist < d.radius) {
            const double f = 1.0 - dist / d.radius;
            cost += d.height * f * f;
        }
    }
    return cost;
}

double PlannedPath::length() const {
    double len = 0.0;
    for (size_t i = 1; i < waypoints.size(); ++i) len += distance(waypoints[i - 1], waypoints[i]);
    return len;
}

namespace {

struct SearchNode {
    Vec2 pos;
    double heading = 0.0;
    double g = 0.0;       // accumulated cost
    int steps = 0;        // path depth, drives the lambda discount
    int parent = -1;      // index into the node arena
};

struct QueueEntry {
    double f = 0.0;
    double g = 0.0;
    int node = -1;
    bool operator>(const QueueEntry& o) const {
        if (f != o.f) return f > o.f;
        if (g != o.g) return g > o.g;
        return node > o.node;
    }
};

/// Static-obstacle proximity cost: zero outside twice the clearance margin,
/// quadratic ramp inside it. Segments below the clearance itself are pruned
/// before this is evaluated.
double static_cost(const Environment& env, const Vec2& p, const PathCostParams& params) {
    const double c = env.obstacle_clearance(p);
    const double margin = 2.0 * params.clearance;
    if (c >= margin) return 0.0;
    const double f = (margin - c) / params.clearance;
    return params.w_static * f * f;
}

}  // namespace

PlannedPath plan_path(const Environment& env, const VehicleState& vehicle,
                      const std::vector<PedestrianState>& pedestrians,
                      const IntentionBelief& belief, const PathCostParams& params,
                      const PlannedPath* previous) {
    const Vec2 goal = vehicle.goal;
    if (distance(vehicle.pos, goal) <= params.goal_tolerance) return {};

    std::vector<PotentialDisk> disks;
    for (size_t i = 0; i < pedestrians.size(); ++i) {
        const auto row = i < belief.rows.size() ? std::span<const double>(belief.rows[i])
                                                : std::span<const double>();
        const auto ped_disks =
            pedestrian_potential(pedestrians[i], row, env.pedestrian_goals, params.w_pedestrian);
        disks.insert(disks.end(), ped_disks.begin(), ped_disks.end());
    }

    const double heading_bucket = deg_to_rad(5.0);
    auto closed_key = [&](const Vec2& p, double heading) {
        const int hx = static_cast<int>(std::floor(p.x / 1.0));
        const int hy = static_cast<int>(std::floor(p.y / 1.0));
        const int hb = static_cast<int>(std::floor(wrap_angle(heading) / heading_bucket));
        return std::tuple<int, int, int>(hx, hy, hb);
    };

    std::vector<SearchNode> arena;
    std::map<std::tuple<int, int, int>, double> best_g;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

    arena.push_back({vehicle.pos, vehicle.heading, 0.0, 0, -1});
    open.push({distance(vehicle.pos, goal), 0.0, 0});
    best_g[closed_key(vehicle.pos, vehicle.heading)] = 0.0;

    const auto t0 = std::chrono::steady_clock::now();
    auto out_of_budget = [&](int expansions) {
        if (params.max_expansions > 0) return expansions >= params.max_expansions;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
        return elapsed.count() >= params.budget_s;
    };

    int goal_node = -1;
    int incumbent = 0;
    double incumbent_h = distance(vehicle.pos, goal);
    int expansions = 0;

    while (!open.empty()) {
        if (out_of_budget(expansions)) break;
        const QueueEntry top = open.top();
        open.pop();
        const SearchNode node = arena[top.node];
        if (top.g > node.g + 1e-12) continue;  // stale
        ++expansions;

        const double h = distance(node.pos, goal);
        if (h <= params.goal_tolerance) {
            goal_node = top.node;
            break;
        }
        if (h < incumbent_h) {
            incumbent_h = h;
            incumbent = top.node;
        }

        for (double dh : params.heading_changes) {
            const double heading = wrap_angle(node.heading + dh);
            const Vec2 next = node.pos + unit_from_angle(heading) * params.step_length;
            if (!env.inside(next)) continue;
            if (env.segment_clearance(node.pos, next) < params.clearance) continue;
            const double discount = std::pow(params.lambda, node.steps + 1);
            const double step_cost =
                params.step_length +
                discount * (static_cost(env, next, params) + potential_cost(next, disks));
            const double g = node.g + step_cost;
            const auto key = closed_key(next, heading);
            const auto it = best_g.find(key);
            if (it != best_g.end() && it->second <= g + 1e-12) continue;
            best_g[key] = g;
            arena.push_back({next, heading, g, node.steps + 1, top.node});
            open.push({g + distance(next, goal), g, static_cast<int>(arena.size()) - 1});
        }
    }

    auto backtrack = [&](int node_idx) {
        PlannedPath path;
        std::vector<int> chain;
        for (int i = node_idx; i >= 0; i = arena[i].parent) chain.push_back(i);
        std::reverse(chain.begin(), chain.end());
        for (size_t i = 1; i < chain.size(); ++i) {  // skip the start node
            path.waypoints.push_back(arena[chain[i]].pos);
            path.headings.push_back(arena[chain[i]].heading);
        }
        path.cost = arena[node_idx].g;
        return path;
    };

    if (goal_node >= 0) return backtrack(goal_node);

    // Timeout: prefer an incumbent that actually made progress toward the goal.
    if (incumbent != 0 && incumbent_h + params.step_length < distance(vehicle.pos, goal)) {
        PlannedPath path = backtrack(incumbent);
        path.partial = true;
        return path;
    }
    if (previous != nullptr && !previous->empty()) {
        PlannedPath path = *previous;
        path.reused = true;
        return path;
    }
    throw PlannerFailure("path search exhausted its budget with no usable path");
}

}  // namespace crowdnav
