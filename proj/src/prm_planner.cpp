#include "crowdnav/prm_planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

#include "crowdnav/config.hpp"
#include "crowdnav/rng.hpp"

namespace crowdnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool segment_clear(const Environment& env, const Vec2& a, const Vec2& b, double clearance) {
    return env.segment_clearance(a, b) >= clearance;
}

Roadmap sample_and_connect(const Environment& env, const PrmParams& params, uint64_t seed) {
    Roadmap map;
    map.nodes.push_back(env.vehicle_start);
    map.nodes.push_back(env.vehicle_goal);

    Rng rng(seed);
    while (static_cast<int>(map.nodes.size()) < params.node_count) {
        const Vec2 p{rng.uniform(0.0, env.width), rng.uniform(0.0, env.height)};
        if (env.obstacle_clearance(p) < params.clearance) continue;
        map.nodes.push_back(p);
    }

    const int n = static_cast<int>(map.nodes.size());
    map.edges.assign(n, {});
    for (int u = 0; u < n; ++u) {
        // k nearest neighbors of u, ties by lower index.
        std::vector<int> order;
        order.reserve(n - 1);
        for (int v = 0; v < n; ++v)
            if (v != u) order.push_back(v);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return distance(map.nodes[u], map.nodes[a]) < distance(map.nodes[u], map.nodes[b]);
        });
        const int k = std::min<int>(params.neighbor_count, static_cast<int>(order.size()));
        for (int i = 0; i < k; ++i) {
            const int v = order[i];
            if (!segment_clear(env, map.nodes[u], map.nodes[v], params.clearance)) continue;
            const double w = distance(map.nodes[u], map.nodes[v]);
            map.edges[u].emplace_back(v, w);
            map.edges[v].emplace_back(u, w);
        }
    }
    for (auto& adj : map.edges) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return map;
}

}  // namespace

PrmParams PrmParams::from_config(const Config& cfg) {
    PrmParams p;
    p.node_count = cfg.get_int("prm_nodes", p.node_count);
    p.neighbor_count = cfg.get_int("prm_neighbors", p.neighbor_count);
    p.clearance = cfg.get_double("dist_obstacle", p.clearance);
    p.max_retries = cfg.get_int("prm_max_retries", p.max_retries);
    return p;
}

Roadmap build_roadmap(const Environment& env, const PrmParams& params, uint64_t seed) {
    if (params.node_count < 2) throw std::invalid_argument("roadmap needs at least 2 nodes");
    if (params.neighbor_count < 1) throw std::invalid_argument("neighbor count must be positive");
    for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
        Roadmap map = shortest_paths_to_goal(
            sample_and_connect(env, params, attempt == 0 ? seed : mix_seed(seed, attempt)));
        if (map.reachable(Roadmap::kStart)) return map;
    }
    throw std::runtime_error("roadmap: goal unreachable from start after retries");
}

Roadmap shortest_paths_to_goal(Roadmap roadmap) {
    const int n = static_cast<int>(roadmap.nodes.size());
    roadmap.cost_to_goal.assign(n, kInf);
    roadmap.next_hop.assign(n, -1);

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    roadmap.cost_to_goal[Roadmap::kGoal] = 0.0;
    heap.emplace(0.0, Roadmap::kGoal);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > roadmap.cost_to_goal[u]) continue;
        for (const auto& [v, w] : roadmap.edges[u]) {
            if (d + w < roadmap.cost_to_goal[v]) {
                roadmap.cost_to_goal[v] = d + w;
                heap.emplace(d + w, v);
            }
        }
    }
    // Successor toward the goal: the neighbor minimizing w + cost, ties to the
    // lower index. Costs strictly decrease along hops, so the chains are acyclic.
    for (int u = 0; u < n; ++u) {
        if (u == Roadmap::kGoal || !roadmap.reachable(u)) continue;
        int best = -1;
        double best_cost = kInf;
        for (const auto& [v, w] : roadmap.edges[u]) {
            const double c = w + roadmap.cost_to_goal[v];
            if (c < best_cost - 1e-12) {
                best_cost = c;
                best = v;
            }
        }
        roadmap.next_hop[u] = best;
    }
    return roadmap;
}

std::optional<int> prm_best_node(const Roadmap& roadmap, const Vec2& p, const Environment& env,
                                 double clearance) {
    int best = -1;
    double best_cost = kInf;
    for (int v = 0; v < static_cast<int>(roadmap.nodes.size()); ++v) {
        if (!roadmap.reachable(v)) continue;
        const double c = distance(p, roadmap.nodes[v]) + roadmap.cost_to_goal[v];
        if (c < best_cost - 1e-12 && segment_clear(env, p, roadmap.nodes[v], clearance)) {
            best_cost = c;
            best = v;
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

std::optional<double> prm_next_heading(const Roadmap& roadmap, const Vec2& p,
                                       const Environment& env, double clearance) {
    const auto best = prm_best_node(roadmap, p, env, clearance);
    if (!best) return std::nullopt;
    int target = *best;
    if (distance(p, roadmap.nodes[target]) < 1e-6) {
        // Standing on the node: continue along its precomputed chain.
        if (roadmap.next_hop[target] < 0) return 0.0;  // at the goal node itself
        target = roadmap.next_hop[target];
    }
    return heading_of(roadmap.nodes[target] - p);
}

double prm_path_length(const Roadmap& roadmap, const Vec2& p, const Environment& env,
                       double clearance) {
    const auto best = prm_best_node(roadmap, p, env, clearance);
    if (!best) return kInf;
    return distance(p, roadmap.nodes[*best]) + roadmap.cost_to_goal[*best];
}

void dump_roadmap_csv(const Roadmap& roadmap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "node,x,y,cost_to_goal,next_hop\n";
    for (size_t i = 0; i < roadmap.nodes.size(); ++i)
        out << i << ',' << roadmap.nodes[i].x << ',' << roadmap.nodes[i].y << ','
            << roadmap.cost_to_goal[i] << ',' << roadmap.next_hop[i] << '\n';
    out << "edge,from,to,weight\n";
    for (size_t u = 0; u < roadmap.edges.size(); ++u)
        for (const auto& [v, w] : roadmap.edges[u])
            if (static_cast<size_t>(v) > u) out << "edge," << u << ',' << v << ',' << w << '\n';
    return;
}

}  // namespace crowdnav
