#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdnav/geometry.hpp"
#include "crowdnav/world_model.hpp"

namespace crowdnav {

/// Sampled roadmap over free space with shortest paths to the vehicle goal
/// precomputed for every node. Node 0 is the vehicle start, node 1 the goal.
struct Roadmap {
    static constexpr int kStart = 0;
    static constexpr int kGoal = 1;

    std::vector<Vec2> nodes;
    /// Adjacency lists sorted by neighbor index; weights are Euclidean lengths.
    std::vector<std::vector<std::pair<int, double>>> edges;
    std::vector<double> cost_to_goal;  // +inf when disconnected from the goal
    std::vector<int> next_hop;         // -1 at the goal and on disconnected nodes

    bool reachable(int node) const { return std::isfinite(cost_to_goal[node]); }
};

struct PrmParams {
    int node_count = 100;
    int neighbor_count = 10;
    double clearance = 1.0;  // required segment clearance, matches d_obstacle
    int max_retries = 10;

    static PrmParams from_config(const Config& cfg);
};

/// Samples node_count nodes (start and goal inserted first), links each to its
/// k nearest neighbors when the straight segment keeps the required clearance,
/// and fills the shortest-path fields. Deterministic given the seed; resamples
/// with a derived seed when the goal is unreachable from the start, up to
/// max_retries, then throws.
Roadmap build_roadmap(const Environment& env, const PrmParams& params, uint64_t seed);

/// Single-source shortest paths from the goal node over the edge list,
/// ties broken toward the lower node index.
Roadmap shortest_paths_to_goal(Roadmap roadmap);

/// Heading from p toward the best visible node: the visible reachable node
/// minimizing distance-to-p plus its cost to the goal. On a node, heads toward
/// that node's next hop. Empty when no node is visible (dead state).
std::optional<double> prm_next_heading(const Roadmap& roadmap, const Vec2& p,
                                       const Environment& env, double clearance);

/// Length of the roadmap route from p: min over visible reachable nodes of
/// (distance + cost to goal); +inf when p sees no node.
double prm_path_length(const Roadmap& roadmap, const Vec2& p, const Environment& env,
                       double clearance);

/// Best visible node id from p, or nullopt. Exposed for the query cache.
std::optional<int> prm_best_node(const Roadmap& roadmap, const Vec2& p, const Environment& env,
                                 double clearance);

void dump_roadmap_csv(const Roadmap& roadmap, const std::string& path);

}  // namespace crowdnav
