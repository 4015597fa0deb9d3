#pragma once

#include <optional>
#include <span>
#include <vector>

#include "crowdnav/belief_tracker.hpp"
#include "crowdnav/pomdp_core.hpp"
#include "crowdnav/world_model.hpp"

namespace crowdnav {

/// Cost weights and action set for the discrete-heading path search. The
/// per-step potential costs are discounted by lambda^t so early exposure
/// dominates.
struct PathCostParams {
    double w_static = 50.0;
    double w_pedestrian = 50.0;
    double lambda = 0.95;
    std::vector<double> heading_changes;  // radians, relative to the node heading
    double step_length = 1.0;             // m
    double goal_tolerance = 1.0;          // m, matches d_goal
    double clearance = 1.0;               // m, matches d_obstacle
    double budget_s = 0.15;
    int max_expansions = 0;  // 0 = wall-clock budget; positive = deterministic cap

    static std::vector<double> holonomic_heading_set();  // 36: -170..180 deg step 10
    static std::vector<double> dubins_heading_set();     // 19: -45..45 deg step 5
    static PathCostParams from_config(const Config& cfg, VehicleModel::Kind kind);
};

enum class EntropyMode { A, B };

/// Mode A (disk around the current position) when the intention entropy is
/// high, mode B (disks along the most-likely path) otherwise. The threshold
/// itself maps to mode A.
EntropyMode entropy_mode(std::span<const double> belief_row);

struct PotentialDisk {
    Vec2 center;
    double radius = 0.0;
    double height = 0.0;
};

/// Belief-shaped cost disks for one pedestrian. Mode A radius grows with the
/// normalized entropy; mode B lays fixed disks along the most-likely goal ray
/// over a 5 s horizon.
std::vector<PotentialDisk> pedestrian_potential(const PedestrianState& ped,
                                                std::span<const double> belief_row,
                                                const std::vector<Vec2>& goals, double w_pedestrian);

/// Quadratic-falloff cost of p under a set of disks.
double potential_cost(const Vec2& p, std::span<const PotentialDisk> disks);

struct PlannedPath {
    std::vector<Vec2> waypoints;  // from start (exclusive) to goal region
    std::vector<double> headings; // heading used to reach each waypoint
    double cost = 0.0;
    bool reused = false;          // previous path returned on timeout
    bool partial = false;         // best-so-far incumbent returned on timeout

    double length() const;
    bool empty() const { return waypoints.empty(); }
};

/// Discrete-heading A* over continuous positions. Minimizes accumulated step
/// length plus lambda-discounted static and pedestrian potentials, with an
/// admissible Euclidean heuristic. Expansions whose motion segment drops below
/// the required obstacle clearance are pruned. On budget expiry returns the
/// best incumbent, else the previous path; throws PlannerFailure when neither
/// exists.
PlannedPath plan_path(const Environment& env, const VehicleState& vehicle,
                      const std::vector<PedestrianState>& pedestrians,
                      const IntentionBelief& belief, const PathCostParams& params,
                      const PlannedPath* previous = nullptr);

struct PlannerFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace crowdnav
