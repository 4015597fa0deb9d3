#pragma once

#include <string>
#include <vector>

#include "crowdnav/geometry.hpp"

namespace crowdnav {

class Config;
struct POMDPState;

struct CircularObstacle {
    Vec2 center;
    double radius = 0.0;
};

enum class ScenarioId { OPEN_FIELD, SCATTERED, L_LOBBY };

ScenarioId scenario_from_index(int index);  // 1..3
int scenario_index(ScenarioId id);
std::string scenario_name(ScenarioId id);

/// Static planning environment shared by every planner and the simulator:
/// field geometry, obstacle disks, pedestrian goal corners and the vehicle's
/// start/goal. Immutable after construction.
struct Environment {
    double width = 100.0;
    double height = 100.0;
    std::vector<CircularObstacle> obstacles;
    std::vector<Vec2> pedestrian_goals;
    Vec2 vehicle_start{10.0, 10.0};
    Vec2 vehicle_goal{90.0, 90.0};

    bool inside(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }

    /// Minimum over obstacles of (distance to center - radius); +inf when the
    /// obstacle set is empty, negative inside an obstacle disk.
    double obstacle_clearance(const Vec2& p) const;

    /// Minimum obstacle clearance along the segment [a, b].
    double segment_clearance(const Vec2& a, const Vec2& b) const;
};

/// Fixed environment for one of the three evaluation scenarios. Pure: repeated
/// calls return identical geometry.
Environment build_scenario(ScenarioId id);

/// Environment from a key-value config (field size, start/goal, repeated
/// "pedestrian_goal = x y" and "obstacle = x y r" entries).
Environment load_environment(const Config& cfg);

/// Indices of the n pedestrians nearest to the vehicle, ascending by distance,
/// ties broken by lower index. Returns fewer when the population is smaller.
std::vector<int> nearest_pedestrians(const POMDPState& state, int n);

}  // namespace crowdnav
