#include "crowdnav/world_model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "crowdnav/config.hpp"
#include "crowdnav/pomdp_core.hpp"

namespace crowdnav {

ScenarioId scenario_from_index(int index) {
    switch (index) {
        case 1: return ScenarioId::OPEN_FIELD;
        case 2: return ScenarioId::SCATTERED;
        case 3: return ScenarioId::L_LOBBY;
        default: throw std::invalid_argument("scenario index must be 1, 2 or 3");
    }
}

int scenario_index(ScenarioId id) {
    switch (id) {
        case ScenarioId::OPEN_FIELD: return 1;
        case ScenarioId::SCATTERED: return 2;
        case ScenarioId::L_LOBBY: return 3;
    }
    return 0;
}

std::string scenario_name(ScenarioId id) {
    switch (id) {
        case ScenarioId::OPEN_FIELD: return "open_field";
        case ScenarioId::SCATTERED: return "scattered";
        case ScenarioId::L_LOBBY: return "l_lobby";
    }
    return "unknown";
}

double Environment::obstacle_clearance(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& obs : obstacles) best = std::min(best, distance(p, obs.center) - obs.radius);
    return best;
}

double Environment::segment_clearance(const Vec2& a, const Vec2& b) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& obs : obstacles)
        best = std::min(best, point_segment_distance(obs.center, a, b) - obs.radius);
    return best;
}

namespace {

Environment base_field() {
    Environment env;
    env.width = 100.0;
    env.height = 100.0;
    env.pedestrian_goals = {{0.0, 0.0}, {100.0, 0.0}, {0.0, 100.0}, {100.0, 100.0}};
    env.vehicle_start = {10.0, 10.0};
    env.vehicle_goal = {90.0, 90.0};
    return env;
}

}  // namespace

Environment build_scenario(ScenarioId id) {
    Environment env = base_field();
    switch (id) {
        case ScenarioId::OPEN_FIELD:
            break;
        case ScenarioId::SCATTERED:
            env.obstacles = {
                {{25.0, 25.0}, 4.0}, {{55.0, 20.0}, 4.0}, {{80.0, 45.0}, 5.0},
                {{20.0, 60.0}, 5.0}, {{50.0, 55.0}, 4.0}, {{70.0, 80.0}, 4.0},
            };
            break;
        case ScenarioId::L_LOBBY:
            env.obstacles = {{{70.0, 30.0}, 28.0}};
            break;
    }
    return env;
}

Environment load_environment(const Config& cfg) {
    Environment env = base_field();
    env.width = cfg.get_double("field_width", env.width);
    env.height = cfg.get_double("field_height", env.height);

    auto read_point = [&](const std::string& key, Vec2 def) {
        if (!cfg.has(key)) return def;
        const auto nums = cfg.get_numbers(key);
        if (nums.size() != 2) throw std::runtime_error("expected 'x y' for " + key);
        return Vec2{nums[0], nums[1]};
    };
    env.vehicle_start = read_point("vehicle_start", env.vehicle_start);
    env.vehicle_goal = read_point("vehicle_goal", env.vehicle_goal);

    if (cfg.has("pedestrian_goal")) {
        env.pedestrian_goals.clear();
        for (const auto& entry : cfg.get_all("pedestrian_goal")) {
            const auto nums = parse_numbers(entry);
            if (nums.size() != 2) throw std::runtime_error("expected 'x y' for pedestrian_goal");
            env.pedestrian_goals.push_back({nums[0], nums[1]});
        }
    }
    for (const auto& entry : cfg.get_all("obstacle")) {
        const auto nums = parse_numbers(entry);
        if (nums.size() != 3) throw std::runtime_error("expected 'x y r' for obstacle");
        env.obstacles.push_back({{nums[0], nums[1]}, nums[2]});
    }
    return env;
}

std::vector<int> nearest_pedestrians(const POMDPState& state, int n) {
    const int count = static_cast<int>(state.pedestrians.size());
    std::vector<int> indices(count);
    std::iota(indices.begin(), indices.end(), 0);
    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
        return distance(state.pedestrians[a].pos, state.vehicle.pos) <
               distance(state.pedestrians[b].pos, state.vehicle.pos);
    });
    indices.resize(std::min(n, count));
    return indices;
}

}  // namespace crowdnav
