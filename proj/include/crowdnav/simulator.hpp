#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crowdnav/belief_tracker.hpp"
#include "crowdnav/despot_solver.hpp"
#include "crowdnav/hybrid_astar.hpp"
#include "crowdnav/pomdp_core.hpp"
#include "crowdnav/prm_planner.hpp"

namespace crowdnav {

/// Ground-truth pedestrian: position, preferred speed and the true goal index
/// hidden from the planner.
struct PedestrianAgent {
    Vec2 pos;
    double speed = 1.0;
    int goal_index = 0;
};

/// Ground-truth world. The population size stays constant: pedestrians that
/// reach their goal respawn on a field edge the same step.
struct WorldState {
    VehicleState vehicle;
    std::vector<PedestrianAgent> pedestrians;
    int step = 0;
    double elapsed = 0.0;
};

struct WorldStepInfo {
    std::vector<int> respawned;  // population slots replaced this step
};

WorldState init_world(const Environment& env, int population, const RewardParams& params,
                      Rng& rng);

/// Advances the vehicle by the action and every pedestrian toward its true
/// goal with motion noise. Arrivals respawn at a uniform point on a random
/// edge with a goal drawn from the two corners on the opposite edge.
WorldStepInfo step_world(WorldState& world, const NavAction& action, const Environment& env,
                         const RewardParams& params, const VehicleModel& model, Rng& rng);

/// True when the moving vehicle is strictly within the safety radius of any
/// pedestrian. A stationary vehicle is never unsafe.
bool safety_check(const WorldState& world, double safety_radius);

enum class PlannerKind { LS_ASTAR, ES_FMM, ES_PRM, ES_NHV_STRAIGHT };

std::string planner_name(PlannerKind kind);
PlannerKind planner_from_name(const std::string& name);

enum class Outcome { GOAL, TIMEOUT, PLANNER_FAILURE };

std::string outcome_name(Outcome o);

struct EpisodeConfig {
    PlannerKind planner = PlannerKind::ES_FMM;
    VehicleModel vehicle_model;
    int population = 200;
    uint64_t seed = 0;
    int attention = 6;  // pedestrians under planner attention
    int step_limit = 600;
    double safety_radius = 1.0;
    RewardParams params;
    SolverConfig solver;
    RolloutConfig rollout;
    BeliefParams belief;
    PathCostParams astar;  // path-constrained baseline only
    PrmParams prm;         // roadmap planner only
    double fmm_cell = 1.0;
    uint64_t prm_seed = 0;  // 0 = derived from the episode seed
};

struct EpisodeResult {
    double travel_time = 0.0;  // s
    int sb_count = 0;
    bool unsafe = false;
    Outcome outcome = Outcome::TIMEOUT;
    int steps = 0;
};

/// Plan--act--observe loop until the vehicle reaches its goal, the step limit
/// expires, or the planner fails. Identical (planner, seed, config) runs are
/// bit-reproducible, including the optional JSON-lines trajectory log.
EpisodeResult run_episode(const Environment& env, const EpisodeConfig& cfg,
                          std::ostream* trajectory_log = nullptr);

}  // namespace crowdnav
