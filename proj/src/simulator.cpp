#include "crowdnav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "crowdnav/fmm_planner.hpp"
#include "crowdnav/rollout_policies.hpp"

namespace crowdnav {

namespace {

constexpr uint64_t kWorldTag = 0x3077ULL;
constexpr uint64_t kPrmTag = 0x9147ULL;
constexpr uint64_t kPlanTag = 0x71a2ULL;

int goal_index_near(const Environment& env, const Vec2& p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < env.pedestrian_goals.size(); ++i) {
        const double d = distance(env.pedestrian_goals[i], p);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

PedestrianAgent spawn_on_edge(const Environment& env, const RewardParams& params, Rng& rng) {
    PedestrianAgent agent;
    agent.speed = params.pedestrian_speed;
    const int edge = rng.uniform_int(4);  // 0 bottom, 1 top, 2 left, 3 right
    const double along = edge < 2 ? rng.uniform(0.0, env.width) : rng.uniform(0.0, env.height);
    const int pick = rng.uniform_int(2);
    switch (edge) {
        case 0:
            agent.pos = {along, 0.0};
            agent.goal_index = goal_index_near(env, {pick == 0 ? 0.0 : env.width, env.height});
            break;
        case 1:
            agent.pos = {along, env.height};
            agent.goal_index = goal_index_near(env, {pick == 0 ? 0.0 : env.width, 0.0});
            break;
        case 2:
            agent.pos = {0.0, along};
            agent.goal_index = goal_index_near(env, {env.width, pick == 0 ? 0.0 : env.height});
            break;
        default:
            agent.pos = {env.width, along};
            agent.goal_index = goal_index_near(env, {0.0, pick == 0 ? 0.0 : env.height});
            break;
    }
    return agent;
}

}  // namespace

WorldState init_world(const Environment& env, int population, const RewardParams& params,
                      Rng& rng) {
    WorldState world;
    world.vehicle = {env.vehicle_start, 0.0, 0.0, env.vehicle_goal};
    world.pedestrians.reserve(population);
    for (int i = 0; i < population; ++i) {
        PedestrianAgent agent;
        agent.speed = params.pedestrian_speed;
        do {
            agent.pos = {rng.uniform(0.0, env.width), rng.uniform(0.0, env.height)};
        } while (env.obstacle_clearance(agent.pos) < 0.0);
        agent.goal_index = rng.uniform_int(static_cast<int>(env.pedestrian_goals.size()));
        world.pedestrians.push_back(agent);
    }
    return world;
}

WorldStepInfo step_world(WorldState& world, const NavAction& action, const Environment& env,
                         const RewardParams& params, const VehicleModel& model, Rng& rng) {
    WorldStepInfo info;
    world.vehicle = advance_vehicle(world.vehicle, action, model, params, env);
    for (size_t i = 0; i < world.pedestrians.size(); ++i) {
        auto& agent = world.pedestrians[i];
        PedestrianState ped{agent.pos, agent.speed, env.pedestrian_goals[agent.goal_index]};
        ped = advance_pedestrian(ped, rng, params, env);
        if (distance(ped.pos, ped.goal) < 1e-9) {
            agent = spawn_on_edge(env, params, rng);
            info.respawned.push_back(static_cast<int>(i));
        } else {
            agent.pos = ped.pos;
        }
    }
    world.step += 1;
    world.elapsed = world.step * params.dt;
    return info;
}

bool safety_check(const WorldState& world, double safety_radius) {
    if (world.vehicle.speed <= 1e-9) return false;
    for (const auto& agent : world.pedestrians)
        if (distance(world.vehicle.pos, agent.pos) < safety_radius) return true;
    return false;
}

std::string planner_name(PlannerKind kind) {
    switch (kind) {
        case PlannerKind::LS_ASTAR: return "ls_astar";
        case PlannerKind::ES_FMM: return "es_fmm";
        case PlannerKind::ES_PRM: return "es_prm";
        case PlannerKind::ES_NHV_STRAIGHT: return "es_nhv_straight";
    }
    return "unknown";
}

PlannerKind planner_from_name(const std::string& name) {
    if (name == "ls_astar") return PlannerKind::LS_ASTAR;
    if (name == "es_fmm") return PlannerKind::ES_FMM;
    if (name == "es_prm") return PlannerKind::ES_PRM;
    if (name == "es_nhv_straight") return PlannerKind::ES_NHV_STRAIGHT;
    throw std::invalid_argument("unknown planner: " + name);
}

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::GOAL: return "goal";
        case Outcome::TIMEOUT: return "timeout";
        case Outcome::PLANNER_FAILURE: return "planner_failure";
    }
    return "unknown";
}

namespace {

POMDPState observed_state(const WorldState& world, const Environment& env,
                          const std::vector<int>& tracked, const RewardParams& params) {
    POMDPState s;
    s.vehicle = world.vehicle;
    s.pedestrians.reserve(tracked.size());
    for (int idx : tracked) {
        const auto& agent = world.pedestrians[idx];
        // The goal is the hidden variable; particles overwrite this slot.
        s.pedestrians.push_back({agent.pos, agent.speed, env.pedestrian_goals[0]});
    }
    (void)params;
    return s;
}

void log_step(std::ostream& out, const WorldState& world, const NavAction& action,
              const std::vector<int>& tracked, const IntentionBelief& belief,
              const SearchStats& stats) {
    nlohmann::json rec;
    rec["t"] = world.elapsed;
    rec["vehicle"] = {world.vehicle.pos.x, world.vehicle.pos.y, world.vehicle.heading,
                      world.vehicle.speed};
    rec["action"] = {{"kind", action.is_brake() ? "brake" : "steer"},
                     {"dh", action.heading_delta},
                     {"ds", action.speed_delta}};
    auto peds = nlohmann::json::array();
    for (const auto& agent : world.pedestrians) peds.push_back({agent.pos.x, agent.pos.y});
    rec["peds"] = std::move(peds);
    nlohmann::json rows;
    for (int idx : tracked) rows[std::to_string(idx)] = belief.rows[idx];
    rec["belief"] = std::move(rows);
    rec["search"] = {{"iterations", stats.iterations},
                     {"nodes", stats.tree_nodes},
                     {"root_lower", stats.root_lower},
                     {"root_upper", stats.root_upper}};
    out << rec.dump() << '\n';
}

}  // namespace

EpisodeResult run_episode(const Environment& env, const EpisodeConfig& cfg,
                          std::ostream* trajectory_log) {
    RewardParams plan_params = cfg.params;
    if (cfg.planner == PlannerKind::LS_ASTAR) plan_params.obstacle_penalty = false;

    Rng world_rng(mix_seed(cfg.seed, kWorldTag));
    WorldState world = init_world(env, cfg.population, cfg.params, world_rng);

    // Multi-query route sources are computed once per episode.
    TravelTimeGrid fmm_field;
    Roadmap roadmap;
    std::unique_ptr<PathSource> route;
    switch (cfg.planner) {
        case PlannerKind::ES_FMM: {
            const SpeedGrid grid =
                SpeedGrid::from_environment(env, cfg.fmm_cell, cfg.params.d_obstacle);
            fmm_field = solve_travel_time_field(grid, grid.cell_of(env.vehicle_goal));
            route = std::make_unique<FmmPathSource>(fmm_field);
            break;
        }
        case PlannerKind::ES_PRM: {
            const uint64_t prm_seed =
                cfg.prm_seed != 0 ? cfg.prm_seed : mix_seed(cfg.seed, kPrmTag);
            roadmap = build_roadmap(env, cfg.prm, prm_seed);
            route = std::make_unique<PrmPathSource>(roadmap, env, cfg.prm.clearance);
            break;
        }
        case PlannerKind::ES_NHV_STRAIGHT:
            route = std::make_unique<StraightLinePathSource>(env.vehicle_goal);
            break;
        case PlannerKind::LS_ASTAR:
            break;  // replanned every step
    }

    const int goal_count = static_cast<int>(env.pedestrian_goals.size());
    IntentionBelief belief = IntentionBelief::uniform(cfg.population, goal_count);
    DespotSolver solver(env, plan_params, cfg.vehicle_model, cfg.solver, cfg.rollout);

    std::vector<Vec2> prev_positions;
    prev_positions.reserve(cfg.population);
    for (const auto& agent : world.pedestrians) prev_positions.push_back(agent.pos);
    std::vector<double> speeds(cfg.population, cfg.params.pedestrian_speed);

    PlannedPath previous_path;
    EpisodeResult result;

    while (world.step < cfg.step_limit) {
        if (at_goal(world.vehicle, cfg.params)) {
            result.outcome = Outcome::GOAL;
            result.travel_time = world.elapsed;
            result.steps = world.step;
            return result;
        }

        const int attention = std::min<int>(cfg.attention, cfg.population);
        POMDPState full;
        full.vehicle = world.vehicle;
        for (const auto& agent : world.pedestrians)
            full.pedestrians.push_back(
                {agent.pos, agent.speed, env.pedestrian_goals[agent.goal_index]});
        const std::vector<int> tracked = nearest_pedestrians(full, attention);

        NavAction action = NavAction::sudden_brake();
        try {
            const POMDPState observed = observed_state(world, env, tracked, cfg.params);
            IntentionBelief tracked_belief;
            for (int idx : tracked) tracked_belief.rows.push_back(belief.rows[idx]);
            const uint64_t plan_seed = mix_seed(cfg.seed, kPlanTag, world.step);

            if (cfg.planner == PlannerKind::LS_ASTAR) {
                std::vector<PedestrianState> all_peds = full.pedestrians;
                PlannedPath path = plan_path(env, world.vehicle, all_peds, belief, cfg.astar,
                                             previous_path.empty() ? nullptr : &previous_path);
                previous_path = path;
                PolylinePathSource path_route(world.vehicle.pos, path, env.vehicle_goal);
                action = solver.plan(tracked_belief, observed, env.pedestrian_goals, path_route,
                                     DespotSolver::ActionMode::PATH_SPEED, plan_seed);
            } else {
                action = solver.plan(tracked_belief, observed, env.pedestrian_goals, *route,
                                     DespotSolver::ActionMode::EXTENDED, plan_seed);
            }
        } catch (const std::exception&) {
            result.outcome = Outcome::PLANNER_FAILURE;
            result.travel_time = world.elapsed;
            result.steps = world.step;
            return result;
        }

        const WorldStepInfo info =
            step_world(world, action, env, cfg.params, cfg.vehicle_model, world_rng);
        if (action.is_brake()) result.sb_count += 1;
        if (safety_check(world, cfg.safety_radius)) result.unsafe = true;

        std::vector<Vec2> next_positions;
        next_positions.reserve(cfg.population);
        for (const auto& agent : world.pedestrians) next_positions.push_back(agent.pos);
        belief = update_belief(belief, prev_positions, next_positions, speeds, cfg.params.dt,
                               env.pedestrian_goals, cfg.belief);
        for (int idx : info.respawned) belief.reset_row_uniform(idx);
        prev_positions = std::move(next_positions);

        if (trajectory_log)
            log_step(*trajectory_log, world, action, tracked, belief, solver.stats());
    }

    result.outcome = Outcome::TIMEOUT;
    result.travel_time = world.elapsed;
    result.steps = world.step;
    return result;
}

}  // namespace crowdnav
