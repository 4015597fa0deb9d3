#include "crowdnav/pomdp_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crowdnav/config.hpp"

namespace crowdnav {

RewardParams RewardParams::from_config(const Config& cfg) {
    RewardParams p;
    p.r_goal = cfg.get_double("reward_goal", p.r_goal);
    p.r_obstacle = cfg.get_double("reward_obstacle", p.r_obstacle);
    p.r_pedestrian = cfg.get_double("reward_pedestrian", p.r_pedestrian);
    p.r_sudden_brake = cfg.get_double("reward_sudden_brake", p.r_sudden_brake);
    p.r_step = cfg.get_double("reward_step", p.r_step);
    p.d_goal = cfg.get_double("dist_goal", p.d_goal);
    p.d_obstacle = cfg.get_double("dist_obstacle", p.d_obstacle);
    p.d_pedestrian = cfg.get_double("dist_pedestrian", p.d_pedestrian);
    p.v_max = cfg.get_double("vehicle_max_speed", p.v_max);
    p.gamma = cfg.get_double("discount", p.gamma);
    p.dt = cfg.get_double("step_dt", p.dt);
    p.observation_cell = cfg.get_double("observation_cell", p.observation_cell);
    p.ped_noise_sigma = cfg.get_double("ped_noise_sigma", p.ped_noise_sigma);
    p.ped_noise_bound = cfg.get_double("ped_noise_bound", p.ped_noise_bound);
    p.pedestrian_speed = cfg.get_double("pedestrian_speed", p.pedestrian_speed);
    p.obstacle_penalty = cfg.get_bool("obstacle_penalty", p.obstacle_penalty);
    return p;
}

namespace {

constexpr double kSpeedEps = 1e-9;

/// The seven fixed heading changes: -45 deg .. 45 deg at 15 deg intervals.
const std::vector<double>& fixed_heading_deltas() {
    static const std::vector<double> deltas = [] {
        std::vector<double> d;
        for (int deg = -45; deg <= 45; deg += 15) d.push_back(deg_to_rad(deg));
        return d;
    }();
    return deltas;
}

}  // namespace

std::vector<NavAction> legal_actions(const VehicleState& vehicle, double delta_ro,
                                     const RewardParams& params) {
    std::vector<NavAction> actions;
    const bool stationary = vehicle.speed <= kSpeedEps;
    const bool can_accelerate = vehicle.speed + 1.0 <= params.v_max + kSpeedEps;
    if (stationary) {
        // Stay put, or pick up speed while choosing a heading.
        actions.push_back(NavAction::steer(0.0, 0.0));
        if (can_accelerate) {
            for (double d : fixed_heading_deltas()) actions.push_back(NavAction::steer(d, 1.0));
            actions.push_back(NavAction::steer(delta_ro, 1.0));
        }
    } else {
        if (can_accelerate) actions.push_back(NavAction::steer(0.0, 1.0));
        actions.push_back(NavAction::steer(0.0, -1.0));
        for (double d : fixed_heading_deltas()) actions.push_back(NavAction::steer(d, 0.0));
        actions.push_back(NavAction::steer(delta_ro, 0.0));
        actions.push_back(NavAction::sudden_brake());
    }
    std::sort(actions.begin(), actions.end());
    return actions;
}

double reward(const POMDPState& s, const NavAction& a, const POMDPState& s2,
              const RewardParams& params, const Environment& env) {
    (void)s;
    double r = params.r_step;
    const VehicleState& v2 = s2.vehicle;
    if (at_goal(v2, params)) r += params.r_goal;
    if (params.obstacle_penalty && env.obstacle_clearance(v2.pos) < params.d_obstacle)
        r += params.r_obstacle;
    if (v2.speed > kSpeedEps) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& ped : s2.pedestrians) dmin = std::min(dmin, distance(v2.pos, ped.pos));
        if (dmin < params.d_pedestrian) r += params.r_pedestrian;
    }
    r += (v2.speed - params.v_max) / params.v_max;
    if (a.is_brake()) r += params.r_sudden_brake;
    return r;
}

VehicleState advance_vehicle(const VehicleState& v, const NavAction& a, const VehicleModel& model,
                             const RewardParams& params, const Environment& env) {
    VehicleState out = v;
    if (a.is_brake()) {
        out.speed = 0.0;
        return out;
    }
    out.speed = std::clamp(v.speed + a.speed_delta, 0.0, params.v_max);
    const double limit = model.max_turn(out.speed, params.dt);
    const double turn = std::clamp(wrap_angle(a.heading_delta), -limit, limit);
    if (model.kind == VehicleModel::Kind::HOLONOMIC || std::abs(turn) < 1e-9) {
        out.heading = wrap_angle(v.heading + turn);
        out.pos = v.pos + unit_from_angle(out.heading) * (out.speed * params.dt);
    } else {
        // Constant-curvature arc of length speed * dt.
        const double radius = out.speed * params.dt / turn;
        out.heading = wrap_angle(v.heading + turn);
        out.pos.x = v.pos.x + radius * (std::sin(v.heading + turn) - std::sin(v.heading));
        out.pos.y = v.pos.y + radius * (std::cos(v.heading) - std::cos(v.heading + turn));
    }
    out.pos.x = std::clamp(out.pos.x, 0.0, env.width);
    out.pos.y = std::clamp(out.pos.y, 0.0, env.height);
    return out;
}

PedestrianState advance_pedestrian(const PedestrianState& p, Rng& rng, const RewardParams& params,
                                   const Environment& env) {
    PedestrianState out = p;
    const double noise = rng.truncated_gaussian(params.ped_noise_sigma, params.ped_noise_bound);
    const Vec2 to_goal = p.goal - p.pos;
    const double dist = to_goal.norm();
    if (dist < 1e-12) return out;
    const double step = std::max(0.0, p.speed * params.dt + noise);
    if (step >= dist) {
        out.pos = p.goal;
    } else {
        out.pos = p.pos + to_goal * (step / dist);
    }
    out.pos.x = std::clamp(out.pos.x, 0.0, env.width);
    out.pos.y = std::clamp(out.pos.y, 0.0, env.height);
    return out;
}

POMDPState step_state(const POMDPState& s, const NavAction& a, Rng& rng, const RewardParams& params,
                      const Environment& env, const VehicleModel& model) {
    POMDPState out;
    out.vehicle = advance_vehicle(s.vehicle, a, model, params, env);
    out.pedestrians.reserve(s.pedestrians.size());
    for (const auto& ped : s.pedestrians)
        out.pedestrians.push_back(advance_pedestrian(ped, rng, params, env));
    return out;
}

StepResult generative_step(const POMDPState& s, const NavAction& a, Rng& rng,
                           const RewardParams& params, const Environment& env,
                           const VehicleModel& model) {
    if (!a.is_brake()) {
        const double ds = a.speed_delta;
        const bool unit_delta = std::abs(ds) < kSpeedEps || std::abs(ds - 1.0) < kSpeedEps ||
                                std::abs(ds + 1.0) < kSpeedEps;
        if (!unit_delta) throw std::invalid_argument("speed change must be -1, 0 or +1 m/s");
        const double target = s.vehicle.speed + ds;
        if (target < -kSpeedEps || target > params.v_max + kSpeedEps)
            throw std::invalid_argument("speed change leaves [0, v_max]");
    }
    StepResult result;
    result.state = step_state(s, a, rng, params, env, model);
    result.observation = discretize_observation(result.state, params.observation_cell);
    result.reward = reward(s, a, result.state, params, env);
    return result;
}

NavObservation discretize_observation(const POMDPState& s, double cell) {
    auto to_cell = [cell](const Vec2& p) {
        return GridCell{static_cast<int>(std::floor(p.x / cell)),
                        static_cast<int>(std::floor(p.y / cell))};
    };
    NavObservation obs;
    obs.vehicle_cell = to_cell(s.vehicle.pos);
    obs.pedestrian_cells.reserve(s.pedestrians.size());
    for (const auto& ped : s.pedestrians) obs.pedestrian_cells.push_back(to_cell(ped.pos));
    return obs;
}

std::optional<double> terminal_value(const POMDPState& s, const RewardParams& params,
                                     const Environment& env) {
    double value = 0.0;
    bool terminal = false;
    if (at_goal(s.vehicle, params)) {
        value += params.r_goal;
        terminal = true;
    }
    if (s.vehicle.speed > kSpeedEps && nearest_pedestrian_distance(s) < params.d_pedestrian) {
        value += params.r_pedestrian;
        terminal = true;
    }
    if (params.obstacle_penalty && env.obstacle_clearance(s.vehicle.pos) < params.d_obstacle) {
        value += params.r_obstacle;
        terminal = true;
    }
    if (!terminal) return std::nullopt;
    return value;
}

double nearest_pedestrian_distance(const POMDPState& s) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& ped : s.pedestrians) dmin = std::min(dmin, distance(s.vehicle.pos, ped.pos));
    return dmin;
}

}  // namespace crowdnav
