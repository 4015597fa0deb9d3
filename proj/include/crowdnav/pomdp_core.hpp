#pragma once

#include <compare>
#include <optional>
#include <vector>

#include "crowdnav/geometry.hpp"
#include "crowdnav/rng.hpp"
#include "crowdnav/world_model.hpp"

namespace crowdnav {

class Config;

struct VehicleState {
    Vec2 pos;
    double heading = 0.0;  // rad
    double speed = 0.0;    // m/s
    Vec2 goal;
};

struct PedestrianState {
    Vec2 pos;
    double speed = 1.0;  // preferred speed, m/s
    Vec2 goal;
};

/// Joint planning state: the vehicle plus the pedestrians under attention
/// (the n_ped nearest during tree search).
struct POMDPState {
    VehicleState vehicle;
    std::vector<PedestrianState> pedestrians;
};

enum class ActionKind { STEER_SPEED, SUDDEN_BRAKE };

/// Extended-space control: a (heading change, speed change) pair, or the
/// sudden-brake action that stops the vehicle immediately.
struct NavAction {
    ActionKind kind = ActionKind::STEER_SPEED;
    double heading_delta = 0.0;  // rad
    double speed_delta = 0.0;    // m/s

    static NavAction steer(double dheading, double dspeed) {
        return {ActionKind::STEER_SPEED, dheading, dspeed};
    }
    static NavAction sudden_brake() { return {ActionKind::SUDDEN_BRAKE, 0.0, 0.0}; }
    bool is_brake() const { return kind == ActionKind::SUDDEN_BRAKE; }

    friend auto operator<=>(const NavAction&, const NavAction&) = default;
};

struct GridCell {
    int x = 0;
    int y = 0;
    friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

/// Discretized vehicle and pedestrian positions; the belief-tree branching key.
struct NavObservation {
    GridCell vehicle_cell;
    std::vector<GridCell> pedestrian_cells;
    friend auto operator<=>(const NavObservation&, const NavObservation&) = default;
};

/// Reward constants, clearance thresholds and kinematics shared by the
/// planners and the simulator.
struct RewardParams {
    double r_goal = 1000.0;
    double r_obstacle = -1000.0;
    double r_pedestrian = -1000.0;
    double r_sudden_brake = -50.0;
    double r_step = -1.0;
    double d_goal = 1.0;        // m
    double d_obstacle = 1.0;    // m
    double d_pedestrian = 1.0;  // m
    double v_max = 2.0;         // m/s
    double gamma = 0.97;
    double dt = 0.5;                  // s
    double observation_cell = 1.0;    // m
    double ped_noise_sigma = 0.1;     // m per step
    double ped_noise_bound = 0.3;     // m per step
    double pedestrian_speed = 1.0;    // m/s, preferred speed default
    bool obstacle_penalty = true;     // off for the path-constrained planner

    static RewardParams from_config(const Config& cfg);
};

/// Vehicle kinematics. The holonomic vehicle turns freely; the Dubins vehicle
/// turns along constant-curvature arcs limited by the steering angle.
struct VehicleModel {
    enum class Kind { HOLONOMIC, DUBINS };
    Kind kind = Kind::HOLONOMIC;
    double wheelbase = 1.0;          // m
    double max_steer = kPi / 4.0;    // rad

    /// Largest heading change realizable in one step at the given speed.
    double max_turn(double speed, double dt) const {
        if (kind == Kind::HOLONOMIC) return 2.0 * kPi;
        return speed * dt * std::tan(max_steer) / wheelbase;
    }
};

/// The discrete action menu at a vehicle state. delta_ro is the roll-out
/// heading-change slot; it is kept as a distinct entry even when it
/// numerically coincides with a fixed heading choice.
/// Stationary vehicle: 9 actions. Moving below v_max: 11 (sudden brake
/// included). At v_max the accelerate action drops out, leaving 10.
std::vector<NavAction> legal_actions(const VehicleState& vehicle, double delta_ro,
                                     const RewardParams& params);

/// Sum of the applicable reward terms for the transition s -> s2 under a.
double reward(const POMDPState& s, const NavAction& a, const POMDPState& s2,
              const RewardParams& params, const Environment& env);

/// Vehicle advanced one step by the action; walls clamp the position.
VehicleState advance_vehicle(const VehicleState& v, const NavAction& a, const VehicleModel& model,
                             const RewardParams& params, const Environment& env);

/// Pedestrian advanced toward its goal by speed * dt + noise, never past the
/// goal. Consumes exactly one noise draw.
PedestrianState advance_pedestrian(const PedestrianState& p, Rng& rng, const RewardParams& params,
                                   const Environment& env);

/// Core dynamics without action-menu validation; used by roll-out policies
/// that steer and change speed simultaneously.
POMDPState step_state(const POMDPState& s, const NavAction& a, Rng& rng, const RewardParams& params,
                      const Environment& env, const VehicleModel& model);

struct StepResult {
    POMDPState state;
    NavObservation observation;
    double reward = 0.0;
};

/// Generative model: samples the next state, its observation and the reward.
/// Throws std::invalid_argument for structurally illegal actions.
StepResult generative_step(const POMDPState& s, const NavAction& a, Rng& rng,
                           const RewardParams& params, const Environment& env,
                           const VehicleModel& model);

/// Positions mapped to half-open grid cells of the given size.
NavObservation discretize_observation(const POMDPState& s, double cell);

/// Terminal evaluation of a state: goal reward, moving-vehicle pedestrian
/// collision, obstacle contact (summed when several apply). Empty when the
/// state is non-terminal.
std::optional<double> terminal_value(const POMDPState& s, const RewardParams& params,
                                     const Environment& env);

inline bool is_terminal(const POMDPState& s, const RewardParams& params, const Environment& env) {
    return terminal_value(s, params, env).has_value();
}

inline bool at_goal(const VehicleState& v, const RewardParams& params) {
    return distance(v.pos, v.goal) <= params.d_goal;
}

/// Distance from the vehicle to the nearest pedestrian; +inf when none.
double nearest_pedestrian_distance(const POMDPState& s);

}  // namespace crowdnav
