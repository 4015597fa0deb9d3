#pragma once

#include <functional>
#include <string>

#include "crowdnav/belief_tracker.hpp"
#include "crowdnav/pomdp_core.hpp"

namespace crowdnav {

/// A state-feedback policy evaluated on sampled particles.
using StatePolicy = std::function<NavAction(const POMDPState&)>;

struct PolicyValueEstimate {
    std::string belief_id;
    double value = 0.0;
    double sem = 0.0;
    int horizon = 0;
    int rollouts = 0;
};

/// Mean discounted return of executing the policy from particles sampled out
/// of the belief; the regression oracle for solver quality. Deterministic per
/// seed. Simulation stops at terminal states or after `horizon` steps.
PolicyValueEstimate monte_carlo_policy_value(const StatePolicy& policy,
                                             const IntentionBelief& belief,
                                             const POMDPState& state,
                                             const std::vector<Vec2>& goals, int rollouts,
                                             int horizon, uint64_t seed,
                                             const RewardParams& params, const Environment& env,
                                             const VehicleModel& model,
                                             const std::string& belief_id = "");

}  // namespace crowdnav
