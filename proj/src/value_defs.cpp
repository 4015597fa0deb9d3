#include "crowdnav/value_defs.hpp"

#include <cmath>

#include "crowdnav/rollout_policies.hpp"

namespace crowdnav {

PolicyValueEstimate monte_carlo_policy_value(const StatePolicy& policy,
                                             const IntentionBelief& belief,
                                             const POMDPState& state,
                                             const std::vector<Vec2>& goals, int rollouts,
                                             int horizon, uint64_t seed,
                                             const RewardParams& params, const Environment& env,
                                             const VehicleModel& model,
                                             const std::string& belief_id) {
    const auto particles = sample_scenarios(belief, state, goals, rollouts, seed);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& particle : particles) {
        POMDPState s = particle.state;
        double total = 0.0;
        double discount = 1.0;
        if (const auto tv = terminal_value(s, params, env)) {
            total = *tv;
        } else {
            for (int k = 0; k < horizon; ++k) {
                const NavAction a = policy(s);
                Rng rng = scenario_noise(particle.seed, k);
                const POMDPState next = step_state(s, a, rng, params, env, model);
                total += discount * reward(s, a, next, params, env);
                discount *= params.gamma;
                s = next;
                if (is_terminal(s, params, env)) break;
            }
        }
        sum += total;
        sum_sq += total * total;
    }

    PolicyValueEstimate est;
    est.belief_id = belief_id;
    est.rollouts = rollouts;
    est.horizon = horizon;
    est.value = sum / rollouts;
    if (rollouts > 1) {
        const double var = (sum_sq - sum * sum / rollouts) / (rollouts - 1);
        est.sem = std::sqrt(std::max(0.0, var) / rollouts);
    }
    return est;
}

}  // namespace crowdnav
