#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdnav/pomdp_core.hpp"

namespace crowdnav {

struct BeliefParams {
    double kappa = 2.0;       // concentration of the progress likelihood
    double floor_eps = 1e-3;  // posterior floor so a goal change stays recoverable

    static BeliefParams from_config(const Config& cfg);
};

/// Per-pedestrian discrete distribution over the environment's candidate
/// goals. Every row is nonnegative and sums to one.
struct IntentionBelief {
    std::vector<std::vector<double>> rows;

    static IntentionBelief uniform(int pedestrians, int goals);

    int pedestrian_count() const { return static_cast<int>(rows.size()); }
    int goal_count() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
    void reset_row_uniform(int i);
    /// Shannon entropy of row i divided by log(goal count), in [0, 1].
    double normalized_entropy(int i) const;
};

/// One Bayes step per pedestrian from observed displacement prev -> next.
/// The likelihood of goal g is exp(kappa * cos phi_g) with phi_g the angle
/// between the displacement and the direction to g; near-zero displacements
/// carry no information. Posteriors are floored at floor_eps and renormalized.
IntentionBelief update_belief(const IntentionBelief& belief, std::span<const Vec2> prev,
                              std::span<const Vec2> next, std::span<const double> speeds, double dt,
                              const std::vector<Vec2>& goals, const BeliefParams& params);

/// A determinized scenario: concrete sampled goals plus the seed that fixes
/// its future motion noise.
struct ScenarioParticle {
    POMDPState state;
    uint64_t seed = 0;
};

/// K particles with per-pedestrian goals drawn independently from the belief
/// rows. Deterministic given the seed.
std::vector<ScenarioParticle> sample_scenarios(const IntentionBelief& belief,
                                               const POMDPState& observed,
                                               const std::vector<Vec2>& goals, int k, uint64_t seed);

/// Rows for departed pedestrians removed; spawned pedestrians start uniform.
IntentionBelief handle_population_change(const IntentionBelief& belief,
                                         const std::vector<int>& departed, int spawned);

}  // namespace crowdnav
