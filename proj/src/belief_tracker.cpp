#include "crowdnav/belief_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crowdnav/config.hpp"

namespace crowdnav {

BeliefParams BeliefParams::from_config(const Config& cfg) {
    BeliefParams p;
    p.kappa = cfg.get_double("belief_kappa", p.kappa);
    p.floor_eps = cfg.get_double("belief_floor", p.floor_eps);
    return p;
}

IntentionBelief IntentionBelief::uniform(int pedestrians, int goals) {
    IntentionBelief b;
    b.rows.assign(pedestrians, std::vector<double>(goals, goals > 0 ? 1.0 / goals : 0.0));
    return b;
}

void IntentionBelief::reset_row_uniform(int i) {
    auto& row = rows.at(i);
    std::fill(row.begin(), row.end(), row.empty() ? 0.0 : 1.0 / row.size());
}

double IntentionBelief::normalized_entropy(int i) const {
    const auto& row = rows.at(i);
    if (row.size() < 2) return 0.0;
    double h = 0.0;
    for (double p : row)
        if (p > 0.0) h -= p * std::log(p);
    return h / std::log(static_cast<double>(row.size()));
}

namespace {

void normalize_row(std::vector<double>& row) {
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum <= 0.0) {
        std::fill(row.begin(), row.end(), row.empty() ? 0.0 : 1.0 / row.size());
        return;
    }
    for (double& v : row) v /= sum;
}

void apply_floor(std::vector<double>& row, double eps) {
    bool touched = false;
    for (double& v : row)
        if (v < eps) {
            v = eps;
            touched = true;
        }
    if (touched) normalize_row(row);
}

}  // namespace

IntentionBelief update_belief(const IntentionBelief& belief, std::span<const Vec2> prev,
                              std::span<const Vec2> next, std::span<const double> speeds, double dt,
                              const std::vector<Vec2>& goals, const BeliefParams& params) {
    const size_t n = belief.rows.size();
    if (prev.size() != n || next.size() != n || speeds.size() != n)
        throw std::invalid_argument("belief update inputs must align by pedestrian");

    IntentionBelief out = belief;
    for (size_t i = 0; i < n; ++i) {
        auto& row = out.rows[i];
        if (row.size() != goals.size())
            throw std::invalid_argument("belief row width does not match goal count");

        const Vec2 disp = next[i] - prev[i];
        const double moved = disp.norm();
        // A pedestrian that barely moved gives no directional evidence.
        if (moved < 0.05 * speeds[i] * dt) {
            apply_floor(row, params.floor_eps);
            continue;
        }
        double sum = 0.0;
        for (size_t g = 0; g < goals.size(); ++g) {
            const Vec2 dir = goals[g] - prev[i];
            const double dist = dir.norm();
            const double cos_phi = dist < 1e-12 ? 1.0 : disp.dot(dir) / (moved * dist);
            row[g] *= std::exp(params.kappa * cos_phi);
            sum += row[g];
        }
        if (sum <= 0.0 || !std::isfinite(sum)) {
            std::fill(row.begin(), row.end(), 1.0 / row.size());
        } else {
            for (double& v : row) v /= sum;
        }
        apply_floor(row, params.floor_eps);
    }
    return out;
}

std::vector<ScenarioParticle> sample_scenarios(const IntentionBelief& belief,
                                               const POMDPState& observed,
                                               const std::vector<Vec2>& goals, int k,
                                               uint64_t seed) {
    if (k <= 0) throw std::invalid_argument("scenario count must be positive");
    if (belief.rows.size() != observed.pedestrians.size())
        throw std::invalid_argument("belief rows must align with observed pedestrians");

    std::vector<ScenarioParticle> particles;
    particles.reserve(k);
    Rng goal_rng(mix_seed(seed, 0x600a15ULL));
    for (int i = 0; i < k; ++i) {
        ScenarioParticle p;
        p.state = observed;
        p.seed = mix_seed(seed, static_cast<uint64_t>(i) + 1);
        for (size_t j = 0; j < p.state.pedestrians.size(); ++j) {
            const int g = goal_rng.sample_discrete(belief.rows[j]);
            p.state.pedestrians[j].goal = goals.at(g);
        }
        particles.push_back(std::move(p));
    }
    return particles;
}

IntentionBelief handle_population_change(const IntentionBelief& belief,
                                         const std::vector<int>& departed, int spawned) {
    const int goals = belief.goal_count();
    std::vector<bool> remove(belief.rows.size(), false);
    for (int idx : departed) {
        if (idx < 0 || idx >= belief.pedestrian_count())
            throw std::invalid_argument("departed index out of range");
        remove[idx] = true;
    }
    IntentionBelief out;
    for (size_t i = 0; i < belief.rows.size(); ++i)
        if (!remove[i]) out.rows.push_back(belief.rows[i]);
    for (int i = 0; i < spawned; ++i)
        out.rows.push_back(std::vector<double>(goals, goals > 0 ? 1.0 / goals : 0.0));
    return out;
}

}  // namespace crowdnav
