#include "crowdnav/rollout_policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdnav/config.hpp"

namespace crowdnav {

double FmmPathSource::path_length(const Vec2& p) const {
    const double t = field_->time_at(p);
    return std::isfinite(t) ? t : std::numeric_limits<double>::infinity();
}

PrmPathSource::PrmPathSource(const Roadmap& roadmap, const Environment& env, double clearance,
                             double cache_cell)
    : roadmap_(&roadmap), env_(&env), clearance_(clearance), cache_cell_(cache_cell) {
    cache_width_ = static_cast<int>(std::ceil(env.width / cache_cell));
    cache_height_ = static_cast<int>(std::ceil(env.height / cache_cell));
    cell_best_.assign(static_cast<size_t>(cache_width_) * cache_height_, -2);
}

std::optional<int> PrmPathSource::cached_best(const Vec2& p) const {
    const int cx = std::clamp(static_cast<int>(std::floor(p.x / cache_cell_)), 0, cache_width_ - 1);
    const int cy =
        std::clamp(static_cast<int>(std::floor(p.y / cache_cell_)), 0, cache_height_ - 1);
    int& slot = cell_best_[cy * cache_width_ + cx];
    if (slot == -2) {
        const Vec2 center{(cx + 0.5) * cache_cell_, (cy + 0.5) * cache_cell_};
        const auto best = prm_best_node(*roadmap_, center, *env_, clearance_);
        slot = best ? *best : -1;
    }
    if (slot >= 0) return slot;
    return std::nullopt;
}

std::optional<double> PrmPathSource::heading_at(const Vec2& p) const {
    const auto best = cached_best(p);
    if (!best) return prm_next_heading(*roadmap_, p, *env_, clearance_);  // exact fallback
    int target = *best;
    if (distance(p, roadmap_->nodes[target]) < 1e-6) {
        if (roadmap_->next_hop[target] < 0) return 0.0;
        target = roadmap_->next_hop[target];
    }
    return heading_of(roadmap_->nodes[target] - p);
}

double PrmPathSource::path_length(const Vec2& p) const {
    const auto best = cached_best(p);
    if (!best) return prm_path_length(*roadmap_, p, *env_, clearance_);
    return distance(p, roadmap_->nodes[*best]) + roadmap_->cost_to_goal[*best];
}

PolylinePathSource::PolylinePathSource(Vec2 start, PlannedPath path, Vec2 goal) {
    vertices_.push_back(start);
    for (const auto& w : path.waypoints) vertices_.push_back(w);
    if (vertices_.empty() || distance(vertices_.back(), goal) > 1e-9) vertices_.push_back(goal);
}

size_t PolylinePathSource::target_index(const Vec2& p) const {
    // Nearest segment, then head for its end vertex; hop past vertices the
    // position has effectively reached.
    size_t best_seg = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const double d = point_segment_distance(p, vertices_[i], vertices_[i + 1]);
        if (d < best_d - 1e-12) {
            best_d = d;
            best_seg = i;
        }
    }
    size_t target = best_seg + 1;
    while (target + 1 < vertices_.size() && distance(p, vertices_[target]) < 0.25) ++target;
    return target;
}

std::optional<double> PolylinePathSource::heading_at(const Vec2& p) const {
    if (vertices_.size() < 2) return std::nullopt;
    const size_t target = target_index(p);
    if (distance(p, vertices_[target]) < 1e-9) return std::nullopt;
    return heading_of(vertices_[target] - p);
}

double PolylinePathSource::path_length(const Vec2& p) const {
    if (vertices_.size() < 2) return 0.0;
    const size_t target = target_index(p);
    double len = distance(p, vertices_[target]);
    for (size_t i = target; i + 1 < vertices_.size(); ++i)
        len += distance(vertices_[i], vertices_[i + 1]);
    return len;
}

RolloutConfig RolloutConfig::from_config(const Config& cfg) {
    RolloutConfig c;
    c.d_near = cfg.get_double("rollout_d_near", c.d_near);
    c.d_far = cfg.get_double("rollout_d_far", c.d_far);
    c.max_steps = cfg.get_int("rollout_max_steps", c.max_steps);
    return c;
}

double reactive_speed(double v, double nearest_pedestrian, const RolloutConfig& cfg, double v_max) {
    if (nearest_pedestrian > cfg.d_far) return std::min(v + 1.0, v_max);
    if (nearest_pedestrian < cfg.d_near) return std::max(v - 1.0, 0.0);
    return v;
}

double rollout_value(const ScenarioParticle& particle, const PathSource& src,
                     const RolloutConfig& cfg, const RewardParams& params, const Environment& env,
                     const VehicleModel& model, int start_depth, int max_steps) {
    POMDPState s = particle.state;
    if (const auto v = terminal_value(s, params, env)) return *v;

    double total = 0.0;
    double discount = 1.0;
    const int steps = std::min(cfg.max_steps, max_steps);
    for (int k = 0; k < steps; ++k) {
        const auto heading = src.heading_at(s.vehicle.pos);
        if (!heading) break;  // dead state: zero continuation
        const double target = reactive_speed(s.vehicle.speed, nearest_pedestrian_distance(s), cfg,
                                             params.v_max);
        const NavAction a =
            NavAction::steer(wrap_angle(*heading - s.vehicle.heading), target - s.vehicle.speed);
        Rng rng = scenario_noise(particle.seed, start_depth + k);
        const POMDPState next = step_state(s, a, rng, params, env, model);
        total += discount * reward(s, a, next, params, env);
        discount *= params.gamma;
        s = next;
        if (is_terminal(s, params, env)) break;
    }
    return total;
}

double delta_ro(const PathSource& src, const VehicleState& vehicle, const VehicleModel& model,
                double dt) {
    const auto heading = src.heading_at(vehicle.pos);
    if (!heading) return 0.0;
    const double raw = wrap_angle(*heading - vehicle.heading);
    const double limit = model.max_turn(std::max(vehicle.speed, 1.0), dt);
    return std::clamp(raw, -limit, limit);
}

}  // namespace crowdnav
