#pragma once

#include <memory>
#include <optional>

#include "crowdnav/belief_tracker.hpp"
#include "crowdnav/fmm_planner.hpp"
#include "crowdnav/hybrid_astar.hpp"
#include "crowdnav/pomdp_core.hpp"
#include "crowdnav/prm_planner.hpp"

namespace crowdnav {

/// A multi-query route supplier: every roll-out policy reduces to "follow the
/// source's heading at the current position, pick speed reactively".
class PathSource {
public:
    virtual ~PathSource() = default;
    /// Heading the route follows at p; empty in a dead state (no route).
    virtual std::optional<double> heading_at(const Vec2& p) const = 0;
    /// Remaining route length from p in meters; +inf in a dead state.
    virtual double path_length(const Vec2& p) const = 0;
};

/// Follows the arrival-time field downhill to the goal.
class FmmPathSource : public PathSource {
public:
    explicit FmmPathSource(const TravelTimeGrid& field) : field_(&field) {}
    std::optional<double> heading_at(const Vec2& p) const override {
        return fmm_next_heading(*field_, p);
    }
    double path_length(const Vec2& p) const override;

private:
    const TravelTimeGrid* field_;
};

/// Heads for the best visible roadmap node, then along the precomputed
/// shortest path. Queries are cached per grid cell; tree search and roll-outs
/// hit this on every step.
class PrmPathSource : public PathSource {
public:
    PrmPathSource(const Roadmap& roadmap, const Environment& env, double clearance,
                  double cache_cell = 1.0);
    std::optional<double> heading_at(const Vec2& p) const override;
    double path_length(const Vec2& p) const override;

private:
    std::optional<int> cached_best(const Vec2& p) const;

    const Roadmap* roadmap_;
    const Environment* env_;
    double clearance_;
    double cache_cell_;
    int cache_width_ = 0;
    int cache_height_ = 0;
    // Lazily filled per-cell answers: -2 = unresolved, -1 = dead, else node id.
    mutable std::vector<int> cell_best_;
};

/// Tracks a planned waypoint sequence; used for the path-constrained planner.
class PolylinePathSource : public PathSource {
public:
    PolylinePathSource(Vec2 start, PlannedPath path, Vec2 goal);
    std::optional<double> heading_at(const Vec2& p) const override;
    double path_length(const Vec2& p) const override;

private:
    /// Index of the vertex the route should head for from p.
    size_t target_index(const Vec2& p) const;

    std::vector<Vec2> vertices_;  // start, waypoints..., goal
};

/// Straight line to the goal; the roll-out for the Dubins vehicle in open
/// space, where steering saturation bends the realized motion.
class StraightLinePathSource : public PathSource {
public:
    explicit StraightLinePathSource(Vec2 goal) : goal_(goal) {}
    std::optional<double> heading_at(const Vec2& p) const override {
        if (distance(p, goal_) < 1e-9) return std::nullopt;
        return heading_of(goal_ - p);
    }
    double path_length(const Vec2& p) const override { return distance(p, goal_); }

private:
    Vec2 goal_;
};

struct RolloutConfig {
    double d_near = 3.0;  // m; decelerate below this pedestrian distance
    double d_far = 6.0;   // m; accelerate beyond it
    int max_steps = 40;

    static RolloutConfig from_config(const Config& cfg);
};

/// Reactive speed rule: +1 m/s when no pedestrian is within d_far, -1 m/s when
/// one is within d_near, otherwise hold. Clamped to [0, v_max].
double reactive_speed(double v, double nearest_pedestrian, const RolloutConfig& cfg, double v_max);

/// Per-(scenario, depth) noise stream; the same scenario at the same depth
/// sees identical noise regardless of the action path above it.
inline Rng scenario_noise(uint64_t scenario_seed, int depth) {
    return Rng(mix_seed(scenario_seed, 0xd3f7ULL, static_cast<uint64_t>(depth)));
}

/// Discounted return of the roll-out policy simulated from the particle:
/// heading from the path source, speed from the reactive rule, rewards from
/// the generative model, for at most `max_steps` (capped by remaining tree
/// depth) or until a terminal state. A particle that starts terminal returns
/// its terminal value; a dead roll-out state truncates with zero continuation.
double rollout_value(const ScenarioParticle& particle, const PathSource& src,
                     const RolloutConfig& cfg, const RewardParams& params, const Environment& env,
                     const VehicleModel& model, int start_depth, int max_steps);

/// Heading-change action that aligns the vehicle with the roll-out route at
/// its current position; saturated by the steering limit for the Dubins
/// vehicle (evaluated at the speed the vehicle would move at, at least
/// 1 m/s). Dead state falls back to zero.
double delta_ro(const PathSource& src, const VehicleState& vehicle, const VehicleModel& model,
                double dt);

}  // namespace crowdnav
