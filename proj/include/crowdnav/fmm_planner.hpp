#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crowdnav/pomdp_core.hpp"
#include "crowdnav/world_model.hpp"

namespace crowdnav {

/// Binary expansion-speed grid: F = 0 on blocked cells, F = 1 on free space.
struct SpeedGrid {
    double cell = 1.0;
    int width = 0;
    int height = 0;
    std::vector<uint8_t> free;  // row-major, index = y * width + x

    /// Grid over the environment; cells whose center lies within `inflation`
    /// of an obstacle boundary are blocked so that paths keep clearance.
    static SpeedGrid from_environment(const Environment& env, double cell, double inflation);

    int index(int x, int y) const { return y * width + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool is_free(int x, int y) const { return in_bounds(x, y) && free[index(x, y)] != 0; }
    GridCell cell_of(const Vec2& p) const;
    Vec2 center_of(GridCell c) const {
        return {(c.x + 0.5) * cell, (c.y + 0.5) * cell};
    }
};

/// Arrival-time field from a source cell plus the Sobel gradient direction of
/// T at every free cell. Immutable once solved; shared read-only by all
/// roll-out evaluations.
struct TravelTimeGrid {
    double cell = 1.0;
    int width = 0;
    int height = 0;
    GridCell source;
    std::vector<double> time;       // +inf on blocked/unreachable cells
    std::vector<Vec2> gradient;     // unit directions; empty until computed
    std::vector<uint8_t> degenerate;

    int index(int x, int y) const { return y * width + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    GridCell cell_of(const Vec2& p) const;
    Vec2 center_of(GridCell c) const {
        return {(c.x + 0.5) * cell, (c.y + 0.5) * cell};
    }
    double time_at(GridCell c) const { return time[index(c.x, c.y)]; }
    double time_at(const Vec2& p) const;
    bool reachable(const Vec2& p) const;
};

struct FmmOptions {
    /// Cells within this physical radius of the source with a clear line of
    /// sight are seeded with exact distances before the march, which removes
    /// most of the near-source error of the first-order update.
    double exact_init_radius = 5.0;
};

/// First-order upwind (Sethian) solve of 1 = F |grad T| from the source cell
/// over a narrow-band min-priority front. Throws when the source is blocked.
TravelTimeGrid solve_eikonal(const SpeedGrid& grid, GridCell source, const FmmOptions& opts = {});

/// Fills the normalized 3x3 Sobel gradient of T per free cell. Infinite
/// neighbors take the center value (one-sided stencil); zero-response cells
/// are flagged degenerate.
void compute_sobel_gradients(TravelTimeGrid& t);

/// Convenience: solve plus gradients.
TravelTimeGrid solve_travel_time_field(const SpeedGrid& grid, GridCell source,
                                       const FmmOptions& opts = {});

/// Heading a descent step should follow from p: opposite the gradient at p's
/// cell, with a steepest-neighbor fallback where the Sobel response is
/// degenerate. Empty when p lies in an unreachable cell (dead state).
std::optional<double> fmm_next_heading(const TravelTimeGrid& t, const Vec2& p);

struct DescentResult {
    std::vector<Vec2> path;
    bool reached = false;
};

/// Gradient descent with fixed step alpha from `start` toward the source.
/// Falls back to the steepest free neighbor whenever the gradient step fails
/// to decrease T, so progress is strict and no cycle can form.
DescentResult descend_to_source(const TravelTimeGrid& t, const Vec2& start, double alpha,
                                int max_steps);

/// Debug dumps: one CSV value per cell.
void dump_time_csv(const TravelTimeGrid& t, const std::string& path);
void dump_gradient_csv(const TravelTimeGrid& t, const std::string& path);

}  // namespace crowdnav
