#include "crowdnav/fmm_planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

namespace crowdnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridCell clamp_cell(int x, int y, int width, int height) {
    return {std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1)};
}

}  // namespace

SpeedGrid SpeedGrid::from_environment(const Environment& env, double cell, double inflation) {
    SpeedGrid g;
    g.cell = cell;
    g.width = static_cast<int>(std::round(env.width / cell));
    g.height = static_cast<int>(std::round(env.height / cell));
    g.free.assign(static_cast<size_t>(g.width) * g.height, 1);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            if (env.obstacle_clearance(g.center_of({x, y})) < inflation) g.free[g.index(x, y)] = 0;
    return g;
}

GridCell SpeedGrid::cell_of(const Vec2& p) const {
    return clamp_cell(static_cast<int>(std::floor(p.x / cell)),
                      static_cast<int>(std::floor(p.y / cell)), width, height);
}

GridCell TravelTimeGrid::cell_of(const Vec2& p) const {
    return clamp_cell(static_cast<int>(std::floor(p.x / cell)),
                      static_cast<int>(std::floor(p.y / cell)), width, height);
}

double TravelTimeGrid::time_at(const Vec2& p) const { return time_at(cell_of(p)); }

bool TravelTimeGrid::reachable(const Vec2& p) const { return std::isfinite(time_at(p)); }

namespace {

/// Sethian single-cell update: quadratic in the smaller upwind neighbor value
/// on each axis, falling back to one axis when the quadratic is infeasible.
double upwind_update(double ax, double ay, double h) {
    const double a = std::min(ax, ay);
    const double b = std::max(ax, ay);
    if (!std::isfinite(a)) return kInf;
    if (!std::isfinite(b) || b - a >= h) return a + h;
    const double sum = ax + ay;
    const double disc = 2.0 * h * h - (ax - ay) * (ax - ay);
    return 0.5 * (sum + std::sqrt(disc));
}

/// True when the straight segment between two cell centers stays on free
/// cells, sampled at half-cell resolution.
bool segment_on_free_cells(const SpeedGrid& grid, const Vec2& a, const Vec2& b) {
    const double len = distance(a, b);
    const int samples = std::max(1, static_cast<int>(std::ceil(len / (0.5 * grid.cell))));
    for (int i = 0; i <= samples; ++i) {
        const Vec2 p = a + (b - a) * (static_cast<double>(i) / samples);
        const GridCell c = grid.cell_of(p);
        if (!grid.is_free(c.x, c.y)) return false;
    }
    return true;
}

}  // namespace

TravelTimeGrid solve_eikonal(const SpeedGrid& grid, GridCell source, const FmmOptions& opts) {
    if (!grid.is_free(source.x, source.y))
        throw std::invalid_argument("eikonal source lies inside an obstacle cell");

    TravelTimeGrid out;
    out.cell = grid.cell;
    out.width = grid.width;
    out.height = grid.height;
    out.source = source;
    const size_t n = static_cast<size_t>(grid.width) * grid.height;
    out.time.assign(n, kInf);

    enum class Tag : uint8_t { FAR, NARROW, ACCEPTED };
    std::vector<Tag> tag(n, Tag::FAR);

    // Min-heap keyed by (T, cell index); the index breaks ties deterministically.
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

    const Vec2 src_center = grid.center_of(source);
    std::vector<int> seeded;

    // Exact initialization near the source.
    const double r0 = opts.exact_init_radius;
    const int reach = static_cast<int>(std::ceil(r0 / grid.cell));
    for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx) {
            const int x = source.x + dx;
            const int y = source.y + dy;
            if (!grid.is_free(x, y)) continue;
            const Vec2 c = grid.center_of({x, y});
            const double d = distance(c, src_center);
            if (d > r0) continue;
            if (!segment_on_free_cells(grid, src_center, c)) continue;
            const int idx = grid.index(x, y);
            out.time[idx] = d;
            tag[idx] = Tag::ACCEPTED;
            seeded.push_back(idx);
        }
    if (seeded.empty()) {
        const int idx = grid.index(source.x, source.y);
        out.time[idx] = 0.0;
        tag[idx] = Tag::ACCEPTED;
        seeded.push_back(idx);
    }

    const int dx4[] = {1, -1, 0, 0};
    const int dy4[] = {0, 0, 1, -1};

    auto relax_neighbor = [&](int x, int y) {
        if (!grid.is_free(x, y)) return;
        const int idx = grid.index(x, y);
        if (tag[idx] == Tag::ACCEPTED) return;
        const double ax = std::min(x > 0 ? out.time[idx - 1] : kInf,
                                   x + 1 < grid.width ? out.time[idx + 1] : kInf);
        const double ay = std::min(y > 0 ? out.time[idx - grid.width] : kInf,
                                   y + 1 < grid.height ? out.time[idx + grid.width] : kInf);
        const double t = upwind_update(ax, ay, grid.cell);
        if (t < out.time[idx]) {
            out.time[idx] = t;
            tag[idx] = Tag::NARROW;
            heap.emplace(t, idx);
        }
    };

    for (int idx : seeded) {
        const int x = idx % grid.width;
        const int y = idx / grid.width;
        for (int k = 0; k < 4; ++k) relax_neighbor(x + dx4[k], y + dy4[k]);
    }

    double last_popped = 0.0;
    while (!heap.empty()) {
        const auto [t, idx] = heap.top();
        heap.pop();
        if (tag[idx] == Tag::ACCEPTED || t > out.time[idx]) continue;  // stale entry
        if (t < last_popped - 1e-9)
            throw std::logic_error("fast-marching front popped out of order");
        last_popped = t;
        tag[idx] = Tag::ACCEPTED;
        const int x = idx % grid.width;
        const int y = idx / grid.width;
        for (int k = 0; k < 4; ++k) relax_neighbor(x + dx4[k], y + dy4[k]);
    }
    return out;
}

void compute_sobel_gradients(TravelTimeGrid& t) {
    const size_t n = static_cast<size_t>(t.width) * t.height;
    t.gradient.assign(n, Vec2{0.0, 0.0});
    t.degenerate.assign(n, 0);

    auto sample = [&](int x, int y, double center) {
        const GridCell c = clamp_cell(x, y, t.width, t.height);
        const double v = t.time[t.index(c.x, c.y)];
        return std::isfinite(v) ? v : center;  // one-sided stencil at walls
    };

    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x) {
            const int idx = t.index(x, y);
            const double center = t.time[idx];
            if (!std::isfinite(center)) {
                t.degenerate[idx] = 1;
                continue;
            }
            double gx = 0.0;
            double gy = 0.0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const double v = sample(x + dx, y + dy, center);
                    const double wx = dx * (dy == 0 ? 2.0 : 1.0);
                    const double wy = dy * (dx == 0 ? 2.0 : 1.0);
                    gx += wx * v;
                    gy += wy * v;
                }
            const double norm = std::hypot(gx, gy);
            if (norm < 1e-12) {
                t.degenerate[idx] = 1;
            } else {
                t.gradient[idx] = {gx / norm, gy / norm};
            }
        }
}

TravelTimeGrid solve_travel_time_field(const SpeedGrid& grid, GridCell source,
                                       const FmmOptions& opts) {
    TravelTimeGrid t = solve_eikonal(grid, source, opts);
    compute_sobel_gradients(t);
    return t;
}

namespace {

/// Free 8-neighbor with the smallest T, or nullopt when none is finite.
std::optional<GridCell> steepest_neighbor(const TravelTimeGrid& t, GridCell c) {
    double best = t.time_at(c);
    std::optional<GridCell> pick;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int x = c.x + dx;
            const int y = c.y + dy;
            if (!t.in_bounds(x, y)) continue;
            const double v = t.time[t.index(x, y)];
            if (v < best) {
                best = v;
                pick = GridCell{x, y};
            }
        }
    return pick;
}

}  // namespace

std::optional<double> fmm_next_heading(const TravelTimeGrid& t, const Vec2& p) {
    const GridCell c = t.cell_of(p);
    if (!std::isfinite(t.time_at(c))) return std::nullopt;
    const int idx = t.index(c.x, c.y);
    if (!t.degenerate.empty() && !t.degenerate[idx] && !t.gradient.empty()) {
        const Vec2 g = t.gradient[idx];
        return heading_of({-g.x, -g.y});
    }
    if (const auto nb = steepest_neighbor(t, c)) return heading_of(t.center_of(*nb) - p);
    return std::nullopt;
}

DescentResult descend_to_source(const TravelTimeGrid& t, const Vec2& start, double alpha,
                                int max_steps) {
    DescentResult result;
    Vec2 p = start;
    result.path.push_back(p);
    for (int step = 0; step < max_steps; ++step) {
        const GridCell c = t.cell_of(p);
        if (std::abs(c.x - t.source.x) <= 1 && std::abs(c.y - t.source.y) <= 1) {
            result.reached = true;
            return result;
        }
        const double here = t.time_at(c);
        if (!std::isfinite(here)) return result;

        bool stepped = false;
        if (const auto heading = fmm_next_heading(t, p)) {
            Vec2 cand = p + unit_from_angle(*heading) * alpha;
            cand.x = std::clamp(cand.x, 0.0, t.width * t.cell);
            cand.y = std::clamp(cand.y, 0.0, t.height * t.cell);
            if (t.time_at(cand) < here) {  // accept only strict progress
                p = cand;
                stepped = true;
            }
        }
        if (!stepped) {
            // Fallback: hop to the lowest-T free neighbor, which always
            // exists away from the source because T has no other local minimum.
            const auto nb = steepest_neighbor(t, c);
            if (!nb) return result;
            p = t.center_of(*nb);
        }
        result.path.push_back(p);
    }
    return result;
}

void dump_time_csv(const TravelTimeGrid& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) {
            if (x) out << ',';
            const double v = t.time[t.index(x, y)];
            if (std::isfinite(v))
                out << v;
            else
                out << "inf";
        }
        out << '\n';
    }
}

void dump_gradient_csv(const TravelTimeGrid& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) {
            if (x) out << ',';
            const int idx = t.index(x, y);
            const Vec2 g = t.gradient.empty() ? Vec2{} : t.gradient[idx];
            out << g.x << ';' << g.y;
        }
        out << '\n';
    }
}

}  // namespace crowdnav
