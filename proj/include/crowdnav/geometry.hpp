#pragma once

#include <algorithm>
#include <cmath>

namespace crowdnav {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Normalizes an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

inline Vec2 unit_from_angle(double heading) { return {std::cos(heading), std::sin(heading)}; }

inline double heading_of(const Vec2& v) { return std::atan2(v.y, v.x); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Distance from point p to the closed segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    if (len_sq <= 0.0) return distance(p, a);
    const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
    return distance(p, a + ab * t);
}

}  // namespace crowdnav
