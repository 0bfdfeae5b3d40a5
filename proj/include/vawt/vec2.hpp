#pragma once

#include <cmath>

namespace vawt {

/// Plain 2D vector in the rotor plane (x downstream, y crosswind).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) noexcept { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) noexcept { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) noexcept { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) noexcept { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) noexcept { return a.x * b.y - a.y * b.x; }

/// Counter-clockwise rotation by 90 degrees.
constexpr Vec2 perp(const Vec2& a) noexcept { return {-a.y, a.x}; }

inline double norm(const Vec2& a) noexcept { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) noexcept { return a.x * a.x + a.y * a.y; }

inline Vec2 rotated(const Vec2& a, double angle) noexcept {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }
constexpr double rpm_to_rad_per_s(double rpm) noexcept { return rpm * kTwoPi / 60.0; }

/// Wraps an angle into [0, 2*pi).
inline double wrap_two_pi(double a) noexcept {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w -= kTwoPi;
    return w;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) noexcept {
    double w = wrap_two_pi(a);
    if (w > kPi) w -= kTwoPi;
    return w;
}

}  // namespace vawt
