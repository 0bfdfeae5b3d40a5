#pragma once

#include <cmath>
#include <span>

#include "vawt/vec2.hpp"

namespace vawt {

struct PointVortex {
    Vec2 position;
    double gamma = 0.0;        // m^2/s, counter-clockwise positive
    double core_radius = 0.1;  // m
};

inline constexpr double kInvTwoPi = 1.0 / kTwoPi;

/// Velocity induced at `target` by a Lamb-Oseen regularized vortex.
///
/// u = gamma/(2 pi) * (-r_y, r_x)/|r|^2 * (1 - exp(-|r|^2/core^2)), r = target - source.
/// Returns zero at zero separation.
inline Vec2 vortex_kernel(const Vec2& target, const Vec2& source, double gamma,
                          double core_radius) noexcept {
    const Vec2 r = target - source;
    const double r2 = norm2(r);
    if (r2 == 0.0) return {};
    const double factor =
        gamma * kInvTwoPi * (-std::expm1(-r2 / (core_radius * core_radius))) / r2;
    return {-r.y * factor, r.x * factor};
}

/// Direct O(N) sum of all vortex contributions at one point (no free stream).
inline Vec2 direct_sum(std::span<const PointVortex> vortices, const Vec2& target) noexcept {
    Vec2 u;
    for (const auto& v : vortices) u += vortex_kernel(target, v.position, v.gamma, v.core_radius);
    return u;
}

}  // namespace vawt
