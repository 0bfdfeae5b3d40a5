#pragma once

#include <string>
#include <vector>

#include "vawt/vec2.hpp"

namespace vawt {

/// Azimuth in degrees for a sample, in [0, 360). Angles within 1e-9 degrees below 360 are
/// reported as 0 so that 15-digit output never prints 360.
inline double sample_azimuth_deg(double azimuth_rad) noexcept {
    const double deg = rad_to_deg(wrap_two_pi(azimuth_rad));
    return deg >= 360.0 - 1e-9 ? 0.0 : deg;
}

struct ForceSample {
    int rev = 1;               // 1-based revolution
    double azimuth_deg = 0.0;  // [0, 360)
    int blade = 0;
    double fn_per_span = 0.0;  // N/m
    double fn_total = 0.0;     // N, fn_per_span * blade_length (2D strip estimate)
};

/// Per-blade normal force versus azimuth, sorted by (revolution, step, blade).
struct ForceSeries {
    std::string scenario_hash;
    std::string model;  // "vortex", "alm" or "external"
    std::string label;  // free text for legends, e.g. the source file stem
    double tip_speed_ratio = 0.0;
    int steps_per_rev = 0;
    int blade_count = 0;
    std::vector<ForceSample> samples;

    int last_revolution() const noexcept { return samples.empty() ? 0 : samples.back().rev; }
};

}  // namespace vawt
