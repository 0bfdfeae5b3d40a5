#pragma once

#include "vawt/vec2.hpp"

namespace vawt {

/// H-rotor geometry. Defaults describe the 12 kW three-bladed test turbine.
struct TurbineGeometry {
    double radius = 3.24;          // m
    int blade_count = 3;
    double blade_length = 5.0;     // m
    double chord_mid = 0.25;       // m
    double tip_chord = 0.15;       // m
    double taper_length = 1.0;     // m, linear taper measured from the tip
    double pitch_angle = deg_to_rad(2.0);  // rad, positive = leading edge outward
    double hub_height = 6.0;       // m
    double swept_area = 32.0;      // m^2

    /// Relative tolerance accepted between swept_area and 2*radius*blade_length.
    static constexpr double kSweptAreaTolerance = 0.02;

    /// Throws ConfigError naming the first violated field.
    void validate() const;
};

struct OperatingPoint {
    double omega = 0.0;  // rad/s
    double u_inf = 1.0;  // m/s
    double rho = 1.225;  // kg/m^3

    void validate() const;
};

/// Kinematic state of one blade at one instant.
///
/// The rotor spins clockwise seen from above with the free stream along +x.
/// Azimuth 0 is the most upwind point (-radius, 0) and grows with rotation.
/// `chord_direction` points from trailing edge to leading edge.
struct BladeState {
    int blade_index = 0;
    double azimuth = 0.0;  // rad, [0, 2*pi)
    Vec2 position;
    Vec2 velocity;
    Vec2 chord_direction;

    /// Unit normal to the chord on the outward (away from the axis) side.
    Vec2 outward_normal() const noexcept;
};

/// omega * radius / u_inf. Throws std::domain_error when u_inf is not positive.
double tip_speed_ratio(const OperatingPoint& op, const TurbineGeometry& geom);

/// Rigid-rotation state of blade `blade_index` at time `t`.
/// `azimuth_offset` is the blade-0 azimuth at t = 0.
BladeState blade_state(const TurbineGeometry& geom, const OperatingPoint& op, double t,
                       int blade_index, double azimuth_offset = 0.0);

/// State for an explicit azimuth (used when stepping with exact Omega*dt increments).
BladeState blade_state_at(const TurbineGeometry& geom, const OperatingPoint& op, double azimuth,
                          int blade_index);

/// Chord at distance `s` from the blade tip: linear from tip_chord to chord_mid over
/// taper_length, constant beyond. Throws std::invalid_argument when s is outside the blade.
double chord_at_span(const TurbineGeometry& geom, double s);

}  // namespace vawt
