#include "vawt/turbine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vawt/errors.hpp"

namespace vawt {

void TurbineGeometry::validate() const {
    if (!(radius > 0.0)) throw ConfigError("radius", "must be positive");
    if (blade_count < 1) throw ConfigError("blade_count", "must be at least 1");
    if (!(blade_length > 0.0)) throw ConfigError("blade_length", "must be positive");
    if (!(tip_chord > 0.0)) throw ConfigError("tip_chord", "must be positive");
    if (!(tip_chord <= chord_mid)) throw ConfigError("chord_mid", "must be >= tip_chord");
    if (!(taper_length >= 0.0 && taper_length <= 0.5 * blade_length))
        throw ConfigError("taper_length", "must lie in [0, blade_length/2]");
    if (!std::isfinite(pitch_angle)) throw ConfigError("pitch_angle", "must be finite");
    if (!(swept_area > 0.0)) throw ConfigError("swept_area", "must be positive");
    const double strip = 2.0 * radius * blade_length;
    if (std::abs(swept_area - strip) / swept_area > kSweptAreaTolerance)
        throw ConfigError("swept_area", "differs from 2*radius*blade_length = " +
                                            std::to_string(strip) + " by more than 2%");
}

void OperatingPoint::validate() const {
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("omega", "must be >= 0");
    if (!(u_inf > 0.0) || !std::isfinite(u_inf)) throw ConfigError("u_inf", "must be positive");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho", "must be positive");
}

Vec2 BladeState::outward_normal() const noexcept {
    Vec2 n = perp(chord_direction);
    if (dot(n, position) < 0.0) n = -n;
    return n;
}

double tip_speed_ratio(const OperatingPoint& op, const TurbineGeometry& geom) {
    if (!(op.u_inf > 0.0)) throw std::domain_error("tip_speed_ratio: u_inf must be positive");
    return op.omega * geom.radius / op.u_inf;
}

BladeState blade_state_at(const TurbineGeometry& geom, const OperatingPoint& op, double azimuth,
                          int blade_index) {
    if (blade_index < 0 || blade_index >= geom.blade_count)
        throw std::invalid_argument("blade_state: blade index " + std::to_string(blade_index) +
                                    " out of range");
    BladeState s;
    s.blade_index = blade_index;
    s.azimuth = wrap_two_pi(azimuth + blade_index * kTwoPi / geom.blade_count);
    const double c = std::cos(s.azimuth);
    const double sn = std::sin(s.azimuth);
    const Vec2 radial{-c, sn};   // outward unit vector
    const Vec2 tangent{sn, c};   // direction of motion
    s.position = geom.radius * radial;
    s.velocity = (op.omega * geom.radius) * tangent;
    const double cp = std::cos(geom.pitch_angle);
    const double sp = std::sin(geom.pitch_angle);
    s.chord_direction = cp * tangent + sp * radial;
    return s;
}

BladeState blade_state(const TurbineGeometry& geom, const OperatingPoint& op, double t,
                       int blade_index, double azimuth_offset) {
    return blade_state_at(geom, op, azimuth_offset + op.omega * t, blade_index);
}

double chord_at_span(const TurbineGeometry& geom, double s) {
    if (!(s >= 0.0 && s <= geom.blade_length))
        throw std::invalid_argument("chord_at_span: s outside [0, blade_length]");
    if (s >= geom.taper_length || geom.taper_length == 0.0) return geom.chord_mid;
    return geom.tip_chord + (geom.chord_mid - geom.tip_chord) * (s / geom.taper_length);
}

}  // namespace vawt
