#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "vawt/errors.hpp"
#include "vawt/turbine.hpp"

using namespace vawt;

namespace {

OperatingPoint op_rpm(double rpm, double u_inf) {
    OperatingPoint op;
    op.omega = rpm_to_rad_per_s(rpm);
    op.u_inf = u_inf;
    return op;
}

}  // namespace

TEST_CASE("tip speed ratio at the measured operating points") {
    const TurbineGeometry geom;
    CHECK(std::abs(rpm_to_rad_per_s(64.81) - 6.787) < 1e-3);
    CHECK(std::abs(tip_speed_ratio(op_rpm(64.81, 6.39), geom) - 3.44) <= 0.01);
    CHECK(std::abs(tip_speed_ratio(op_rpm(65.05, 5.39), geom) - 4.09) <= 0.01);
    CHECK(std::abs(tip_speed_ratio(op_rpm(49.89, 6.64), geom) - 2.55) <= 0.01);
    CHECK(tip_speed_ratio(op_rpm(0.0, 7.0), geom) == 0.0);
}

TEST_CASE("tip speed ratio rejects zero free stream") {
    OperatingPoint op = op_rpm(60.0, 0.0);
    CHECK_THROWS_AS(tip_speed_ratio(op, TurbineGeometry{}), std::domain_error);
}

TEST_CASE("tip speed ratio is invariant under joint scaling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.1, 50.0);
    const TurbineGeometry geom;
    for (int k = 0; k < 100; ++k) {
        OperatingPoint op{dist(rng), dist(rng), 1.2};
        const double scale = dist(rng);
        OperatingPoint scaled{op.omega * scale, op.u_inf * scale, 1.2};
        CHECK(tip_speed_ratio(scaled, geom) == doctest::Approx(tip_speed_ratio(op, geom)).epsilon(1e-14));
    }
}

TEST_CASE("blade state kinematics") {
    const TurbineGeometry geom;
    const OperatingPoint op = op_rpm(64.81, 6.39);

    SUBCASE("blade 0 at t = 0 sits upwind") {
        const BladeState s = blade_state(geom, op, 0.0, 0);
        CHECK(s.azimuth == 0.0);
        CHECK(s.position.x == doctest::Approx(-geom.radius));
        CHECK(s.position.y == doctest::Approx(0.0));
        CHECK(norm(s.velocity) == doctest::Approx(op.omega * geom.radius));
        // Clockwise seen from above: moving toward +y at the upwind point.
        CHECK(s.velocity.y > 0.0);
    }
    SUBCASE("blades are equally spaced") {
        CHECK(blade_state(geom, op, 0.0, 1).azimuth == doctest::Approx(kTwoPi / 3.0));
        CHECK(blade_state(geom, op, 0.0, 2).azimuth == doctest::Approx(2.0 * kTwoPi / 3.0));
    }
    SUBCASE("one period later the state repeats") {
        const double period = kTwoPi / op.omega;
        for (int b = 0; b < 3; ++b) {
            const BladeState a = blade_state(geom, op, 0.3, b);
            const BladeState c = blade_state(geom, op, 0.3 + 5.0 * period, b);
            CHECK(std::abs(wrap_pi(a.azimuth - c.azimuth)) < 1e-12);
            CHECK(norm(a.position - c.position) < 1e-11);
        }
    }
    SUBCASE("chord is pitched outward by the pitch angle") {
        const BladeState s = blade_state(geom, op, 0.7, 0);
        const Vec2 tangent = (1.0 / norm(s.velocity)) * s.velocity;
        const Vec2 radial = (1.0 / norm(s.position)) * s.position;
        CHECK(norm(s.chord_direction) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(dot(s.chord_direction, tangent) == doctest::Approx(std::cos(geom.pitch_angle)));
        CHECK(dot(s.chord_direction, radial) == doctest::Approx(std::sin(geom.pitch_angle)));
        CHECK(dot(s.outward_normal(), radial) > 0.0);
    }
    SUBCASE("out of range blade index") {
        CHECK_THROWS_AS(blade_state(geom, op, 0.0, 3), std::invalid_argument);
        CHECK_THROWS_AS(blade_state(geom, op, 0.0, -1), std::invalid_argument);
    }
}

TEST_CASE("blade state invariants hold for random times") {
    const TurbineGeometry geom;
    const OperatingPoint op = op_rpm(49.89, 6.64);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> time(0.0, 500.0);
    for (int k = 0; k < 500; ++k) {
        const BladeState s = blade_state(geom, op, time(rng), k % 3);
        const double scale = norm(s.position) * norm(s.velocity);
        CHECK(std::abs(dot(s.position, s.velocity)) <= 1e-12 * scale);
        CHECK(norm(s.position) == doctest::Approx(geom.radius).epsilon(1e-13));
        CHECK(s.azimuth >= 0.0);
        CHECK(s.azimuth < kTwoPi);
    }
}

TEST_CASE("azimuth advances by omega*dt per step") {
    const TurbineGeometry geom;
    const OperatingPoint op = op_rpm(65.05, 5.39);
    const int steps = 72;
    const double dt = kTwoPi / (op.omega * steps);
    for (int n = 0; n <= 10 * steps; ++n) {
        const double expected = wrap_two_pi(op.omega * dt * n);
        const double got = blade_state(geom, op, n * dt, 0).azimuth;
        CHECK(std::abs(wrap_pi(got - expected)) < 1e-12);
    }
}

TEST_CASE("chord along the span") {
    const TurbineGeometry geom;
    CHECK(chord_at_span(geom, geom.blade_length / 2) == doctest::Approx(0.25));
    CHECK(chord_at_span(geom, 0.0) == doctest::Approx(0.15));
    // Linear interpolation halfway along the 1 m taper.
    CHECK(chord_at_span(geom, 0.5) == doctest::Approx(0.20));
    CHECK(chord_at_span(geom, 1.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(chord_at_span(geom, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(chord_at_span(geom, 5.1), std::invalid_argument);
}

TEST_CASE("geometry validation") {
    TurbineGeometry geom;
    CHECK_NOTHROW(geom.validate());
    // Listed swept area (32 m^2) versus 2 r L = 32.4 m^2: 1.25 % apart, inside the 2 % band.
    const double strip = 2.0 * geom.radius * geom.blade_length;
    CHECK(strip == doctest::Approx(32.4));
    CHECK(std::abs(geom.swept_area - strip) / geom.swept_area == doctest::Approx(0.0125));

    TurbineGeometry bad = geom;
    bad.swept_area = 30.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = geom;
    bad.blade_count = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = geom;
    bad.tip_chord = 0.3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = geom;
    bad.taper_length = 3.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
