#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flow_cases.hpp"
#include "vawt/alm2d.hpp"
#include "vawt/errors.hpp"
#include "vawt/harness.hpp"

using namespace vawt;
using namespace vawt::alm2d;
using flow_cases::sample;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k)
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

// Compact rotor domain for quick runs at the minimum resolution.
AlmModel small_model(double rpm, double u_inf, const PolarTable& polar) {
    AlmModel m;
    m.operating.omega = rpm_to_rad_per_s(rpm);
    m.operating.u_inf = u_inf;
    m.polar = &polar;
    m.params.domain_length_radii = 8.0;
    m.params.domain_width_radii = 6.0;
    m.params.rotor_x_radii = 3.0;
    return m;
}

}  // namespace

TEST_CASE("grid validation") {
    FlowGrid g = flow_cases::channel(8, 8, 0.1, 1.0);
    CHECK_NOTHROW(g.validate());
    g.nx = 3;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = flow_cases::channel(8, 8, 0.1, 1.0);
    g.dx = 0.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = flow_cases::channel(8, 8, 0.1, 1.0);
    g.boundary.right = Side::Periodic;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    CHECK(g.filter_width() == doctest::Approx(0.1));
}

TEST_CASE("Smagorinsky viscosity on analytic fields") {
    const FlowGrid g = flow_cases::channel(24, 16, 0.05, 1.0);
    const double c_s = 0.17;
    const double scale = std::pow(c_s * g.filter_width(), 2);

    SUBCASE("uniform flow has no eddy viscosity") {
        const Field nu = smagorinsky(sample(g, [](Vec2) { return Vec2{3.0, -1.0}; }), g, c_s);
        CHECK(nu.max_abs() == 0.0);
    }
    SUBCASE("pure shear gives (c_s Delta)^2 |s|") {
        const double s = -2.5;
        const Field nu = smagorinsky(sample(g, [&](Vec2 x) { return Vec2{s * x.y, 0.0}; }), g, c_s);
        const double expect = scale * std::abs(s);
        for (double v : nu.values()) CHECK(std::abs(v - expect) <= 1e-12 * expect);
    }
    SUBCASE("rigid rotation has no strain") {
        const double omega = 3.0;
        auto rot = [&](Vec2 x) { return Vec2{-omega * x.y, omega * x.x}; };
        const Field nu = smagorinsky(sample(g, rot), g, c_s);
        CHECK(nu.max_abs() <= scale * omega * g.dx * g.dx);
    }
    SUBCASE("uniform translation leaves the viscosity unchanged") {
        auto f = [](Vec2 x) { return Vec2{std::sin(2 * x.x) * std::cos(x.y), std::cos(3 * x.y) + x.x * x.y}; };
        const Field a = smagorinsky(sample(g, f), g, c_s);
        const Field b = smagorinsky(sample(g, [&](Vec2 x) { return f(x) + Vec2{7.0, -2.0}; }), g, c_s);
        CHECK(max_abs_diff(a, b) <= 1e-12 * a.max_abs());
        for (double v : a.values()) CHECK(v >= 0.0);
    }
    SUBCASE("negative coefficient is rejected") {
        CHECK_THROWS_AS(smagorinsky(FlowState::uniform(g, {}), g, -0.1), std::invalid_argument);
    }
}

TEST_CASE("vorticity diagnostic") {
    const FlowGrid g = flow_cases::channel(20, 20, 0.1, 1.0);
    SUBCASE("rigid rotation has uniform vorticity 2 Omega") {
        const Field w = curl(sample(g, [](Vec2 x) { return Vec2{-1.5 * x.y, 1.5 * x.x}; }), g);
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 1; i < g.nx - 1; ++i) CHECK(w(i, j) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("uniform flow is irrotational") {
        CHECK(curl(sample(g, [](Vec2) { return Vec2{2.0, 1.0}; }), g).max_abs() == 0.0);
    }
    SUBCASE("shear wave converges at second order") {
        auto error_at = [](int n) {
            const FlowGrid gp = flow_cases::periodic_box(n, 2.0 * M_PI);
            const Field w = curl(sample(gp, [](Vec2 x) { return Vec2{std::sin(x.y), 0.0}; }), gp);
            double e = 0.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    e = std::max(e, std::abs(w(i, j) + std::cos(gp.cell_center(i, j).y)));
            return e;
        };
        const double e1 = error_at(32), e2 = error_at(64);
        CHECK(e1 <= 0.01);
        CHECK(std::log2(e1 / e2) >= 1.9);
    }
}

TEST_CASE("actuator force projection") {
    const FlowGrid g = flow_cases::channel(80, 60, 0.05, 1.0);
    const double eps = 2.0 * g.dx;

    SUBCASE("integral equals the reaction force") {
        for (double e : {2.0 * g.dx, 2.5 * g.dx, 4.0 * g.dx}) {
            const ActuatorSource src{{0.013, -0.21}, {35.0, -12.0}, e};
            const Vec2 total = integrate(project_forces({&src, 1}, g), g);
            CHECK(std::abs(total.x + 35.0) <= 1e-3 * 35.0);
            CHECK(std::abs(total.y - 12.0) <= 1e-3 * 12.0);
        }
    }
    SUBCASE("zero force gives a zero field") {
        const ActuatorSource src{{0.0, 0.0}, {}, eps};
        const ForceField f = project_forces({&src, 1}, g);
        CHECK(f.fx.max_abs() == 0.0);
        CHECK(f.fy.max_abs() == 0.0);
    }
    SUBCASE("mirror-symmetric sources give a mirror-symmetric field") {
        const std::vector<ActuatorSource> src{{{0.3, 0.4}, {5.0, 2.0}, eps}, {{0.3, -0.4}, {5.0, -2.0}, eps}};
        const ForceField f = project_forces(src, g);
        const double tol = 1e-12 * std::max(f.fx.max_abs(), f.fy.max_abs());
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) CHECK(std::abs(f.fx(i, j) - f.fx(i, g.ny - 1 - j)) <= tol);
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) CHECK(std::abs(f.fy(i, j) + f.fy(i, g.ny - j)) <= tol);
    }
    SUBCASE("projection is linear") {
        const ActuatorSource a{{0.1, 0.2}, {3.0, -1.0}, eps};
        const ActuatorSource b{{0.1, 0.2}, {-0.5, 4.0}, eps};
        const ActuatorSource ab{{0.1, 0.2}, {2.5, 3.0}, eps};
        const ForceField fa = project_forces({&a, 1}, g), fb = project_forces({&b, 1}, g),
                         fab = project_forces({&ab, 1}, g);
        const double tol = 1e-12 * fab.fy.max_abs();
        for (std::size_t k = 0; k < fab.fx.values().size(); ++k)
            CHECK(std::abs(fab.fx.values()[k] - fa.fx.values()[k] - fb.fx.values()[k]) <= tol);
        for (std::size_t k = 0; k < fab.fy.values().size(); ++k)
            CHECK(std::abs(fab.fy.values()[k] - fa.fy.values()[k] - fb.fy.values()[k]) <= tol);
    }
    SUBCASE("resolution and margin rules") {
        const ActuatorSource narrow{{0.0, 0.0}, {1.0, 0.0}, 1.5 * g.dx};
        CHECK_THROWS_AS(project_forces({&narrow, 1}, g), ConfigError);
        const ActuatorSource edge{{g.origin.x + 2.5 * eps, 0.0}, {1.0, 0.0}, eps};
        CHECK_THROWS_AS(project_forces({&edge, 1}, g), ConfigError);
    }
}

TEST_CASE("uniform inflow is an exact steady state") {
    const FlowGrid g = flow_cases::channel(40, 20, 0.1, 2.0);
    Solver solver(g, {});
    FlowState s = FlowState::uniform(g, {2.0, 0.0});
    const double dt = 0.9 * solver.stable_dt(s);
    for (int k = 0; k < 20; ++k) {
        solver.advance(s, dt);
        for (double u : s.u.values()) CHECK(std::abs(u - 2.0) <= 1e-12 * (k + 1));
        CHECK(s.v.max_abs() <= 1e-12 * (k + 1));
        CHECK(s.last_divergence <= 1e-8);
    }
}

TEST_CASE("stability limits are enforced") {
    const FlowGrid g = flow_cases::channel(20, 20, 0.1, 5.0);
    Solver solver(g, {});
    FlowState s = FlowState::uniform(g, {5.0, 0.0});
    const double limit = solver.stable_dt(s);
    CHECK(limit == doctest::Approx(0.5 * 0.1 / 5.0));
    try {
        solver.advance(s, 2.0 * limit);
        FAIL("expected a step error");
    } catch (const StepError& e) {
        CHECK(e.suggested_dt() == doctest::Approx(limit));
    }
    CHECK_THROWS_AS(solver.advance(s, 0.0), std::invalid_argument);
}

TEST_CASE("Taylor-Green vortex decays at the analytic rate") {
    double div = 1.0;
    const double e16 = flow_cases::taylor_green_error(16, 0.01, 0.25, &div);
    const double e32 = flow_cases::taylor_green_error(32, 0.01, 0.25);
    MESSAGE("taylor-green errors " << e16 << " " << e32);
    CHECK(std::log2(e16 / e32) >= 1.8);
    CHECK(div <= 1e-8);
}

TEST_CASE("kinetic energy never grows without forcing") {
    const FlowGrid g = flow_cases::periodic_box(32, 2.0 * M_PI);
    SolverParams p;
    p.nu = 0.005;
    Solver solver(g, p);
    FlowState s = sample(g, [](Vec2 x) {
        return flow_cases::taylor_green(x, 0.0, 0.0) + Vec2{0.3 * std::sin(2 * x.y), 0.2 * std::cos(3 * x.x)};
    });
    solver.project(s, 1.0);
    double e = kinetic_energy(s, g);
    for (int k = 0; k < 60; ++k) {
        solver.advance(s, 0.9 * solver.stable_dt(s));
        const double e_next = kinetic_energy(s, g);
        CHECK(e_next <= e);
        e = e_next;
    }
}

TEST_CASE("steady source accelerates a periodic box by Newton's second law") {
    const FlowGrid g = flow_cases::periodic_box(48, 4.8);
    SolverParams p;
    p.nu = 1e-3;
    p.rho = 1.2;
    Solver solver(g, p);
    FlowState s = FlowState::uniform(g, {0.5, 0.0});
    const ActuatorSource src{{2.4, 2.4}, {-0.6, 0.3}, 0.25};
    const ForceField f = project_forces({&src, 1}, g);
    const Vec2 applied = integrate(f, g);
    double t = 0.0;
    const Vec2 m0 = mean_velocity(s, g);
    for (int k = 0; k < 100; ++k) {
        const double dt = 0.9 * solver.stable_dt(s);
        solver.advance(s, dt, &f);
        t += dt;
    }
    const Vec2 accel = (1.0 / t) * (mean_velocity(s, g) - m0);
    const double area = g.width() * g.height();
    CHECK(std::abs(p.rho * area * accel.x - applied.x) <= 0.01 * std::abs(applied.x));
    CHECK(std::abs(p.rho * area * accel.y - applied.y) <= 0.01 * std::abs(applied.y));
}

TEST_CASE("bilinear sampling is exact for linear fields") {
    const FlowGrid g = flow_cases::channel(16, 12, 0.1, 1.0);
    auto f = [](Vec2 x) { return Vec2{1.0 + 0.5 * x.x - 0.25 * x.y, -0.3 + 0.2 * x.x + 0.7 * x.y}; };
    const FlowState s = sample(g, f);
    for (Vec2 x : {Vec2{0.013, 0.2}, Vec2{-0.33, -0.41}, Vec2{0.5, 0.0}}) {
        CHECK(norm(sample_velocity(s, g, x) - f(x)) <= 1e-12);
    }
}

TEST_CASE("ALM runs and reports loads") {
    const PolarTable polar = bundled_naca0021();
    SUBCASE("resolution preconditions") {
        AlmModel m = small_model(64.81, 6.39, polar);
        m.params.cells_per_radius = 15.0;
        CHECK_THROWS_AS(run_alm(m, 36, 1), ConfigError);
        m = small_model(64.81, 6.39, polar);
        m.params.epsilon_cells = 1.5;
        CHECK_THROWS_AS(run_alm(m, 36, 1), ConfigError);
        m = small_model(64.81, 6.39, polar);
        CHECK_THROWS_AS(run_alm(m, 36, 0), ConfigError);
        m.operating.omega = 0.0;
        CHECK_THROWS_AS(run_alm(m, 36, 1), ConfigError);
    }
    SUBCASE("parked, feathered rotor reaches a steady drag state") {
        AlmModel m = small_model(0.0, 6.0, polar);
        m.geometry.pitch_angle = 0.0;
        std::vector<double> fn;
        double worst_div = 0.0;
        const ForceSeries fs = run_alm(m, 36, 1, 0.05, [&](const FlowState& s, const FlowGrid&, auto) {
            worst_div = std::max(worst_div, s.peak_divergence);
        });
        CHECK(fs.samples.size() == 36u * 3u);
        CHECK(worst_div <= 1e-8);
        // Blade 0 over the last quarter of the run.
        double lo = 1e300, hi = -1e300, peak = 0.0;
        for (const auto& s : fs.samples) peak = std::max(peak, std::abs(s.fn_per_span));
        for (std::size_t k = 27 * 3; k < fs.samples.size(); k += 3) {
            lo = std::min(lo, fs.samples[k].fn_per_span);
            hi = std::max(hi, fs.samples[k].fn_per_span);
        }
        CHECK(hi - lo <= 0.02 * std::max(peak, 1.0));
    }
}

TEST_CASE("wake deficit is positive and grows with tip speed ratio") {
    const PolarTable polar = bundled_naca0021();
    auto deficit = [&](double rpm, double u_inf) {
        AlmModel m = small_model(rpm, u_inf, polar);
        double d = 0.0;
        run_alm(m, 36, 2, 0.0, [&](const FlowState& s, const FlowGrid& g, auto) {
            d = wake_deficit(s, g, 2.0 * m.geometry.radius, 0.0, m.geometry.radius, u_inf);
        });
        return d;
    };
    const double d255 = deficit(49.89, 6.64);
    const double d344 = deficit(64.81, 6.39);
    MESSAGE("wake deficits " << d255 << " " << d344);
    CHECK(d255 > 0.0);
    CHECK(d344 > d255);
}

TEST_CASE("snapshots are written as CSV") {
    const FlowGrid g = flow_cases::channel(6, 4, 0.5, 1.0);
    const FlowState s = FlowState::uniform(g, {1.0, 0.0});
    const auto path = std::filesystem::temp_directory_path() / "vawt_snapshot_test.csv";
    write_snapshot(s, g, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,u,v,p,omega");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 24);
    std::filesystem::remove(path);
}
