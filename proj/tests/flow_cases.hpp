#pragma once
// Analytic flow fields shared by the unit and acceptance tests.

#include <cmath>
#include <functional>

#include "vawt/alm2d.hpp"

namespace flow_cases {

using vawt::Vec2;
using vawt::alm2d::FlowGrid;
using vawt::alm2d::FlowState;

// Samples an analytic velocity field onto every stored face.
inline FlowState sample(const FlowGrid& g, const std::function<Vec2(Vec2)>& f) {
    FlowState s = FlowState::uniform(g, {});
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) s.u(i, j) = f(g.u_face(i, j)).x;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s.v(i, j) = f(g.v_face(i, j)).y;
    return s;
}

inline FlowGrid periodic_box(int n, double length) {
    FlowGrid g;
    g.nx = g.ny = n;
    g.dx = g.dy = length / n;
    g.boundary = vawt::alm2d::BoundarySpec::periodic();
    return g;
}

inline FlowGrid channel(int nx, int ny, double h, double inflow) {
    FlowGrid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = g.dy = h;
    g.origin = {-0.5 * nx * h, -0.5 * ny * h};
    g.boundary.inflow_velocity = {inflow, 0.0};
    return g;
}

// Decaying Taylor-Green vortex on [0, 2 pi]^2.
inline Vec2 taylor_green(Vec2 x, double nu, double t) {
    const double decay = std::exp(-2.0 * nu * t);
    return {std::sin(x.x) * std::cos(x.y) * decay, -std::cos(x.x) * std::sin(x.y) * decay};
}

// L2 face error of the solver against the analytic vortex at t_end.
inline double taylor_green_error(int n, double nu, double t_end, double* max_divergence = nullptr) {
    using namespace vawt::alm2d;
    const FlowGrid g = periodic_box(n, 2.0 * M_PI);
    SolverParams p;
    p.nu = nu;
    p.c_s = 0.0;
    p.rho = 1.0;
    Solver solver(g, p);
    FlowState s = sample(g, [&](Vec2 x) { return taylor_green(x, nu, 0.0); });
    const int steps = static_cast<int>(std::ceil(t_end / (0.9 * solver.stable_dt(s))));
    const double dt = t_end / steps;
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
        solver.advance(s, dt);
        worst = std::max(worst, s.last_divergence);
    }
    if (max_divergence) *max_divergence = worst;
    double err2 = 0.0;
    int count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double du = s.u(i, j) - taylor_green(g.u_face(i, j), nu, t_end).x;
            const double dv = s.v(i, j) - taylor_green(g.v_face(i, j), nu, t_end).y;
            err2 += du * du + dv * dv;
            count += 2;
        }
    return std::sqrt(err2 / count);
}

}  // namespace flow_cases
