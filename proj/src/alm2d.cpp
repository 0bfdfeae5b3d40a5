#include "vawt/alm2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "vawt/errors.hpp"

namespace vawt::alm2d {

namespace {

int wrap_index(int i, int n) noexcept {
    i %= n;
    return i < 0 ? i + n : i;
}

// Ghost-aware accessors. Indices may lie one layer outside the stored range.
double u_at(const Field& u, const FlowGrid& g, int i, int j) noexcept {
    if (j < 0 || j >= g.ny) j = g.periodic_y() ? wrap_index(j, g.ny) : std::clamp(j, 0, g.ny - 1);
    if (g.periodic_x()) {
        i = wrap_index(i, g.nx);
    } else {
        i = std::clamp(i, 0, g.nx);
    }
    return u(i, j);
}

double v_at(const Field& v, const FlowGrid& g, int i, int j) noexcept {
    if (g.periodic_y()) {
        j = wrap_index(j, g.ny);
    } else if (j < 0) {
        return -v(std::clamp(i, 0, g.nx - 1), std::min(-j, g.ny));
    } else if (j > g.ny) {
        return -v(std::clamp(i, 0, g.nx - 1), std::max(2 * g.ny - j, 0));
    }
    if (i < 0) {
        if (g.periodic_x()) return v(wrap_index(i, g.nx), j);
        if (g.boundary.left == Side::Inflow) return 2.0 * g.boundary.inflow_velocity.y - v(0, j);
        return v(0, j);
    }
    if (i >= g.nx) {
        if (g.periodic_x()) return v(wrap_index(i, g.nx), j);
        return v(g.nx - 1, j);
    }
    return v(i, j);
}

double cell_at(const Field& c, const FlowGrid& g, int i, int j) noexcept {
    i = g.periodic_x() ? wrap_index(i, g.nx) : std::clamp(i, 0, g.nx - 1);
    j = g.periodic_y() ? wrap_index(j, g.ny) : std::clamp(j, 0, g.ny - 1);
    return c(i, j);
}

int u_first(const FlowGrid& g) noexcept { return g.periodic_x() ? 0 : 1; }
int u_last(const FlowGrid& g) noexcept {
    if (g.periodic_x()) return g.nx - 1;
    return g.boundary.right == Side::Outflow ? g.nx : g.nx - 1;
}
int v_first(const FlowGrid& g) noexcept { return g.periodic_y() ? 0 : 1; }
int v_last(const FlowGrid& g) noexcept { return g.ny - 1; }

struct Gradient {
    double dudx, dudy, dvdx, dvdy;
};

// Cell-centered velocity gradient. Tangential derivatives are central in the interior and
// one-sided at non-periodic walls, so linear fields are differentiated exactly everywhere.
Gradient cell_gradient(const FlowState& s, const FlowGrid& g, int i, int j) noexcept {
    Gradient d{};
    d.dudx = (s.u(i + 1, j) - s.u(i, j)) / g.dx;
    d.dvdy = (s.v(i, j + 1) - s.v(i, j)) / g.dy;

    auto u_center = [&](int ii, int jj) {
        jj = g.periodic_y() ? wrap_index(jj, g.ny) : jj;
        ii = g.periodic_x() ? wrap_index(ii, g.nx) : ii;
        return 0.5 * (s.u(ii, jj) + s.u(ii + 1, jj));
    };
    auto v_center = [&](int ii, int jj) {
        jj = g.periodic_y() ? wrap_index(jj, g.ny) : jj;
        ii = g.periodic_x() ? wrap_index(ii, g.nx) : ii;
        return 0.5 * (s.v(ii, jj) + s.v(ii, jj + 1));
    };

    if (g.periodic_y() || (j > 0 && j < g.ny - 1))
        d.dudy = (u_center(i, j + 1) - u_center(i, j - 1)) / (2.0 * g.dy);
    else if (j == 0)
        d.dudy = (u_center(i, 1) - u_center(i, 0)) / g.dy;
    else
        d.dudy = (u_center(i, j) - u_center(i, j - 1)) / g.dy;

    if (g.periodic_x() || (i > 0 && i < g.nx - 1))
        d.dvdx = (v_center(i + 1, j) - v_center(i - 1, j)) / (2.0 * g.dx);
    else if (i == 0)
        d.dvdx = (v_center(1, j) - v_center(0, j)) / g.dx;
    else
        d.dvdx = (v_center(i, j) - v_center(i - 1, j)) / g.dx;
    return d;
}

AxisBoundary x_axis_of(const FlowGrid& g) {
    if (g.periodic_x()) return AxisBoundary::Periodic;
    return g.boundary.right == Side::Outflow ? AxisBoundary::NeumannDirichlet
                                             : AxisBoundary::NeumannNeumann;
}

AxisBoundary y_axis_of(const FlowGrid& g) {
    return g.periodic_y() ? AxisBoundary::Periodic : AxisBoundary::NeumannNeumann;
}

}  // namespace

void FlowGrid::validate() const {
    if (nx < 4 || ny < 4) throw ConfigError("grid", "nx and ny must be >= 4");
    if (!(dx > 0.0 && dy > 0.0)) throw ConfigError("grid", "dx and dy must be positive");
    const auto& b = boundary;
    if ((b.left == Side::Periodic) != (b.right == Side::Periodic))
        throw ConfigError("boundary", "periodic x sides must be paired");
    if ((b.bottom == Side::Periodic) != (b.top == Side::Periodic))
        throw ConfigError("boundary", "periodic y sides must be paired");
    if (b.left == Side::Outflow) throw ConfigError("boundary.left", "outflow only on the right");
    if (b.right == Side::Inflow) throw ConfigError("boundary.right", "inflow only on the left");
    if (b.bottom == Side::Inflow || b.bottom == Side::Outflow || b.top == Side::Inflow ||
        b.top == Side::Outflow)
        throw ConfigError("boundary", "bottom/top must be slip or periodic");
}

double FlowGrid::filter_width() const noexcept { return std::sqrt(dx * dy); }

double Field::max_abs() const noexcept {
    double m = 0.0;
    for (const double x : data_) m = std::max(m, std::abs(x));
    return m;
}

FlowState FlowState::uniform(const FlowGrid& grid, Vec2 velocity) {
    grid.validate();
    FlowState s;
    s.u = Field(grid.nx + 1, grid.ny, velocity.x);
    s.v = Field(grid.nx, grid.ny + 1, velocity.y);
    s.p = Field(grid.nx, grid.ny);
    s.nu_sgs = Field(grid.nx, grid.ny);
    if (!grid.periodic_y())
        for (int i = 0; i < grid.nx; ++i) s.v(i, 0) = s.v(i, grid.ny) = 0.0;
    if (grid.boundary.left == Side::Slip)
        for (int j = 0; j < grid.ny; ++j) s.u(0, j) = 0.0;
    if (grid.boundary.right == Side::Slip)
        for (int j = 0; j < grid.ny; ++j) s.u(grid.nx, j) = 0.0;
    return s;
}

ForceField ForceField::zeros(const FlowGrid& grid) {
    return {Field(grid.nx + 1, grid.ny), Field(grid.nx, grid.ny + 1)};
}

Field smagorinsky(const FlowState& state, const FlowGrid& grid, double c_s) {
    if (!(c_s >= 0.0)) throw std::invalid_argument("smagorinsky: c_s must be >= 0");
    const double length = c_s * grid.filter_width();
    const double scale = length * length;
    Field nu(grid.nx, grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Gradient d = cell_gradient(state, grid, i, j);
            const double s12 = 0.5 * (d.dudy + d.dvdx);
            const double two_ss = 2.0 * (d.dudx * d.dudx + d.dvdy * d.dvdy + 2.0 * s12 * s12);
            nu(i, j) = scale * std::sqrt(two_ss);
        }
    }
    return nu;
}

Field curl(const FlowState& state, const FlowGrid& grid) {
    Field w(grid.nx, grid.ny);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const Gradient d = cell_gradient(state, grid, i, j);
            w(i, j) = d.dvdx - d.dudy;
        }
    return w;
}

double max_divergence(const FlowState& state, const FlowGrid& grid) {
    double max_div = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double flux = (state.u(i + 1, j) - state.u(i, j)) * grid.dy +
                                (state.v(i, j + 1) - state.v(i, j)) * grid.dx;
            max_div = std::max(max_div, std::abs(flux));
        }
    const double max_flux =
        std::max(state.u.max_abs() * grid.dy, state.v.max_abs() * grid.dx);
    return max_flux > 0.0 ? max_div / max_flux : max_div;
}

ForceField project_forces(std::span<const ActuatorSource> sources, const FlowGrid& grid) {
    ForceField field = ForceField::zeros(grid);
    const double h = std::max(grid.dx, grid.dy);
    for (const auto& src : sources) {
        const double eps = src.epsilon;
        if (!(eps >= 2.0 * h * (1.0 - 1e-12)))
            throw ConfigError("epsilon", "smoothing width must be >= 2 * max(dx, dy)");
        const double margin = 3.0 * eps;
        if (src.point.x - margin < grid.origin.x || src.point.x + margin > grid.origin.x + grid.width() ||
            src.point.y - margin < grid.origin.y || src.point.y + margin > grid.origin.y + grid.height())
            throw ConfigError("actuator", "source closer than 3*epsilon to the domain boundary");
        if (src.force == Vec2{}) continue;

        const double norm_factor = 1.0 / (eps * eps * kPi);
        const double cutoff = 4.0 * eps;
        const double cutoff2 = cutoff * cutoff;
        const int i_lo = std::max(0, static_cast<int>(std::floor((src.point.x - cutoff - grid.origin.x) / grid.dx)));
        const int i_hi = std::min(grid.nx, static_cast<int>(std::ceil((src.point.x + cutoff - grid.origin.x) / grid.dx)));
        const int j_lo = std::max(0, static_cast<int>(std::floor((src.point.y - cutoff - grid.origin.y) / grid.dy)));
        const int j_hi = std::min(grid.ny, static_cast<int>(std::ceil((src.point.y + cutoff - grid.origin.y) / grid.dy)));
        for (int j = j_lo; j <= std::min(j_hi, grid.ny - 1); ++j)
            for (int i = i_lo; i <= i_hi; ++i) {
                const double r2 = norm2(grid.u_face(i, j) - src.point);
                if (r2 > cutoff2) continue;
                field.fx(i, j) -= src.force.x * norm_factor * std::exp(-r2 / (eps * eps));
            }
        for (int j = j_lo; j <= j_hi; ++j)
            for (int i = i_lo; i <= std::min(i_hi, grid.nx - 1); ++i) {
                const double r2 = norm2(grid.v_face(i, j) - src.point);
                if (r2 > cutoff2) continue;
                field.fy(i, j) -= src.force.y * norm_factor * std::exp(-r2 / (eps * eps));
            }
    }
    return field;
}

Vec2 integrate(const ForceField& field, const FlowGrid& grid) {
    Vec2 total;
    const int ui_end = grid.periodic_x() ? grid.nx - 1 : grid.nx;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= ui_end; ++i) total.x += field.fx(i, j);
    const int vj_end = grid.periodic_y() ? grid.ny - 1 : grid.ny;
    for (int j = 0; j <= vj_end; ++j)
        for (int i = 0; i < grid.nx; ++i) total.y += field.fy(i, j);
    return total * (grid.dx * grid.dy);
}

Vec2 sample_velocity(const FlowState& state, const FlowGrid& grid, const Vec2& point) {
    auto bilinear = [&](double fx, double fy, auto&& get) {
        const int i0 = static_cast<int>(std::floor(fx));
        const int j0 = static_cast<int>(std::floor(fy));
        const double wx = fx - i0;
        const double wy = fy - j0;
        return (1 - wx) * (1 - wy) * get(i0, j0) + wx * (1 - wy) * get(i0 + 1, j0) +
               (1 - wx) * wy * get(i0, j0 + 1) + wx * wy * get(i0 + 1, j0 + 1);
    };
    const double px = (point.x - grid.origin.x) / grid.dx;
    const double py = (point.y - grid.origin.y) / grid.dy;
    const double ux = std::clamp(px, 0.0, static_cast<double>(grid.nx));
    const double uy = py - 0.5;
    const double vx = px - 0.5;
    const double vy = std::clamp(py, 0.0, static_cast<double>(grid.ny));
    const double u = bilinear(ux, uy, [&](int i, int j) { return u_at(state.u, grid, i, j); });
    const double v = bilinear(vx, vy, [&](int i, int j) { return v_at(state.v, grid, i, j); });
    return {u, v};
}

Solver::Solver(FlowGrid grid, SolverParams params) : grid_(std::move(grid)), params_(params) {
    grid_.validate();
    if (!(params_.nu >= 0.0)) throw ConfigError("nu", "must be >= 0");
    if (!(params_.c_s >= 0.0)) throw ConfigError("c_s", "must be >= 0");
    if (!(params_.rho > 0.0)) throw ConfigError("rho", "must be positive");
    poisson_ = std::make_unique<PoissonSolver>(grid_.nx, grid_.ny, grid_.dx, grid_.dy,
                                               x_axis_of(grid_), y_axis_of(grid_));
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

double Solver::stable_dt(const FlowState& state) const {
    const double h = std::min(grid_.dx, grid_.dy);
    const double umax = std::max(state.u.max_abs(), state.v.max_abs());
    const Field nu_t = smagorinsky(state, grid_, params_.c_s);
    const double nu_eff = params_.nu + nu_t.max_abs();
    const double inf = std::numeric_limits<double>::infinity();
    const double dt_adv = umax > 0.0 ? params_.cfl * h / umax : inf;
    const double dt_diff = nu_eff > 0.0 ? params_.diffusion_limit * h * h / nu_eff : inf;
    return std::min(dt_adv, dt_diff);
}

void Solver::apply_boundaries(FlowState& s) const {
    const auto& g = grid_;
    if (g.periodic_x()) {
        for (int j = 0; j < g.ny; ++j) s.u(g.nx, j) = s.u(0, j);
    } else {
        const double left = g.boundary.left == Side::Inflow ? g.boundary.inflow_velocity.x : 0.0;
        for (int j = 0; j < g.ny; ++j) s.u(0, j) = left;
        if (g.boundary.right == Side::Slip)
            for (int j = 0; j < g.ny; ++j) s.u(g.nx, j) = 0.0;
    }
    if (g.periodic_y()) {
        for (int i = 0; i < g.nx; ++i) s.v(i, g.ny) = s.v(i, 0);
    } else {
        for (int i = 0; i < g.nx; ++i) s.v(i, 0) = s.v(i, g.ny) = 0.0;
    }
}

void Solver::rhs(const FlowState& s, const ForceField* forces, Field& ru, Field& rv) const {
    const auto& g = grid_;
    const double nu = params_.nu;
    const double inv_rho = 1.0 / params_.rho;
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    const double idx2 = idx * idx, idy2 = idy * idy;
    auto U = [&](int i, int j) { return u_at(s.u, g, i, j); };
    auto V = [&](int i, int j) { return v_at(s.v, g, i, j); };
    auto T = [&](int i, int j) { return cell_at(s.nu_sgs, g, i, j); };

    for (int j = 0; j < g.ny; ++j) {
        for (int i = u_first(g); i <= u_last(g); ++i) {
            const double uc = U(i, j);
            const double ue = 0.5 * (uc + U(i + 1, j));
            const double uw = 0.5 * (U(i - 1, j) + uc);
            const double un = 0.5 * (uc + U(i, j + 1));
            const double us = 0.5 * (U(i, j - 1) + uc);
            const double vn = 0.5 * (V(i - 1, j + 1) + V(i, j + 1));
            const double vs = 0.5 * (V(i - 1, j) + V(i, j));
            const double adv = (ue * ue - uw * uw) * idx + (vn * un - vs * us) * idy;

            const double nu_e = nu + T(i, j);
            const double nu_w = nu + T(i - 1, j);
            const double nu_n = nu + 0.25 * (T(i - 1, j) + T(i, j) + T(i - 1, j + 1) + T(i, j + 1));
            const double nu_s = nu + 0.25 * (T(i - 1, j - 1) + T(i, j - 1) + T(i - 1, j) + T(i, j));
            const double diff = (nu_e * (U(i + 1, j) - uc) - nu_w * (uc - U(i - 1, j))) * idx2 +
                                (nu_n * (U(i, j + 1) - uc) - nu_s * (uc - U(i, j - 1))) * idy2;
            double r = diff - adv;
            if (forces) r += forces->fx(i, j) * inv_rho;
            ru(i, j) = r;
        }
    }
    for (int j = v_first(g); j <= v_last(g); ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double vc = V(i, j);
            const double vn = 0.5 * (vc + V(i, j + 1));
            const double vs = 0.5 * (V(i, j - 1) + vc);
            const double ve = 0.5 * (vc + V(i + 1, j));
            const double vw = 0.5 * (V(i - 1, j) + vc);
            const double ue = 0.5 * (U(i + 1, j - 1) + U(i + 1, j));
            const double uw = 0.5 * (U(i, j - 1) + U(i, j));
            const double adv = (ue * ve - uw * vw) * idx + (vn * vn - vs * vs) * idy;

            const double nu_n = nu + T(i, j);
            const double nu_s = nu + T(i, j - 1);
            const double nu_e = nu + 0.25 * (T(i, j - 1) + T(i + 1, j - 1) + T(i, j) + T(i + 1, j));
            const double nu_w = nu + 0.25 * (T(i - 1, j - 1) + T(i, j - 1) + T(i - 1, j) + T(i, j));
            const double diff = (nu_e * (V(i + 1, j) - vc) - nu_w * (vc - V(i - 1, j))) * idx2 +
                                (nu_n * (V(i, j + 1) - vc) - nu_s * (vc - V(i, j - 1))) * idy2;
            double r = diff - adv;
            if (forces) r += forces->fy(i, j) * inv_rho;
            rv(i, j) = r;
        }
    }
}

void Solver::project(FlowState& s, double dt_scale) {
    const auto& g = grid_;
    apply_boundaries(s);
    std::vector<double> div(static_cast<std::size_t>(g.nx) * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            div[static_cast<std::size_t>(j) * g.nx + i] =
                (s.u(i + 1, j) - s.u(i, j)) / g.dx + (s.v(i, j + 1) - s.v(i, j)) / g.dy;

    std::vector<double> phi(div.size());
    last_poisson_ = poisson_->solve(div, phi, params_.poisson_tolerance);
    const auto P = [&](int i, int j) { return phi[static_cast<std::size_t>(j) * g.nx + i]; };
    const auto P_ghost = [&](int i, int j) {
        if (g.periodic_x()) return P(wrap_index(i, g.nx), j);
        return -P(g.nx - 1, j);  // zero pressure on the outflow face
    };

    for (int j = 0; j < g.ny; ++j)
        for (int i = u_first(g); i <= u_last(g); ++i) {
            const double east = i < g.nx ? P(i, j) : P_ghost(i, j);
            const double west = i > 0 ? P(i - 1, j) : P_ghost(i - 1, j);
            s.u(i, j) -= (east - west) / g.dx;
        }
    for (int j = v_first(g); j <= v_last(g); ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double north = P(i, j);
            const double south = j > 0 ? P(i, j - 1) : P(i, wrap_index(j - 1, g.ny));
            s.v(i, j) -= (north - south) / g.dy;
        }
    apply_boundaries(s);
    const double scale = params_.rho / dt_scale;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s.p(i, j) = scale * P(i, j);
}

void Solver::advance(FlowState& state, double dt, const ForceField* forces) {
    if (!(dt > 0.0)) throw std::invalid_argument("advance: dt must be positive");
    const auto& g = grid_;
    state.nu_sgs = smagorinsky(state, g, params_.c_s);

    const double h = std::min(g.dx, g.dy);
    const double umax = std::max(state.u.max_abs(), state.v.max_abs());
    const double nu_eff = params_.nu + state.nu_sgs.max_abs();
    const double dt_adv = umax > 0.0 ? params_.cfl * h / umax : std::numeric_limits<double>::infinity();
    const double dt_diff = nu_eff > 0.0 ? params_.diffusion_limit * h * h / nu_eff
                                        : std::numeric_limits<double>::infinity();
    if (dt > dt_adv * (1.0 + 1e-12) || dt > dt_diff * (1.0 + 1e-12)) {
        const double suggested = std::min(dt_adv, dt_diff);
        char buf[160];
        std::snprintf(buf, sizeof buf, "time step %.6g s exceeds the stability limit; use dt <= %.6g s",
                      dt, suggested);
        throw StepError(buf, suggested);
    }

    const Field u0 = state.u;
    const Field v0 = state.v;
    Field ru(g.nx + 1, g.ny), rv(g.nx, g.ny + 1);

    // SSP-RK3: stage weights (a on the old state, b on the Euler update).
    constexpr double kOld[3] = {0.0, 0.75, 1.0 / 3.0};
    constexpr double kNew[3] = {1.0, 0.25, 2.0 / 3.0};
    double max_div = 0.0;
    for (int stage = 0; stage < 3; ++stage) {
        rhs(state, forces, ru, rv);
        for (int j = 0; j < g.ny; ++j)
            for (int i = u_first(g); i <= u_last(g); ++i)
                state.u(i, j) = kOld[stage] * u0(i, j) + kNew[stage] * (state.u(i, j) + dt * ru(i, j));
        for (int j = v_first(g); j <= v_last(g); ++j)
            for (int i = 0; i < g.nx; ++i)
                state.v(i, j) = kOld[stage] * v0(i, j) + kNew[stage] * (state.v(i, j) + dt * rv(i, j));
        project(state, kNew[stage] * dt);
        max_div = std::max(max_div, max_divergence(state, g));
    }
    state.last_divergence = max_div;
    state.peak_divergence = std::max(state.peak_divergence, max_div);
    state.t += dt;
}

double kinetic_energy(const FlowState& state, const FlowGrid& grid) {
    double e = 0.0;
    const int ui_end = grid.periodic_x() ? grid.nx - 1 : grid.nx;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= ui_end; ++i) e += state.u(i, j) * state.u(i, j);
    const int vj_end = grid.periodic_y() ? grid.ny - 1 : grid.ny;
    for (int j = 0; j <= vj_end; ++j)
        for (int i = 0; i < grid.nx; ++i) e += state.v(i, j) * state.v(i, j);
    return 0.5 * e * grid.dx * grid.dy;
}

Vec2 mean_velocity(const FlowState& state, const FlowGrid& grid) {
    Vec2 m;
    const int ui_end = grid.periodic_x() ? grid.nx - 1 : grid.nx;
    long nu = 0, nv = 0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= ui_end; ++i, ++nu) m.x += state.u(i, j);
    const int vj_end = grid.periodic_y() ? grid.ny - 1 : grid.ny;
    for (int j = 0; j <= vj_end; ++j)
        for (int i = 0; i < grid.nx; ++i, ++nv) m.y += state.v(i, j);
    return {m.x / static_cast<double>(nu), m.y / static_cast<double>(nv)};
}

double wake_deficit(const FlowState& state, const FlowGrid& grid, double x_probe, double y_center,
                    double half_width, double u_ref) {
    const int i = std::clamp(static_cast<int>(std::lround((x_probe - grid.origin.x) / grid.dx)), 0, grid.nx);
    double sum = 0.0;
    int count = 0;
    for (int j = 0; j < grid.ny; ++j) {
        if (std::abs(grid.u_face(i, j).y - y_center) > half_width) continue;
        sum += state.u(i, j);
        ++count;
    }
    if (count == 0) throw std::invalid_argument("wake_deficit: probe line misses the grid");
    return 1.0 - sum / count / u_ref;
}

void write_snapshot(const FlowState& state, const FlowGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot " + path.string());
    const Field w = curl(state, grid);
    out << "x,y,u,v,p,omega\n";
    char line[256];
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const Vec2 c = grid.cell_center(i, j);
            const double uc = 0.5 * (state.u(i, j) + state.u(i + 1, j));
            const double vc = 0.5 * (state.v(i, j) + state.v(i, j + 1));
            std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", c.x, c.y, uc, vc,
                          state.p(i, j), w(i, j));
            out << line;
        }
}

void AlmParams::validate() const {
    if (!(cells_per_radius >= 20.0))
        throw ConfigError("cells_per_radius", "the rotor needs at least 20 cells per radius");
    if (!(epsilon_cells >= 2.0)) throw ConfigError("epsilon_cells", "must be >= 2");
    if (!(rotor_x_radii >= 1.0 + 3.0 * epsilon_cells / cells_per_radius))
        throw ConfigError("rotor_x_radii", "rotor too close to the inflow boundary");
    if (!(domain_length_radii > rotor_x_radii + 1.0 + 3.0 * epsilon_cells / cells_per_radius))
        throw ConfigError("domain_length_radii", "rotor too close to the outflow boundary");
    if (!(domain_width_radii > 2.0 + 6.0 * epsilon_cells / cells_per_radius))
        throw ConfigError("domain_width_radii", "domain narrower than the rotor");
    if (!(nu >= 0.0)) throw ConfigError("nu", "must be >= 0");
    if (!(c_s >= 0.0)) throw ConfigError("c_s", "must be >= 0");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("cfl", "must lie in (0, 0.5]");
    if (snapshot_every < 0) throw ConfigError("snapshot_every", "must be >= 0");
}

FlowGrid AlmModel::make_grid() const {
    const double r = geometry.radius;
    FlowGrid g;
    g.dx = g.dy = r / params.cells_per_radius;
    g.nx = static_cast<int>(std::lround(params.domain_length_radii * params.cells_per_radius));
    g.ny = static_cast<int>(std::lround(params.domain_width_radii * params.cells_per_radius));
    g.origin = {-params.rotor_x_radii * r, -0.5 * g.ny * g.dy};
    g.boundary = {Side::Inflow, Side::Outflow, Side::Slip, Side::Slip, {operating.u_inf, 0.0}};
    return g;
}

namespace {

std::vector<AlmBladeResult> blade_loads(const AlmModel& model, const FlowState& state,
                                        const FlowGrid& grid, double azimuth) {
    std::vector<AlmBladeResult> out;
    for (int b = 0; b < model.geometry.blade_count; ++b) {
        AlmBladeResult r;
        r.blade = blade_state_at(model.geometry, model.operating, azimuth, b);
        const Vec2 u = sample_velocity(state, grid, r.blade.position);
        r.aero = relative_flow(r.blade, u, model.operating.rho);
        r.load = blade_load(r.aero, *model.polar, model.geometry.chord_mid);
        out.push_back(r);
    }
    return out;
}

}  // namespace

ForceSeries run_alm(const AlmModel& model, int steps_per_rev, int revolutions, double dt_override,
                    const AlmObserver& observer) {
    if (revolutions < 1) throw ConfigError("revolutions", "must be >= 1");
    if (steps_per_rev < 1) throw ConfigError("steps_per_rev", "must be >= 1");
    if (model.polar == nullptr) throw ConfigError("polar", "no polar table loaded");
    model.geometry.validate();
    model.operating.validate();
    model.params.validate();
    double dt = dt_override;
    if (model.operating.omega > 0.0)
        dt = kTwoPi / (model.operating.omega * steps_per_rev);
    else if (!(dt > 0.0))
        throw ConfigError("dt_s", "a time step is required when omega = 0");

    const FlowGrid grid = model.make_grid();
    SolverParams sp;
    sp.nu = model.params.nu;
    sp.c_s = model.params.c_s;
    sp.rho = model.operating.rho;
    sp.cfl = model.params.cfl;
    Solver solver(grid, sp);
    FlowState state = FlowState::uniform(grid, {model.operating.u_inf, 0.0});
    const double epsilon = model.params.epsilon_cells * grid.dx;

    ForceSeries series;
    series.model = "alm";
    series.tip_speed_ratio = tip_speed_ratio(model.operating, model.geometry);
    series.steps_per_rev = steps_per_rev;
    series.blade_count = model.geometry.blade_count;
    series.samples.reserve(static_cast<std::size_t>(revolutions) * steps_per_rev *
                           model.geometry.blade_count);

    auto azimuth_at = [&](double t) { return model.params.azimuth_offset + model.operating.omega * t; };

    const long total_steps = static_cast<long>(revolutions) * steps_per_rev;
    double t = 0.0;
    for (long n = 1; n <= total_steps; ++n) {
        const double t_end = static_cast<double>(n) * dt;
        while (t < t_end) {
            double h = std::min(0.9 * solver.stable_dt(state), t_end - t);
            // Avoid a sliver step at the end of the interval.
            if (t + h < t_end && t_end - (t + h) < 1e-3 * h) h = t_end - t;
            const auto loads = blade_loads(model, state, grid, azimuth_at(t));
            std::vector<ActuatorSource> sources;
            for (const auto& r : loads)
                sources.push_back({r.blade.position, blade_force_vector(r.blade, r.load), epsilon});
            const ForceField forces = project_forces(sources, grid);
            solver.advance(state, h, &forces);
            t = (t_end - (t + h) <= 0.0) ? t_end : t + h;
        }
        t = t_end;
        const auto loads = blade_loads(model, state, grid, azimuth_at(t_end));
        const int rev = static_cast<int>((n - 1) / steps_per_rev) + 1;
        for (const auto& r : loads) {
            ForceSample s;
            s.rev = rev;
            s.azimuth_deg = sample_azimuth_deg(r.blade.azimuth);
            s.blade = r.blade.blade_index;
            s.fn_per_span = r.load.normal;
            s.fn_total = r.load.normal * model.geometry.blade_length;
            series.samples.push_back(s);
        }
        if (observer) observer(state, grid, loads);
        if (model.params.snapshot_every > 0 && n % model.params.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%06ld.csv", n);
            write_snapshot(state, grid, model.params.snapshot_dir / name);
        }
    }
    return series;
}

}  // namespace vawt::alm2d
