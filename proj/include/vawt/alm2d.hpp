#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vawt/airfoil.hpp"
#include "vawt/force_series.hpp"
#include "vawt/poisson.hpp"
#include "vawt/turbine.hpp"
#include "vawt/vec2.hpp"

namespace vawt::alm2d {

enum class Side { Inflow, Outflow, Slip, Periodic };

/// Per-side boundary types. Supported: left in {Inflow, Slip, Periodic}, right in
/// {Outflow, Slip, Periodic}, bottom/top in {Slip, Periodic}; periodic sides come in pairs.
struct BoundarySpec {
    Side left = Side::Inflow;
    Side right = Side::Outflow;
    Side bottom = Side::Slip;
    Side top = Side::Slip;
    Vec2 inflow_velocity;  // used on Inflow sides

    static BoundarySpec periodic() { return {Side::Periodic, Side::Periodic, Side::Periodic, Side::Periodic, {}}; }
};

/// Uniform MAC grid. Cell (i, j) spans [origin + (i, j) * (dx, dy), origin + (i+1, j+1) * (dx, dy)].
struct FlowGrid {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    Vec2 origin;
    BoundarySpec boundary;

    void validate() const;

    bool periodic_x() const noexcept { return boundary.left == Side::Periodic; }
    bool periodic_y() const noexcept { return boundary.bottom == Side::Periodic; }
    double width() const noexcept { return nx * dx; }
    double height() const noexcept { return ny * dy; }
    /// Filter width (dx * dy)^(1/2).
    double filter_width() const noexcept;

    Vec2 u_face(int i, int j) const noexcept { return origin + Vec2{i * dx, (j + 0.5) * dy}; }
    Vec2 v_face(int i, int j) const noexcept { return origin + Vec2{(i + 0.5) * dx, j * dy}; }
    Vec2 cell_center(int i, int j) const noexcept {
        return origin + Vec2{(i + 0.5) * dx, (j + 0.5) * dy};
    }
};

/// Row-major 2D array, x index fastest.
class Field {
public:
    Field() = default;
    Field(int nx, int ny, double value = 0.0)
        : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, value) {}

    double& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(j) * nx_ + i]; }
    double operator()(int i, int j) const noexcept {
        return data_[static_cast<std::size_t>(j) * nx_ + i];
    }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double max_abs() const noexcept;

private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> data_;
};

/// u on (nx+1) x ny vertical faces, v on nx x (ny+1) horizontal faces, cell-centered
/// pressure and eddy viscosity.
struct FlowState {
    Field u, v;
    Field p;       // Pa
    Field nu_sgs;  // m^2/s
    double t = 0.0;
    double last_divergence = 0.0;  // normalized, from the most recent step
    double peak_divergence = 0.0;  // largest last_divergence over the state's history

    static FlowState uniform(const FlowGrid& grid, Vec2 velocity);
};

/// Face-centered body force per unit volume (N/m^3), same layout as u and v.
struct ForceField {
    Field fx, fy;

    static ForceField zeros(const FlowGrid& grid);
};

/// Line force smeared with a Gaussian of width epsilon.
struct ActuatorSource {
    Vec2 point;
    Vec2 force;  // N/m, force of the air on the blade
    double epsilon = 0.0;
};

/// Smagorinsky eddy viscosity (c_s * Delta)^2 * sqrt(2 S_lk S_lk) per cell.
Field smagorinsky(const FlowState& state, const FlowGrid& grid, double c_s);

/// Cell-centered vorticity dv/dx - du/dy.
Field curl(const FlowState& state, const FlowGrid& grid);

/// Normalized discrete divergence: max |div * dx * dy| / max face flux.
double max_divergence(const FlowState& state, const FlowGrid& grid);

/// Gaussian projection of the reaction forces (minus each source force) onto the faces.
/// Throws ConfigError when a source violates the resolution or boundary-margin rules.
ForceField project_forces(std::span<const ActuatorSource> sources, const FlowGrid& grid);

/// Integral of a face force field over the domain, N/m.
Vec2 integrate(const ForceField& field, const FlowGrid& grid);

/// Bilinear velocity interpolation at an arbitrary point inside the grid.
Vec2 sample_velocity(const FlowState& state, const FlowGrid& grid, const Vec2& point);

struct SolverParams {
    double nu = 1.5e-5;    // m^2/s
    double c_s = 0.17;
    double rho = 1.225;    // kg/m^3
    double poisson_tolerance = 1e-10;
    double cfl = 0.5;      // advective limit
    double diffusion_limit = 0.25;
};

/// Incompressible LES stepper: SSP-RK3 with a pressure projection after every stage.
class Solver {
public:
    Solver(FlowGrid grid, SolverParams params);
    ~Solver();
    Solver(Solver&&) noexcept;
    Solver& operator=(Solver&&) noexcept;

    /// Largest stable dt for the state under the configured limits.
    double stable_dt(const FlowState& state) const;

    /// One step of the filtered Navier-Stokes equations. Throws StepError when dt
    /// exceeds a stability limit.
    void advance(FlowState& state, double dt, const ForceField* forces = nullptr);

    /// Projects `state` to a discretely divergence-free field.
    void project(FlowState& state, double dt_scale);

    const FlowGrid& grid() const noexcept { return grid_; }
    const SolverParams& params() const noexcept { return params_; }
    const PoissonSolver::Stats& last_poisson() const noexcept { return last_poisson_; }

private:
    void rhs(const FlowState& state, const ForceField* forces, Field& ru, Field& rv) const;
    void apply_boundaries(FlowState& state) const;

    FlowGrid grid_;
    SolverParams params_;
    std::unique_ptr<PoissonSolver> poisson_;
    PoissonSolver::Stats last_poisson_;
};

/// Total kinetic energy per unit span and density, 0.5 * sum(u^2 + v^2) * dx * dy.
double kinetic_energy(const FlowState& state, const FlowGrid& grid);

/// Mean velocity over the unique faces.
Vec2 mean_velocity(const FlowState& state, const FlowGrid& grid);

/// Streamwise deficit 1 - mean(u)/u_ref along x = x_probe for |y - y_center| <= half_width.
double wake_deficit(const FlowState& state, const FlowGrid& grid, double x_probe,
                    double y_center, double half_width, double u_ref);

/// Writes x,y,u,v,p,omega at cell centers as CSV.
void write_snapshot(const FlowState& state, const FlowGrid& grid, const std::filesystem::path& path);

struct AlmParams {
    double cells_per_radius = 20.0;
    double domain_length_radii = 20.0;
    double domain_width_radii = 10.0;
    double rotor_x_radii = 6.0;  // distance from the inflow boundary to the axis
    double epsilon_cells = 2.5;
    double nu = 1.5e-5;
    double c_s = 0.17;
    double cfl = 0.5;
    double azimuth_offset = 0.0;
    int snapshot_every = 0;        // outer steps between snapshots, 0 = none
    std::filesystem::path snapshot_dir;

    void validate() const;
};

struct AlmModel {
    TurbineGeometry geometry;
    OperatingPoint operating;
    const PolarTable* polar = nullptr;
    AlmParams params;

    /// Rotor-centered grid with inflow left, outflow right and slip walls.
    FlowGrid make_grid() const;
};

struct AlmBladeResult {
    BladeState blade;
    AeroSample aero;
    BladeLoad load;
};

/// Called after every outer step.
using AlmObserver = std::function<void(const FlowState&, const FlowGrid&, std::span<const AlmBladeResult>)>;

/// Actuator-line run; records the normal force on every blade after each outer step.
/// Outer steps are split into substeps that satisfy the CFL limit.
ForceSeries run_alm(const AlmModel& model, int steps_per_rev, int revolutions,
                    double dt_override = 0.0, const AlmObserver& observer = {});

}  // namespace vawt::alm2d
