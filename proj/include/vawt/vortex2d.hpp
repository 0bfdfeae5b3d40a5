#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vawt/airfoil.hpp"
#include "vawt/biot_savart.hpp"
#include "vawt/fastsum.hpp"
#include "vawt/force_series.hpp"
#include "vawt/turbine.hpp"

namespace vawt::vortex2d {

/// Discretized wake vorticity plus the undisturbed stream.
struct VortexEnsemble {
    std::vector<PointVortex> vortices;  // insertion (shedding) order
    Vec2 free_stream;
};

/// Lifting circulation carried by one blade, located at its quarter chord.
struct BoundVortex {
    int blade_index = 0;
    double gamma = 0.0;
    Vec2 anchor;
};

struct VortexSimState {
    VortexEnsemble ensemble;
    std::vector<BoundVortex> bound;
    double t = 0.0;
    long step_index = 0;
    double total_shed_circulation = 0.0;
    /// Circulation of wake vortices removed by downstream truncation.
    double truncated_circulation = 0.0;
};

struct VortexParams {
    double core_radius = 0.0;        // m; <= 0 selects 0.5 * chord
    double truncation_radii = 25.0;  // drop vortices this many radii downstream of the axis
    double theta_open = 0.5;
    int leaf_capacity = 8;
    int expansion_order = VortexTree::kDefaultOrder;
    /// Ensembles larger than this are evaluated through the quadtree.
    int fastsum_threshold = 512;
    double azimuth_offset = 0.0;     // rad, blade-0 azimuth at t = 0

    void validate() const;
};

/// Everything a step needs besides the evolving state.
struct VortexModel {
    TurbineGeometry geometry;
    OperatingPoint operating;
    const PolarTable* polar = nullptr;
    VortexParams params;

    double chord() const noexcept { return geometry.chord_mid; }
    double core_radius() const noexcept {
        return params.core_radius > 0.0 ? params.core_radius : 0.5 * geometry.chord_mid;
    }
};

/// u(x) = free_stream + sum of regularized point-vortex contributions.
Vec2 induced_velocity(const VortexEnsemble& ensemble, const Vec2& point);

/// Evaluates the velocity field at many targets, switching to the quadtree for large
/// source sets. Sources are the wake plus any extra (bound) vortices.
class FlowEvaluator {
public:
    FlowEvaluator(std::span<const PointVortex> wake, std::span<const PointVortex> extra,
                  Vec2 free_stream, const VortexParams& params);

    Vec2 operator()(const Vec2& point) const;
    /// Velocity at the first `count` sources (wake first, then extra), in order.
    std::vector<Vec2> at_sources(std::size_t count) const;
    bool uses_tree() const noexcept { return !tree_.empty(); }

private:
    std::vector<PointVortex> sources_;
    Vec2 free_stream_;
    VortexTree tree_;
    double theta_open_ = 0.0;
};

struct BladeResult {
    BladeState blade;
    AeroSample aero;
    BladeLoad load;
    double gamma = 0.0;
};

/// Sets each blade's bound circulation from the Kutta-Joukowski relation
/// |gamma| = 0.5 * chord * |v_rel| * cl, sampling the local flow at the quarter chord
/// without the blade's own bound vortex. Returns per-blade loads.
std::vector<BladeResult> update_bound_circulation(VortexSimState& state, const VortexModel& model,
                                                  std::span<const BladeState> blades);

/// Signed Kutta-Joukowski circulation for a blade section with lift coefficient `cl`.
double bound_circulation(const BladeState& blade, const AeroSample& aero, double chord, double cl);

/// Trailing-edge release point for a blade.
Vec2 trailing_edge(const BladeState& blade, double chord);

/// Appends one wake vortex per blade whose bound circulation changed since `previous`.
/// The shed strength is previous - current so the bound + wake total is conserved.
void shed(VortexSimState& state, std::span<const double> previous_gamma,
          std::span<const BladeState> blades, double chord, double core_radius);

/// RK4 advection of every wake vortex through the wake + bound + free-stream field.
/// Bound vortices are held fixed during the step.
void advect(VortexEnsemble& ensemble, std::span<const PointVortex> bound, double dt,
            const VortexParams& params);

/// Removes vortices beyond the truncation line, returning their summed circulation.
double truncate_wake(VortexEnsemble& ensemble, double x_limit);

/// Fresh state: no wake, zero bound circulation at the initial blade positions.
VortexSimState initial_state(const VortexModel& model);

/// One time step: kinematics, bound circulation, shedding, advection, truncation.
std::vector<BladeResult> step(VortexSimState& state, const VortexModel& model, double dt);

/// Bound + wake + truncated circulation (zero for a consistent state).
double kelvin_residual(const VortexSimState& state);
/// Sum of |gamma| over bound and wake vortices, the scale for the Kelvin residual.
double circulation_scale(const VortexSimState& state);

/// Called after every step with the state and loads; used by tests and diagnostics.
using StepObserver = std::function<void(const VortexSimState&, std::span<const BladeResult>)>;

/// Runs `revolutions` rotor turns at `steps_per_rev` steps each and records the normal
/// force of every blade at every step. With omega = 0, `dt_override` sets the step.
ForceSeries run(const VortexModel& model, int steps_per_rev, int revolutions,
                double dt_override = 0.0, const StepObserver& observer = {});

}  // namespace vawt::vortex2d
