#include "vawt/vortex2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vawt/errors.hpp"

namespace vawt::vortex2d {

void VortexParams::validate() const {
    if (!(truncation_radii > 0.0)) throw ConfigError("truncation_radii", "must be positive");
    if (!(theta_open >= 0.0 && theta_open <= 1.0))
        throw ConfigError("theta_open", "must lie in [0, 1]");
    if (leaf_capacity < 1) throw ConfigError("leaf_capacity", "must be >= 1");
    if (expansion_order < 0 || expansion_order > VortexTree::kMaxOrder)
        throw ConfigError("expansion_order", "must lie in [0, 8]");
    if (fastsum_threshold < 0) throw ConfigError("fastsum_threshold", "must be >= 0");
    if (!std::isfinite(core_radius)) throw ConfigError("core_radius", "must be finite");
}

Vec2 induced_velocity(const VortexEnsemble& ensemble, const Vec2& point) {
    return ensemble.free_stream + direct_sum(ensemble.vortices, point);
}

FlowEvaluator::FlowEvaluator(std::span<const PointVortex> wake, std::span<const PointVortex> extra,
                             Vec2 free_stream, const VortexParams& params)
    : free_stream_(free_stream), theta_open_(params.theta_open) {
    sources_.reserve(wake.size() + extra.size());
    sources_.insert(sources_.end(), wake.begin(), wake.end());
    sources_.insert(sources_.end(), extra.begin(), extra.end());
    if (sources_.size() > static_cast<std::size_t>(params.fastsum_threshold))
        tree_ = VortexTree::build(sources_, params.leaf_capacity, params.expansion_order);
}

Vec2 FlowEvaluator::operator()(const Vec2& point) const {
    if (!tree_.empty()) return free_stream_ + tree_.eval(point, theta_open_);
    return free_stream_ + direct_sum(sources_, point);
}

std::vector<Vec2> FlowEvaluator::at_sources(std::size_t count) const {
    count = std::min(count, sources_.size());
    std::vector<Vec2> out;
    if (!tree_.empty()) {
        out = tree_.eval_at_sources(theta_open_);
        out.resize(count);
        for (auto& u : out) u = free_stream_ + u;
    } else {
        out.resize(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = (*this)(sources_[i].position);
    }
    return out;
}

double bound_circulation(const BladeState& blade, const AeroSample& aero, double chord,
                         double cl) {
    const double speed = norm(aero.v_rel);
    if (speed == 0.0 || cl == 0.0) return 0.0;
    // Lift acts along the outward chord normal rotated by alpha; the force on a vortex
    // of circulation gamma in relative wind v is rho * gamma * (v_y, -v_x).
    const Vec2 lift_dir = std::sin(aero.alpha) * blade.chord_direction +
                          std::cos(aero.alpha) * blade.outward_normal();
    const Vec2 kj_dir{aero.v_rel.y / speed, -aero.v_rel.x / speed};
    const double orientation = dot(lift_dir, kj_dir) >= 0.0 ? 1.0 : -1.0;
    return orientation * 0.5 * chord * speed * cl;
}

Vec2 trailing_edge(const BladeState& blade, double chord) {
    return blade.position - (0.75 * chord) * blade.chord_direction;
}

std::vector<BladeResult> update_bound_circulation(VortexSimState& state, const VortexModel& model,
                                                  std::span<const BladeState> blades) {
    if (model.polar == nullptr) throw std::invalid_argument("vortex2d: no polar table");
    const FlowEvaluator wake(state.ensemble.vortices, {}, state.ensemble.free_stream,
                             model.params);
    const double core = model.core_radius();
    std::vector<BladeResult> results(blades.size());
    for (std::size_t i = 0; i < blades.size(); ++i) {
        const BladeState& blade = blades[i];
        Vec2 u = wake(blade.position);
        for (std::size_t j = 0; j < state.bound.size(); ++j) {
            if (state.bound[j].blade_index == blade.blade_index) continue;
            u += vortex_kernel(blade.position, state.bound[j].anchor, state.bound[j].gamma, core);
        }
        BladeResult& r = results[i];
        r.blade = blade;
        r.aero = relative_flow(blade, u, model.operating.rho);
        const LiftDrag coeff = model.polar->lookup(r.aero.alpha);
        r.load = blade_load(r.aero, coeff, model.chord());
        r.gamma = bound_circulation(blade, r.aero, model.chord(), coeff.cl);
    }
    for (std::size_t i = 0; i < blades.size(); ++i) {
        state.bound[i].gamma = results[i].gamma;
        state.bound[i].anchor = blades[i].position;
    }
    return results;
}

void shed(VortexSimState& state, std::span<const double> previous_gamma,
          std::span<const BladeState> blades, double chord, double core_radius) {
    for (std::size_t i = 0; i < state.bound.size(); ++i) {
        const double released = previous_gamma[i] - state.bound[i].gamma;
        if (released == 0.0) continue;
        state.ensemble.vortices.push_back({trailing_edge(blades[i], chord), released, core_radius});
        state.total_shed_circulation += released;
    }
}

void advect(VortexEnsemble& ensemble, std::span<const PointVortex> bound, double dt,
            const VortexParams& params) {
    if (!(dt > 0.0)) throw std::invalid_argument("advect: dt must be positive");
    auto& wake = ensemble.vortices;
    const std::size_t n = wake.size();
    if (n == 0) return;

    std::vector<Vec2> x0(n), k(n), acc(n);
    for (std::size_t i = 0; i < n; ++i) x0[i] = wake[i].position;

    auto stage_velocity = [&](std::vector<PointVortex>& probe) {
        const FlowEvaluator field(probe, bound, ensemble.free_stream, params);
        k = field.at_sources(n);
    };

    std::vector<PointVortex> probe = wake;
    constexpr double kStageOffset[3] = {0.5, 0.5, 1.0};
    constexpr double kWeight[4] = {1.0, 2.0, 2.0, 1.0};
    for (int s = 0; s < 4; ++s) {
        stage_velocity(probe);
        for (std::size_t i = 0; i < n; ++i) acc[i] += kWeight[s] * k[i];
        if (s < 3)
            for (std::size_t i = 0; i < n; ++i)
                probe[i].position = x0[i] + (kStageOffset[s] * dt) * k[i];
    }
    for (std::size_t i = 0; i < n; ++i) wake[i].position = x0[i] + (dt / 6.0) * acc[i];
}

double truncate_wake(VortexEnsemble& ensemble, double x_limit) {
    double dropped = 0.0;
    std::vector<PointVortex> kept;
    kept.reserve(ensemble.vortices.size());
    for (const auto& v : ensemble.vortices) {
        if (v.position.x > x_limit)
            dropped += v.gamma;
        else
            kept.push_back(v);
    }
    ensemble.vortices = std::move(kept);
    return dropped;
}

namespace {

std::vector<BladeState> blades_at(const VortexModel& model, double azimuth) {
    std::vector<BladeState> blades;
    blades.reserve(static_cast<std::size_t>(model.geometry.blade_count));
    for (int b = 0; b < model.geometry.blade_count; ++b)
        blades.push_back(blade_state_at(model.geometry, model.operating, azimuth, b));
    return blades;
}

std::vector<PointVortex> bound_as_vortices(const VortexSimState& state, double core) {
    std::vector<PointVortex> out;
    out.reserve(state.bound.size());
    for (const auto& b : state.bound) out.push_back({b.anchor, b.gamma, core});
    return out;
}

}  // namespace

VortexSimState initial_state(const VortexModel& model) {
    model.geometry.validate();
    model.operating.validate();
    model.params.validate();
    VortexSimState state;
    state.ensemble.free_stream = {model.operating.u_inf, 0.0};
    for (const auto& blade : blades_at(model, model.params.azimuth_offset))
        state.bound.push_back({blade.blade_index, 0.0, blade.position});
    return state;
}

std::vector<BladeResult> step(VortexSimState& state, const VortexModel& model, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("vortex2d::step: dt must be positive");
    state.step_index += 1;
    state.t = static_cast<double>(state.step_index) * dt;
    const double azimuth = model.params.azimuth_offset + model.operating.omega * state.t;
    const auto blades = blades_at(model, azimuth);

    std::vector<double> previous(state.bound.size());
    for (std::size_t i = 0; i < state.bound.size(); ++i) previous[i] = state.bound[i].gamma;

    auto results = update_bound_circulation(state, model, blades);
    shed(state, previous, blades, model.chord(), model.core_radius());
    advect(state.ensemble, bound_as_vortices(state, model.core_radius()), dt, model.params);
    state.truncated_circulation += truncate_wake(
        state.ensemble, model.params.truncation_radii * model.geometry.radius);
    return results;
}

double kelvin_residual(const VortexSimState& state) {
    double total = state.truncated_circulation;
    for (const auto& b : state.bound) total += b.gamma;
    for (const auto& v : state.ensemble.vortices) total += v.gamma;
    return total;
}

double circulation_scale(const VortexSimState& state) {
    double total = std::abs(state.truncated_circulation);
    for (const auto& b : state.bound) total += std::abs(b.gamma);
    for (const auto& v : state.ensemble.vortices) total += std::abs(v.gamma);
    return total;
}

ForceSeries run(const VortexModel& model, int steps_per_rev, int revolutions, double dt_override,
                const StepObserver& observer) {
    if (revolutions < 1) throw ConfigError("revolutions", "must be >= 1");
    if (steps_per_rev < 1) throw ConfigError("steps_per_rev", "must be >= 1");
    if (model.polar == nullptr) throw ConfigError("polar", "no polar table loaded");
    double dt = dt_override;
    if (model.operating.omega > 0.0)
        dt = kTwoPi / (model.operating.omega * steps_per_rev);
    else if (!(dt > 0.0))
        throw ConfigError("dt_s", "a time step is required when omega = 0");

    VortexSimState state = initial_state(model);
    ForceSeries series;
    series.model = "vortex";
    series.tip_speed_ratio = tip_speed_ratio(model.operating, model.geometry);
    series.steps_per_rev = steps_per_rev;
    series.blade_count = model.geometry.blade_count;
    series.samples.reserve(static_cast<std::size_t>(revolutions) * steps_per_rev *
                           model.geometry.blade_count);

    const long total_steps = static_cast<long>(revolutions) * steps_per_rev;
    for (long n = 1; n <= total_steps; ++n) {
        const auto results = step(state, model, dt);
        const int rev = static_cast<int>((n - 1) / steps_per_rev) + 1;
        for (const auto& r : results) {
            ForceSample s;
            s.rev = rev;
            s.azimuth_deg = sample_azimuth_deg(r.blade.azimuth);
            s.blade = r.blade.blade_index;
            s.fn_per_span = r.load.normal;
            s.fn_total = r.load.normal * model.geometry.blade_length;
            series.samples.push_back(s);
        }
        if (observer) observer(state, results);
    }
    return series;
}

}  // namespace vawt::vortex2d
