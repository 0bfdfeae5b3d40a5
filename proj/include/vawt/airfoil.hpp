#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vawt/turbine.hpp"
#include "vawt/vec2.hpp"

namespace vawt {

struct PolarRow {
    double alpha = 0.0;  // rad
    double cl = 0.0;
    double cd = 0.0;
};

struct LiftDrag {
    double cl = 0.0;
    double cd = 0.0;
};

/// Static lift/drag polar over the full circle of incidence.
///
/// Rows are stored in radians with alpha strictly increasing and covering [-pi, pi].
/// Lookup is periodic in 2*pi and linear between rows.
class PolarTable {
public:
    PolarTable() = default;

    /// Validates and takes ownership of the rows. Throws FormatError on any violation.
    PolarTable(std::string airfoil_name, std::vector<PolarRow> rows, bool symmetric,
               std::optional<double> reynolds = std::nullopt);

    /// Parses the text polar format:
    ///   # comment
    ///   # name: NACA0021        (optional directives inside comments)
    ///   # symmetric: true
    ///   # reynolds: 4.0e5
    ///   alpha_deg, cl, cd
    static PolarTable parse(std::istream& in);
    static PolarTable load(const std::filesystem::path& path);

    LiftDrag lookup(double alpha) const;

    const std::string& airfoil_name() const noexcept { return name_; }
    std::optional<double> reynolds() const noexcept { return reynolds_; }
    bool symmetric() const noexcept { return symmetric_; }
    const std::vector<PolarRow>& rows() const noexcept { return rows_; }

private:
    std::string name_;
    std::optional<double> reynolds_;
    bool symmetric_ = false;
    std::vector<PolarRow> rows_;
};

/// Blade-element inputs at one blade.
struct AeroSample {
    Vec2 v_rel;         // m/s, air velocity seen by the blade
    double alpha = 0.0; // rad, (-pi, pi]
    double q = 0.0;     // Pa
};

/// Relative wind and angle of attack.
///
/// alpha is measured from the leading-edge-to-trailing-edge chord line to v_rel and is
/// positive when v_rel has a component along the outward chord normal, i.e. when the
/// resulting normal force points outward.
AeroSample relative_flow(const BladeState& blade, const Vec2& local_u, double rho);

struct BladeLoad {
    double normal = 0.0;      // N/m, positive outward
    double tangential = 0.0;  // N/m, positive toward the leading edge (driving)
};

BladeLoad blade_load(const AeroSample& sample, const PolarTable& table, double chord);

/// Same decomposition with coefficients supplied directly.
BladeLoad blade_load(const AeroSample& sample, LiftDrag coefficients, double chord);

/// Force on the blade per unit span in global coordinates.
Vec2 blade_force_vector(const BladeState& blade, const BladeLoad& load);

}  // namespace vawt
