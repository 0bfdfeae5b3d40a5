#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vawt/airfoil.hpp"
#include "vawt/alm2d.hpp"
#include "vawt/force_series.hpp"
#include "vawt/turbine.hpp"
#include "vawt/vortex2d.hpp"

namespace vawt {

enum class ModelKind { Vortex, Alm };

const char* to_string(ModelKind kind) noexcept;
/// Accepts "vortex" or "alm"; throws ConfigError otherwise.
ModelKind parse_model(const std::string& name);

/// One fully resolved run: rotor, operating point, model and numerics.
struct Scenario {
    std::string name = "scenario";
    TurbineGeometry geometry;
    OperatingPoint operating;
    ModelKind model = ModelKind::Vortex;
    int steps_per_rev = 72;
    int revolutions = 10;
    unsigned seed = 0;
    double azimuth_offset = 0.0;  // rad
    double dt_override = 0.0;     // s, only used when omega = 0
    /// Empty selects the bundled NACA0021 polar.
    std::filesystem::path polar_path;
    vortex2d::VortexParams vortex;
    alm2d::AlmParams alm;

    static constexpr int kMinStepsPerRev = 36;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses the sectioned key = value format. Relative paths resolve against `base_dir`.
Scenario parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_config(const std::filesystem::path& path);

/// Polar used by a scenario (bundled table when polar_path is empty).
PolarTable load_polar(const Scenario& scenario);
/// The NACA0021 table compiled into the library.
PolarTable bundled_naca0021();

/// Canonical text of every parameter that affects the numbers a run produces.
std::string canonical_form(const Scenario& scenario);
/// 64-bit FNV-1a of canonical_form, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

/// Dispatches to the configured solver and fills series metadata.
ForceSeries run_scenario(const Scenario& scenario);

// CSV persistence -------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "rev,azimuth_deg,blade,fn_per_span,fn_total";

void write_csv(const ForceSeries& series, std::ostream& out);
ForceSeries read_csv(std::istream& in);

/// Writes `path` and the metadata sidecar `path + ".meta.json"`, each via temp + rename.
void save_series(const ForceSeries& series, const std::filesystem::path& path);
/// Reads a CSV and its sidecar; without a sidecar the series is tagged "external".
ForceSeries load_series(const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary file and an atomic rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Comparison ------------------------------------------------------------------------------

struct BinStats {
    int count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct SeriesSummary {
    std::string label;
    int revolution = 0;
    std::vector<BinStats> bins;
    double peak_max_azimuth_deg = 0.0;
    double peak_max = 0.0;
    double peak_min_azimuth_deg = 0.0;
    double peak_min = 0.0;
};

struct ComparisonReport {
    int bin_count = 0;
    double bin_width_deg = 0.0;
    SeriesSummary a, b;
    double rms_difference = 0.0;  // over bins populated in both series
    int common_bins = 0;

    std::string to_json() const;
};

/// Azimuth-binned statistics of fn_total over each series' final revolution.
/// Throws std::invalid_argument for empty series or fewer than 12 bins.
ComparisonReport compare(const ForceSeries& a, const ForceSeries& b, int bins = 72);

/// Final-revolution samples of one blade, ordered by azimuth.
std::vector<ForceSample> final_revolution(const ForceSeries& series, int blade = 0);

/// Legend text: model name plus tip speed ratio, or the label for external data.
std::string legend_label(const ForceSeries& series);

// Plotting --------------------------------------------------------------------------------

/// SVG of F_N (fn_total) against azimuth, one polyline per series (final revolution,
/// blade 0). The plotted points are also written to `path + ".csv"`.
void emit_plot(const std::vector<ForceSeries>& series, const std::filesystem::path& path);
std::string render_svg(const std::vector<ForceSeries>& series);

}  // namespace vawt
