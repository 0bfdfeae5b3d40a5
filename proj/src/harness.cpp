#include "vawt/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "vawt/errors.hpp"

namespace vawt {

extern const char* const kBundledNaca0021Polar;  // generated at build time

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text, int line, const std::string& key) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        throw FormatError("'" + key + "' expects a number, got '" + text + "'", line);
    return value;
}

long to_long(const std::string& text, int line, const std::string& key) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw FormatError("'" + key + "' expects an integer, got '" + text + "'", line);
    return value;
}

int to_int(const std::string& text, int line, const std::string& key) {
    const long v = to_long(text, line, key);
    if (v < -2147483647L || v > 2147483647L) throw FormatError("'" + key + "' out of range", line);
    return static_cast<int>(v);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

const char* to_string(ModelKind kind) noexcept { return kind == ModelKind::Vortex ? "vortex" : "alm"; }

ModelKind parse_model(const std::string& name) {
    if (name == "vortex") return ModelKind::Vortex;
    if (name == "alm") return ModelKind::Alm;
    throw ConfigError("model", "expected 'vortex' or 'alm', got '" + name + "'");
}

void Scenario::validate() const {
    geometry.validate();
    operating.validate();
    if (steps_per_rev < kMinStepsPerRev) throw ConfigError("steps_per_rev", "must be >= 36");
    if (revolutions < 1) throw ConfigError("revolutions", "must be >= 1");
    if (operating.omega == 0.0 && !(dt_override > 0.0))
        throw ConfigError("dt_s", "a positive time step is required when omega = 0");
    if (!std::isfinite(azimuth_offset)) throw ConfigError("azimuth_offset", "must be finite");
    if (model == ModelKind::Vortex) vortex.validate();
    else alm.validate();
}

Scenario parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    Scenario s;
    bool have_omega = false, have_u = false;

    using Handler = std::function<void(const std::string&, int, const std::string&)>;
    auto num = [](double& target, double scale = 1.0) -> Handler {
        return [&target, scale](const std::string& v, int line, const std::string& key) {
            target = to_double(v, line, key) * scale;
        };
    };
    auto integer = [](int& target) -> Handler {
        return [&target](const std::string& v, int line, const std::string& key) {
            target = to_int(v, line, key);
        };
    };
    const double deg = kPi / 180.0;

    std::map<std::string, std::map<std::string, Handler>> sections;
    sections["turbine"] = {
        {"radius_m", num(s.geometry.radius)},
        {"blade_count", integer(s.geometry.blade_count)},
        {"blade_length_m", num(s.geometry.blade_length)},
        {"chord_mid_m", num(s.geometry.chord_mid)},
        {"tip_chord_m", num(s.geometry.tip_chord)},
        {"taper_length_m", num(s.geometry.taper_length)},
        {"pitch_deg", num(s.geometry.pitch_angle, deg)},
        {"hub_height_m", num(s.geometry.hub_height)},
        {"swept_area_m2", num(s.geometry.swept_area)},
    };
    sections["operating"] = {
        {"omega_rpm",
         [&](const std::string& v, int line, const std::string& key) {
             s.operating.omega = rpm_to_rad_per_s(to_double(v, line, key));
             have_omega = true;
         }},
        {"u_inf_mps",
         [&](const std::string& v, int line, const std::string& key) {
             s.operating.u_inf = to_double(v, line, key);
             have_u = true;
         }},
        {"rho_kgpm3", num(s.operating.rho)},
    };
    sections["run"] = {
        {"name", [&](const std::string& v, int, const std::string&) { s.name = v; }},
        {"model",
         [&](const std::string& v, int line, const std::string&) {
             try {
                 s.model = parse_model(v);
             } catch (const ConfigError& e) {
                 throw FormatError(e.what(), line);
             }
         }},
        {"steps_per_rev", integer(s.steps_per_rev)},
        {"revolutions", integer(s.revolutions)},
        {"seed",
         [&](const std::string& v, int line, const std::string& key) {
             const long x = to_long(v, line, key);
             if (x < 0) throw FormatError("'seed' must be non-negative", line);
             s.seed = static_cast<unsigned>(x);
         }},
        {"azimuth_offset_deg", num(s.azimuth_offset, deg)},
        {"dt_s", num(s.dt_override)},
        {"polar",
         [&](const std::string& v, int, const std::string&) {
             if (v == "builtin:naca0021") {
                 s.polar_path.clear();
             } else {
                 std::filesystem::path p(v);
                 s.polar_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
             }
         }},
    };
    sections["vortex"] = {
        {"core_radius_m", num(s.vortex.core_radius)},
        {"truncation_radii", num(s.vortex.truncation_radii)},
        {"theta_open", num(s.vortex.theta_open)},
        {"leaf_capacity", integer(s.vortex.leaf_capacity)},
        {"expansion_order", integer(s.vortex.expansion_order)},
        {"fastsum_threshold", integer(s.vortex.fastsum_threshold)},
    };
    sections["alm"] = {
        {"cells_per_radius", num(s.alm.cells_per_radius)},
        {"domain_length_radii", num(s.alm.domain_length_radii)},
        {"domain_width_radii", num(s.alm.domain_width_radii)},
        {"rotor_x_radii", num(s.alm.rotor_x_radii)},
        {"epsilon_cells", num(s.alm.epsilon_cells)},
        {"nu_m2ps", num(s.alm.nu)},
        {"c_s", num(s.alm.c_s)},
        {"cfl", num(s.alm.cfl)},
        {"snapshot_every", integer(s.alm.snapshot_every)},
        {"snapshot_dir",
         [&](const std::string& v, int, const std::string&) {
             std::filesystem::path p(v);
             s.alm.snapshot_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
         }},
    };

    std::string section;
    std::set<std::string> seen;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw FormatError("unterminated section header", line_no);
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!sections.contains(section))
                throw FormatError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("expected 'key = value'", line_no);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) throw FormatError("key '" + key + "' outside any section", line_no);
        auto& handlers = sections[section];
        const auto it = handlers.find(key);
        if (it == handlers.end())
            throw FormatError("unknown key '" + key + "' in [" + section + "]", line_no);
        if (!seen.insert(section + "." + key).second)
            throw FormatError("duplicate key '" + key + "' in [" + section + "]", line_no);
        it->second(value, line_no, key);
    }
    if (!have_omega) throw ConfigError("omega_rpm", "missing from [operating]");
    if (!have_u) throw ConfigError("u_inf_mps", "missing from [operating]");
    s.validate();
    return s;
}

Scenario load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config " + path.string());
    try {
        return parse_config(in, path.parent_path());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

PolarTable bundled_naca0021() {
    std::istringstream in(kBundledNaca0021Polar);
    return PolarTable::parse(in);
}

PolarTable load_polar(const Scenario& scenario) {
    return scenario.polar_path.empty() ? bundled_naca0021() : PolarTable::load(scenario.polar_path);
}

std::string canonical_form(const Scenario& s) {
    std::ostringstream out;
    const auto& g = s.geometry;
    out << "turbine:" << fmt17(g.radius) << ',' << g.blade_count << ',' << fmt17(g.blade_length)
        << ',' << fmt17(g.chord_mid) << ',' << fmt17(g.tip_chord) << ',' << fmt17(g.taper_length)
        << ',' << fmt17(g.pitch_angle) << ',' << fmt17(g.hub_height) << ','
        << fmt17(g.swept_area) << '\n';
    out << "operating:" << fmt17(s.operating.omega) << ',' << fmt17(s.operating.u_inf) << ','
        << fmt17(s.operating.rho) << '\n';
    out << "run:" << to_string(s.model) << ',' << s.steps_per_rev << ',' << s.revolutions << ','
        << fmt17(s.azimuth_offset) << ',' << fmt17(s.operating.omega == 0.0 ? s.dt_override : 0.0)
        << '\n';
    const PolarTable polar = load_polar(s);
    std::uint64_t polar_hash = 14695981039346656037ULL;
    for (const auto& r : polar.rows()) {
        polar_hash ^= fnv1a(fmt17(r.alpha) + ',' + fmt17(r.cl) + ',' + fmt17(r.cd));
        polar_hash *= 1099511628211ULL;
    }
    out << "polar:" << std::hex << polar_hash << std::dec << '\n';
    if (s.model == ModelKind::Vortex) {
        const auto& v = s.vortex;
        out << "vortex:" << fmt17(v.core_radius > 0.0 ? v.core_radius : 0.5 * g.chord_mid) << ','
            << fmt17(v.truncation_radii) << ',' << fmt17(v.theta_open) << ',' << v.leaf_capacity
            << ',' << v.expansion_order << ',' << v.fastsum_threshold << '\n';
    } else {
        const auto& a = s.alm;
        out << "alm:" << fmt17(a.cells_per_radius) << ',' << fmt17(a.domain_length_radii) << ','
            << fmt17(a.domain_width_radii) << ',' << fmt17(a.rotor_x_radii) << ','
            << fmt17(a.epsilon_cells) << ',' << fmt17(a.nu) << ',' << fmt17(a.c_s) << ','
            << fmt17(a.cfl) << '\n';
    }
    return out.str();
}

std::string scenario_hash(const Scenario& scenario) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_form(scenario))));
    return buf;
}

ForceSeries run_scenario(const Scenario& scenario) {
    scenario.validate();
    const PolarTable polar = load_polar(scenario);
    ForceSeries series;
    if (scenario.model == ModelKind::Vortex) {
        vortex2d::VortexModel model{scenario.geometry, scenario.operating, &polar, scenario.vortex};
        model.params.azimuth_offset = scenario.azimuth_offset;
        series = vortex2d::run(model, scenario.steps_per_rev, scenario.revolutions,
                               scenario.dt_override);
    } else {
        alm2d::AlmModel model{scenario.geometry, scenario.operating, &polar, scenario.alm};
        model.params.azimuth_offset = scenario.azimuth_offset;
        series = alm2d::run_alm(model, scenario.steps_per_rev, scenario.revolutions,
                                scenario.dt_override);
    }
    series.scenario_hash = scenario_hash(scenario);
    series.label = scenario.name;
    return series;
}

// CSV -------------------------------------------------------------------------------------

void write_csv(const ForceSeries& series, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& s : series.samples) {
        out << s.rev << ',' << fmt15(s.azimuth_deg) << ',' << s.blade << ',' << fmt15(s.fn_per_span)
            << ',' << fmt15(s.fn_total) << '\n';
    }
}

ForceSeries read_csv(std::istream& in) {
    ForceSeries series;
    series.model = "external";
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw FormatError("empty CSV");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw FormatError("expected header '" + std::string(kCsvHeader) + "'", 1);
    int max_blade = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(trim(tok));
        if (f.size() != 5) throw FormatError("expected 5 fields", line_no);
        ForceSample s;
        s.rev = to_int(f[0], line_no, "rev");
        s.azimuth_deg = to_double(f[1], line_no, "azimuth_deg");
        s.blade = to_int(f[2], line_no, "blade");
        s.fn_per_span = to_double(f[3], line_no, "fn_per_span");
        s.fn_total = to_double(f[4], line_no, "fn_total");
        if (!(s.azimuth_deg >= 0.0 && s.azimuth_deg < 360.0))
            throw FormatError("azimuth_deg outside [0, 360)", line_no);
        if (s.blade < 0) throw FormatError("negative blade index", line_no);
        max_blade = std::max(max_blade, s.blade);
        series.samples.push_back(s);
    }
    series.blade_count = max_blade + 1;
    return series;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
    }
}

namespace {

std::filesystem::path sidecar(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p += ".meta.json";
    return p;
}

}  // namespace

void save_series(const ForceSeries& series, const std::filesystem::path& path) {
    std::ostringstream csv;
    write_csv(series, csv);
    nlohmann::ordered_json meta;
    meta["scenario_hash"] = series.scenario_hash;
    meta["model"] = series.model;
    meta["label"] = series.label;
    meta["tip_speed_ratio"] = series.tip_speed_ratio;
    meta["steps_per_rev"] = series.steps_per_rev;
    meta["blade_count"] = series.blade_count;
    write_file_atomic(path, csv.str());
    write_file_atomic(sidecar(path), meta.dump(2) + "\n");
}

ForceSeries load_series(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    ForceSeries series;
    try {
        series = read_csv(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    series.label = path.stem().string();
    if (std::ifstream meta_in(sidecar(path)); meta_in) {
        const auto meta = nlohmann::json::parse(meta_in, nullptr, false);
        if (meta.is_discarded()) throw FormatError(sidecar(path).string() + ": invalid JSON");
        series.scenario_hash = meta.value("scenario_hash", "");
        series.model = meta.value("model", "external");
        series.label = meta.value("label", series.label);
        series.tip_speed_ratio = meta.value("tip_speed_ratio", 0.0);
        series.steps_per_rev = meta.value("steps_per_rev", 0);
        series.blade_count = meta.value("blade_count", series.blade_count);
    }
    return series;
}

// Comparison ------------------------------------------------------------------------------

std::vector<ForceSample> final_revolution(const ForceSeries& series, int blade) {
    std::vector<ForceSample> out;
    const int last = series.last_revolution();
    for (const auto& s : series.samples)
        if (s.rev == last && s.blade == blade) out.push_back(s);
    std::stable_sort(out.begin(), out.end(), [](const ForceSample& a, const ForceSample& b) {
        return a.azimuth_deg < b.azimuth_deg;
    });
    return out;
}

std::string legend_label(const ForceSeries& series) {
    if (series.model == "external" || series.tip_speed_ratio <= 0.0)
        return series.model + (series.label.empty() ? "" : ": " + series.label);
    char buf[64];
    std::snprintf(buf, sizeof buf, " (lambda = %.2f)", series.tip_speed_ratio);
    return series.model + buf;
}

namespace {

SeriesSummary summarize(const ForceSeries& series, int bins) {
    if (series.samples.empty()) throw std::invalid_argument("compare: empty series");
    SeriesSummary out;
    out.label = legend_label(series);
    out.revolution = series.last_revolution();
    out.bins.assign(static_cast<std::size_t>(bins), {});
    const double width = 360.0 / bins;
    bool first = true;
    for (const auto& s : series.samples) {
        if (s.rev != out.revolution) continue;
        // Samples on a bin edge stay there after a CSV round trip moves them by an ulp.
        const int k = std::min(bins - 1, static_cast<int>(std::floor(s.azimuth_deg / width + 1e-9)));
        BinStats& b = out.bins[static_cast<std::size_t>(k)];
        if (b.count == 0) {
            b.min = b.max = s.fn_total;
        } else {
            b.min = std::min(b.min, s.fn_total);
            b.max = std::max(b.max, s.fn_total);
        }
        b.mean += s.fn_total;
        ++b.count;
        if (first || s.fn_total > out.peak_max) {
            out.peak_max = s.fn_total;
            out.peak_max_azimuth_deg = s.azimuth_deg;
        }
        if (first || s.fn_total < out.peak_min) {
            out.peak_min = s.fn_total;
            out.peak_min_azimuth_deg = s.azimuth_deg;
        }
        first = false;
    }
    for (auto& b : out.bins)
        if (b.count > 0) b.mean /= b.count;
    return out;
}

nlohmann::ordered_json summary_json(const SeriesSummary& s, double width) {
    nlohmann::ordered_json j;
    j["label"] = s.label;
    j["revolution"] = s.revolution;
    j["peak_max"] = {{"azimuth_deg", s.peak_max_azimuth_deg}, {"fn_total", s.peak_max}};
    j["peak_min"] = {{"azimuth_deg", s.peak_min_azimuth_deg}, {"fn_total", s.peak_min}};
    auto bins = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s.bins.size(); ++k) {
        const auto& b = s.bins[k];
        nlohmann::ordered_json e;
        e["azimuth_lo_deg"] = width * static_cast<double>(k);
        e["count"] = b.count;
        if (b.count > 0) {
            e["mean"] = b.mean;
            e["min"] = b.min;
            e["max"] = b.max;
        }
        bins.push_back(e);
    }
    j["bins"] = bins;
    return j;
}

}  // namespace

ComparisonReport compare(const ForceSeries& a, const ForceSeries& b, int bins) {
    if (bins < 12) throw std::invalid_argument("compare: at least 12 bins required");
    ComparisonReport r;
    r.bin_count = bins;
    r.bin_width_deg = 360.0 / bins;
    r.a = summarize(a, bins);
    r.b = summarize(b, bins);
    double sum = 0.0;
    for (int k = 0; k < bins; ++k) {
        const auto& ba = r.a.bins[static_cast<std::size_t>(k)];
        const auto& bb = r.b.bins[static_cast<std::size_t>(k)];
        if (ba.count == 0 || bb.count == 0) continue;
        const double d = ba.mean - bb.mean;
        sum += d * d;
        ++r.common_bins;
    }
    r.rms_difference = r.common_bins > 0 ? std::sqrt(sum / r.common_bins) : 0.0;
    return r;
}

std::string ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    j["bins"] = bin_count;
    j["bin_width_deg"] = bin_width_deg;
    j["rms_difference"] = rms_difference;
    j["common_bins"] = common_bins;
    j["a"] = summary_json(a, bin_width_deg);
    j["b"] = summary_json(b, bin_width_deg);
    return j.dump(2) + "\n";
}

// Plotting --------------------------------------------------------------------------------

namespace {

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string render_svg(const std::vector<ForceSeries>& series) {
    if (series.empty()) throw std::invalid_argument("plot: at least one series required");
    std::vector<std::vector<ForceSample>> curves;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : series) {
        auto c = final_revolution(s, 0);
        if (c.empty()) throw std::invalid_argument("plot: series '" + legend_label(s) + "' has no samples");
        for (const auto& p : c) {
            if (first) lo = hi = p.fn_total;
            lo = std::min(lo, p.fn_total);
            hi = std::max(hi, p.fn_total);
            first = false;
        }
        curves.push_back(std::move(c));
    }
    if (hi - lo < 1e-9) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double step = nice_step(hi - lo, 6);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;

    constexpr double W = 800, H = 500, left = 80, right = 200, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto X = [&](double az) { return left + pw * az / 360.0; };
    auto Y = [&](double f) { return top + ph * (hi - f) / (hi - lo); };

    std::ostringstream o;
    char buf[256];
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                  W, H, W, H);
    o << buf;
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int az = 0; az <= 360; az += 45) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%d</text>\n",
                      X(az), top, X(az), top + ph, X(az), top + ph + 18, az);
        o << buf;
    }
    for (double f = lo; f <= hi + 0.5 * step; f += step) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%g</text>\n",
                      left, Y(f), left + pw, Y(f), left - 6, Y(f) + 4, std::abs(f) < 1e-9 * step ? 0.0 : f);
        o << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n",
                  left, top, pw, ph);
    o << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">Azimuthal angle [deg]</text>\n"
                  "<text x=\"20\" y=\"%.2f\" text-anchor=\"middle\" transform=\"rotate(-90 20 %.2f)\">Normal force F_N [N]</text>\n",
                  left + pw / 2, H - 15, top + ph / 2, top + ph / 2);
    o << buf;
    o << "</g>\n";

    for (std::size_t k = 0; k < curves.size(); ++k) {
        const char* color = kPalette[k % std::size(kPalette)];
        o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t p = 0; p < curves[k].size(); ++p) {
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", p ? " " : "", X(curves[k][p].azimuth_deg),
                          Y(curves[k][p].fn_total));
            o << buf;
        }
        o << "\"/>\n";
        const double ly = top + 10 + 20.0 * static_cast<double>(k);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"2\"/>",
                      left + pw + 10, ly, left + pw + 35, ly, color);
        o << buf;
        std::snprintf(buf, sizeof buf,
                      "<text class=\"legend\" x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\">",
                      left + pw + 40, ly + 4);
        o << buf << xml_escape(legend_label(series[k])) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void emit_plot(const std::vector<ForceSeries>& series, const std::filesystem::path& path) {
    const std::string svg = render_svg(series);
    std::ostringstream csv;
    csv << "series,azimuth_deg,fn_total\n";
    for (const auto& s : series) {
        std::string label = legend_label(s);
        std::replace(label.begin(), label.end(), ',', ';');
        for (const auto& p : final_revolution(s, 0))
            csv << label << ',' << fmt15(p.azimuth_deg) << ',' << fmt15(p.fn_total) << '\n';
    }
    write_file_atomic(path, svg);
    std::filesystem::path data = path;
    data += ".csv";
    write_file_atomic(data, csv.str());
}

}  // namespace vawt
