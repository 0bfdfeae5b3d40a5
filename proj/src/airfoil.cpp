#include "vawt/airfoil.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vawt/errors.hpp"

namespace vawt {

namespace {

constexpr double kSymmetryTolerance = 1e-6;
// Endpoints given in degrees are rounded; accept ~1e-9 rad slack on the [-pi, pi] span.
constexpr double kSpanSlack = 1e-9;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& token, int line, const char* what) {
    const std::string t = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value))
        throw FormatError(std::string("invalid ") + what + " '" + t + "'", line);
    return value;
}

}  // namespace

PolarTable::PolarTable(std::string airfoil_name, std::vector<PolarRow> rows, bool symmetric,
                       std::optional<double> reynolds)
    : name_(std::move(airfoil_name)),
      reynolds_(reynolds),
      symmetric_(symmetric),
      rows_(std::move(rows)) {
    if (rows_.size() < 2) throw FormatError("polar table needs at least two rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].cd < 0.0) throw FormatError("negative cd in row " + std::to_string(i + 1));
        if (i > 0 && !(rows_[i].alpha > rows_[i - 1].alpha))
            throw FormatError("alpha not strictly increasing at row " + std::to_string(i + 1));
    }
    if (rows_.front().alpha > -kPi + kSpanSlack || rows_.back().alpha < kPi - kSpanSlack)
        throw FormatError("alpha must span at least [-180, 180] degrees");
    if (symmetric_) {
        for (const auto& r : rows_) {
            const double mirrored = lookup(-r.alpha).cl;
            if (std::abs(mirrored + r.cl) > kSymmetryTolerance)
                throw FormatError("table flagged symmetric but cl(-a) != -cl(a) at alpha = " +
                                  std::to_string(rad_to_deg(r.alpha)) + " deg");
        }
    }
}

PolarTable PolarTable::parse(std::istream& in) {
    std::string name = "unnamed";
    std::optional<double> reynolds;
    bool symmetric = false;
    std::vector<PolarRow> rows;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string body = trim(std::string_view(line).substr(1));
            const auto colon = body.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = trim(std::string_view(body).substr(0, colon));
            const std::string value = trim(std::string_view(body).substr(colon + 1));
            if (key == "name") {
                name = value;
            } else if (key == "symmetric") {
                if (value != "true" && value != "false")
                    throw FormatError("symmetric must be true or false", line_no);
                symmetric = value == "true";
            } else if (key == "reynolds") {
                reynolds = parse_number(value, line_no, "reynolds");
            }
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 3)
            throw FormatError("expected 'alpha_deg, cl, cd', got " + std::to_string(fields.size()) +
                                  " fields",
                              line_no);
        PolarRow row;
        row.alpha = deg_to_rad(parse_number(fields[0], line_no, "alpha"));
        row.cl = parse_number(fields[1], line_no, "cl");
        row.cd = parse_number(fields[2], line_no, "cd");
        if (row.cd < 0.0) throw FormatError("cd must be non-negative", line_no);
        if (!rows.empty() && !(row.alpha > rows.back().alpha))
            throw FormatError("alpha must be strictly ascending", line_no);
        rows.push_back(row);
    }
    if (rows.empty()) throw FormatError("polar file contains no data rows");
    return PolarTable(std::move(name), std::move(rows), symmetric, reynolds);
}

PolarTable PolarTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open polar file " + path.string());
    try {
        return parse(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

LiftDrag PolarTable::lookup(double alpha) const {
    if (rows_.size() < 2) throw FormatError("lookup on an empty polar table");
    // Bring alpha into the table range; the table spans at least one full period.
    double a = alpha;
    if (a < rows_.front().alpha || a > rows_.back().alpha) a = wrap_pi(a);
    if (a < rows_.front().alpha) a += kTwoPi;
    if (a > rows_.back().alpha) a -= kTwoPi;

    const auto it = std::lower_bound(rows_.begin(), rows_.end(), a,
                                     [](const PolarRow& r, double v) { return r.alpha < v; });
    if (it == rows_.begin()) return {it->cl, it->cd};
    if (it == rows_.end()) return {rows_.back().cl, rows_.back().cd};
    const PolarRow& hi = *it;
    const PolarRow& lo = *(it - 1);
    if (hi.alpha == a) return {hi.cl, hi.cd};
    const double w = (a - lo.alpha) / (hi.alpha - lo.alpha);
    return {lo.cl + w * (hi.cl - lo.cl), lo.cd + w * (hi.cd - lo.cd)};
}

AeroSample relative_flow(const BladeState& blade, const Vec2& local_u, double rho) {
    AeroSample s;
    s.v_rel = local_u - blade.velocity;
    const double speed2 = norm2(s.v_rel);
    if (speed2 == 0.0) return s;
    const Vec2 m = blade.outward_normal();
    const double along = -dot(s.v_rel, blade.chord_direction);
    const double across = dot(s.v_rel, m);
    s.alpha = std::atan2(across, along);
    if (s.alpha <= -kPi) s.alpha = kPi;
    s.q = 0.5 * rho * speed2;
    return s;
}

BladeLoad blade_load(const AeroSample& sample, LiftDrag coefficients, double chord) {
    const double lift = sample.q * chord * coefficients.cl;
    const double drag = sample.q * chord * coefficients.cd;
    const double ca = std::cos(sample.alpha);
    const double sa = std::sin(sample.alpha);
    return {lift * ca + drag * sa, lift * sa - drag * ca};
}

BladeLoad blade_load(const AeroSample& sample, const PolarTable& table, double chord) {
    if (!(chord > 0.0)) throw std::invalid_argument("blade_load: chord must be positive");
    return blade_load(sample, table.lookup(sample.alpha), chord);
}

Vec2 blade_force_vector(const BladeState& blade, const BladeLoad& load) {
    return load.normal * blade.outward_normal() + load.tangential * blade.chord_direction;
}

}  // namespace vawt
