// vawtsim: run VAWT force simulations, compare force series and plot them.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vawt/harness.hpp"

namespace {

int simulate(const std::string& config, const std::string& model, int revs, double theta_open,
             int steps_per_rev, const std::string& out) {
    vawt::Scenario scenario = vawt::load_config(config);
    if (!model.empty()) scenario.model = vawt::parse_model(model);
    if (revs > 0) scenario.revolutions = revs;
    if (theta_open >= 0.0) scenario.vortex.theta_open = theta_open;
    if (steps_per_rev > 0) scenario.steps_per_rev = steps_per_rev;
    scenario.validate();

    const vawt::ForceSeries series = vawt::run_scenario(scenario);
    vawt::save_series(series, out);
    std::printf("%s: %zu samples, lambda = %.3f, hash %s -> %s\n", vawt::to_string(scenario.model),
                series.samples.size(), series.tip_speed_ratio, series.scenario_hash.c_str(),
                out.c_str());
    return 0;
}

int compare(const std::string& a, const std::string& b, int bins, const std::string& out) {
    const auto report = vawt::compare(vawt::load_series(a), vawt::load_series(b), bins);
    const std::string json = report.to_json();
    if (out.empty()) std::cout << json;
    else vawt::write_file_atomic(out, json);
    std::printf("rms difference %.6g N over %d common bins\n", report.rms_difference,
                report.common_bins);
    return 0;
}

int plot(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<vawt::ForceSeries> series;
    for (const auto& path : inputs) series.push_back(vawt::load_series(path));
    vawt::emit_plot(series, out);
    std::printf("wrote %s (%zu curves)\n", out.c_str(), series.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vertical-axis wind turbine normal-force simulator"};
    app.require_subcommand(1);

    std::string config, model, out;
    int revs = 0, steps_per_rev = 0;
    double theta_open = -1.0;
    auto* sim = app.add_subcommand("simulate", "Run a scenario and write its force series CSV");
    sim->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    sim->add_option("--model", model, "Solver override")->check(CLI::IsMember({"vortex", "alm"}));
    sim->add_option("--revs", revs, "Number of revolutions")->check(CLI::PositiveNumber);
    sim->add_option("--theta-open", theta_open, "Tree opening angle for the vortex model")
        ->check(CLI::Range(0.0, 1.0));
    sim->add_option("--steps-per-rev", steps_per_rev, "Time steps per revolution")
        ->check(CLI::PositiveNumber);
    sim->add_option("--out", out, "Output CSV")->required();

    std::string csv_a, csv_b, report_out;
    int bins = 72;
    auto* cmp = app.add_subcommand("compare", "Azimuth-binned comparison of two force series");
    cmp->add_option("a", csv_a, "First CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("b", csv_b, "Second CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("--bins", bins, "Azimuth bins over 360 degrees");
    cmp->add_option("--out", report_out, "JSON report (stdout when omitted)");

    std::vector<std::string> plot_inputs;
    std::string svg_out;
    auto* plt = app.add_subcommand("plot", "Plot F_N versus azimuth as SVG");
    plt->add_option("csv", plot_inputs, "Force series CSVs")->required()->check(CLI::ExistingFile);
    plt->add_option("--out", svg_out, "Output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "vawtsim: error: %s\n", e.what());
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (*sim) return simulate(config, model, revs, theta_open, steps_per_rev, out);
        if (*cmp) return compare(csv_a, csv_b, bins, report_out);
        if (*plt) return plot(plot_inputs, svg_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "vawtsim: error: %s\n", e.what());
        return 1;
    }
    return 1;
}
