// Command-line front end: validate a configuration and run the spectrum,
// multilayer-scan and HOM-dip pipelines.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "xhom/config.hpp"
#include "xhom/errors.hpp"
#include "xhom/pipeline.hpp"

namespace {

enum ExitCode { Ok = 0, ConfigFailure = 2, NumericalFailure = 3, IoFailure = 4 };

void print_summary(const xhom::pipeline::RunOutput& out) {
    for (const auto& [k, v] : out.summary) std::cout << k << " = " << v << "\n";
    std::cout << "wrote " << out.csv.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"x-ray Hong-Ou-Mandel simulator"};
    app.set_version_flag("--version", xhom::pipeline::version());
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::string grid;
    bool refine = false;
    bool quiet = false;
    app.add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--grid", grid, "quadrature nodes <energy>x<azimuth>x<radial>");
    app.add_flag("--refine", refine, "check convergence on a doubled grid (dip)");
    app.add_flag("--quiet", quiet, "suppress the summary on stdout");

    auto* validate = app.add_subcommand("validate", "check a configuration and report every problem");

    auto* spectrum = app.add_subcommand("spectrum", "down-converted spectrum and pair rate");
    std::string spectrum_range = "7.5:13.5:601";
    spectrum->add_option("--range", spectrum_range, "signal energies lo:hi:n in keV")->capture_default_str();

    auto* scan = app.add_subcommand("scan", "multilayer reflectivity/transmission scan");
    std::string device;
    std::string axis = "angle";
    std::string scan_range;
    double at = std::numeric_limits<double>::quiet_NaN();
    scan->add_option("--device", device, "mirror_s, mirror_i or beam_splitter")->required();
    scan->add_option("--axis", axis, "angle or energy")->check(CLI::IsMember({"angle", "energy"}))->capture_default_str();
    scan->add_option("--range", scan_range, "lo:hi:n in deg (angle) or keV (energy)");
    scan->add_option("--at", at, "fixed energy in keV (angle scan) or angle in deg (energy scan)");

    auto* dip = app.add_subcommand("dip", "coincidence rate versus delay");
    std::string delays = "-3:3:401";
    dip->add_option("--delay", delays, "delays lo:hi:n in attoseconds")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigFailure;
    }

    try {
        if (validate->parsed()) {
            const auto result = xhom::config::validate_file(config_path);
            if (!result.ok()) {
                std::cerr << xhom::config::format(result.diagnostics);
                std::cerr << result.diagnostics.size() << " problem(s) in " << config_path << "\n";
                return ConfigFailure;
            }
            if (!quiet) std::cout << config_path << ": ok (sha256 " << result.config->digest << ")\n";
            return Ok;
        }

        auto cfg = xhom::config::load(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!grid.empty()) cfg.grid = xhom::config::parse_grid(grid);

        xhom::pipeline::RunOutput out;
        if (spectrum->parsed()) {
            out = xhom::pipeline::run_spectrum(cfg, {xhom::pipeline::parse_range(spectrum_range), true});
        } else if (scan->parsed()) {
            xhom::pipeline::ScanOptions opts;
            opts.device = device;
            opts.axis = axis == "angle" ? xhom::multilayer::ScanAxis::Angle : xhom::multilayer::ScanAxis::Energy;
            if (!scan_range.empty()) opts.range = xhom::pipeline::parse_range(scan_range);
            opts.at = at;
            out = xhom::pipeline::run_scan(cfg, opts);
        } else if (dip->parsed()) {
            out = xhom::pipeline::run_dip(cfg, {xhom::pipeline::parse_range(delays), refine});
        }
        for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
        if (!quiet) print_summary(out);
        return Ok;
    } catch (const xhom::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const xhom::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const xhom::ConvergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return NumericalFailure;
    } catch (const xhom::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return IoFailure;
    }
}
