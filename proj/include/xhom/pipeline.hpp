#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "xhom/config.hpp"

namespace xhom::pipeline {

/// lo:hi:n sample specification.
struct Range {
    double lo;
    double hi;
    int n;
};

/// Parses "lo:hi:n"; throws ConfigError.
Range parse_range(const std::string& text);

/// Ordered key-value summary; written as "key = value" lines.
using Summary = std::vector<std::pair<std::string, std::string>>;

struct RunOutput {
    std::filesystem::path csv;
    std::filesystem::path summary_file;
    Summary summary;
    std::vector<std::string> warnings;
};

struct SpectrumOptions {
    Range energies{7.5, 13.5, 601};
    bool refine = true;
};

struct ScanOptions {
    std::string device;
    multilayer::ScanAxis axis = multilayer::ScanAxis::Angle;
    /// deg for angle scans, keV for energy scans; defaults when n == 0.
    Range range{0.0, 0.0, 0};
    /// Fixed energy (keV) or angle (deg); defaults when NaN.
    double at = std::numeric_limits<double>::quiet_NaN();
};

struct DipOptions {
    Range delays_as{-3.0, 3.0, 401};
    bool refine = false;
};

RunOutput run_spectrum(const config::RunConfig& cfg, const SpectrumOptions& opts);
RunOutput run_scan(const config::RunConfig& cfg, const ScanOptions& opts);
/// Throws ConvergenceError after writing output when the refined FWHM moves
/// by more than 1% or no dip is resolved.
RunOutput run_dip(const config::RunConfig& cfg, const DipOptions& opts);

/// printf("%.9g").
std::string number(double v);

std::string version();

}  // namespace xhom::pipeline
