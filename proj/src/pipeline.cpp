#include "xhom/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"
#include "xhom/spectrum.hpp"

#ifndef XHOM_VERSION
#define XHOM_VERSION "0.0.0"
#endif

namespace xhom::pipeline {

namespace fs = std::filesystem;

namespace {

std::string grid_text(const quadrature::GridDims& d) {
    return std::to_string(d.energy) + "x" + std::to_string(d.azimuth) + "x" + std::to_string(d.radial);
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const config::RunConfig& cfg, const std::string& command)
        : path_(path) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) throw IoError("cannot write " + path.string());
        out_ << "# xhom " << version() << "\n";
        out_ << "# config_sha256 " << cfg.digest << "\n";
        out_ << "# command " << command << "\n";
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_.string());
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_summary(const fs::path& path, const config::RunConfig& cfg, const Summary& summary) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "version = " << version() << "\n";
    out << "config_sha256 = " << cfg.digest << "\n";
    for (const auto& [k, v] : summary) out << k << " = " << v << "\n";
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> samples(const Range& r) {
    return multilayer::linspace(r.lo, r.hi, r.n);
}

}  // namespace

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string version() { return XHOM_VERSION; }

Range parse_range(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos) throw ConfigError("range '" + text + "' is not of the form lo:hi:n");
    try {
        std::size_t used = 0;
        Range r{};
        const std::string lo = text.substr(0, a), hi = text.substr(a + 1, b - a - 1), n = text.substr(b + 1);
        r.lo = std::stod(lo, &used);
        if (used != lo.size()) throw std::invalid_argument(lo);
        r.hi = std::stod(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(hi);
        r.n = std::stoi(n, &used);
        if (used != n.size()) throw std::invalid_argument(n);
        if (!(r.hi > r.lo) || r.n < 2) throw std::invalid_argument("order");
        return r;
    } catch (const std::logic_error&) {
        throw ConfigError("range '" + text + "' needs numbers lo < hi and an integer n >= 2");
    }
}

RunOutput run_spectrum(const config::RunConfig& cfg, const SpectrumOptions& opts) {
    const quadrature::Aperture aperture{cfg.aperture_rad, quadrature::Acceptance::SignalOnly};
    if (!(aperture.full_width_rad > 0.0)) throw DomainError("empty accepted window: aperture is 0");
    const auto energies = samples(opts.energies);
    for (double e : energies) {
        if (!(e > 0.0 && e < cfg.pump.energy_keV)) throw ConfigError("spectrum energies must lie in (0, pump energy)");
    }
    const auto spec = spdc::nlc_spectrum(cfg.pump, cfg.crystal, aperture, energies, cfg.grid, opts.refine);

    RunOutput out;
    out.csv = cfg.output_dir / "spectrum.csv";
    out.summary_file = cfg.output_dir / "spectrum_summary.txt";
    out.warnings = spec.warnings;
    out.summary = {
        {"total_rate_pairs_per_s", number(spec.total_rate)},
        {"bandwidth_keV", number(spec.bandwidth_keV)},
        {"window_lo_keV", number(spec.window_lo_keV)},
        {"window_hi_keV", number(spec.window_hi_keV)},
        {"degenerate_angle_deg", number(spec.degenerate_angle_rad / constants::deg)},
        {"aperture_deg", number(cfg.aperture_rad / constants::deg)},
        {"grid", grid_text(cfg.grid)},
        {"convergence_delta", opts.refine ? number(spec.convergence_delta) : "not_checked"},
    };
    for (const auto& w : spec.warnings) out.summary.emplace_back("warning", w);

    CsvWriter csv(out.csv, cfg, "spectrum");
    csv.row({"signal_energy_keV", "normalized_rate_density", "absolute_rate_density_per_keV"});
    for (const auto& p : spec.points) csv.row({number(p.energy_keV), number(p.normalized), number(p.density_per_keV)});
    csv.close();
    write_summary(out.summary_file, cfg, out.summary);
    return out;
}

RunOutput run_scan(const config::RunConfig& cfg, const ScanOptions& opts) {
    const auto& dev = cfg.device(opts.device);
    const bool angle = opts.axis == multilayer::ScanAxis::Angle;
    Range range = opts.range;
    if (range.n == 0) range = angle ? Range{0.5, 1.5, 2001} : Range{8.0, 13.0, 2001};
    double at = opts.at;
    if (std::isnan(at)) at = angle ? cfg.degenerate_energy() : cfg.nominal_angle(dev) / constants::deg;

    auto grid = samples(range);
    if (angle) {
        for (double& g : grid) g *= constants::deg;
    }
    const double fixed = angle ? at : at * constants::deg;
    const auto stack = dev.design.build();
    const auto scan = multilayer::response_scan(stack, opts.axis, grid, fixed, cfg.device_polarization);

    RunOutput out;
    const std::string tag = opts.device + (angle ? "_angle" : "_energy");
    out.csv = cfg.output_dir / ("scan_" + tag + ".csv");
    out.summary_file = cfg.output_dir / ("scan_" + tag + "_summary.txt");
    const double unit = angle ? constants::deg : 1.0;
    out.summary = {{"device", opts.device},
                   {"axis", angle ? "angle_deg" : "energy_keV"},
                   {angle ? "energy_keV" : "angle_deg", number(at)},
                   {"polarization", cfg.device_polarization == multilayer::Polarization::S ? "s" : "p"}};
    try {
        const auto peak = multilayer::find_peak(scan);
        out.summary.emplace_back("peak_position", number(peak.position / unit));
        out.summary.emplace_back("peak_reflectivity", number(peak.height));
        out.summary.emplace_back("fwhm", number(peak.fwhm / unit));
    } catch (const DomainError& e) {
        out.warnings.emplace_back(e.what());
        out.summary.emplace_back("warning", e.what());
    }

    CsvWriter csv(out.csv, cfg, "scan " + opts.device + (angle ? " angle" : " energy"));
    csv.comment(angle ? "abscissa: grazing angle, deg" : "abscissa: photon energy, keV");
    csv.row({"abscissa", "reflectivity_front", "reflectivity_back", "transmissivity", "reflection_phase_front_rad",
             "reflection_phase_back_rad"});
    for (const auto& p : scan.points) {
        const auto& r = p.response;
        csv.row({number(p.abscissa / unit), number(r.reflectivity_front()), number(r.reflectivity_back()),
                 number(r.transmissivity()), number(std::arg(r.r_front)), number(std::arg(r.r_back))});
    }
    csv.close();
    write_summary(out.summary_file, cfg, out.summary);
    return out;
}

RunOutput run_dip(const config::RunConfig& cfg, const DipOptions& opts) {
    const auto geometry = cfg.geometry();
    if (!(geometry.aperture.full_width_rad > 0.0)) throw DomainError("empty accepted window: aperture is 0");
    const auto devices = cfg.devices();
    const double as = constants::attosecond;

    const auto grid = quadrature::build_grid(cfg.pump, cfg.crystal, geometry.aperture, cfg.grid);
    const auto coeffs = hom::node_coefficients(grid, cfg.pump, cfg.crystal, geometry, devices);
    const auto curve = hom::hom_curve(coeffs, opts.delays_as.lo * as, opts.delays_as.hi * as, opts.delays_as.n);
    const bool has_dip = curve.metrics.fwhm_s > 0.0;

    RunOutput out;
    out.csv = cfg.output_dir / "dip.csv";
    out.summary_file = cfg.output_dir / "dip_summary.txt";
    out.warnings = curve.notices;
    const auto& m = curve.metrics;
    std::string convergence = "not_checked";
    double delta = 0.0;
    if (opts.refine && has_dip) {
        const auto fine = quadrature::build_grid(cfg.pump, cfg.crystal, geometry.aperture, cfg.grid.doubled());
        const auto c2 = hom::hom_curve(hom::node_coefficients(fine, cfg.pump, cfg.crystal, geometry, devices),
                                       curve.delay_s.front(), curve.delay_s.back(), opts.delays_as.n, false);
        if (c2.metrics.fwhm_s > 0.0) {
            delta = std::abs(m.fwhm_s - c2.metrics.fwhm_s) / c2.metrics.fwhm_s;
            convergence = number(delta);
        } else {
            delta = 1.0;
            convergence = "no_dip_on_refined_grid";
        }
    }
    out.summary = {
        {"FWHM_as", has_dip ? number(m.fwhm_s / as) : "nan"},
        {"visibility", number(has_dip ? m.visibility : (curve.baseline - curve.center_rate) / curve.baseline)},
        {"shift_as", has_dip ? number(m.shift_s / as) : "nan"},
        {"path_diff_A", has_dip ? number(m.path_difference_m * 1e10) : "nan"},
        {"bandwidth_keV", has_dip ? number(m.bandwidth_keV) : "nan"},
        {"bandwidth_convention", "hbar/FWHM"},
        {"grid", grid_text(cfg.grid)},
        {"convergence_delta", convergence},
        {"baseline_pairs_per_s", number(curve.baseline)},
        {"source_rate_pairs_per_s", number(curve.source_rate)},
        {"max_imag_ratio", number(curve.max_imag_ratio)},
        {"delay_lo_as", number(curve.delay_s.front() / as)},
        {"delay_hi_as", number(curve.delay_s.back() / as)},
    };
    for (const auto& n : curve.notices) out.summary.emplace_back("notice", n);

    CsvWriter csv(out.csv, cfg, "dip");
    csv.row({"delay_as", "rate_pairs_per_s", "normalized_rate"});
    for (std::size_t i = 0; i < curve.delay_s.size(); ++i) {
        csv.row({number(curve.delay_s[i] / as), number(curve.rate[i]), number(curve.normalized[i])});
    }
    for (const auto& [k, v] : out.summary) csv.comment(k + " = " + v);
    csv.close();
    write_summary(out.summary_file, cfg, out.summary);

    if (!has_dip) throw ConvergenceError("no resolved dip: " + (curve.notices.empty() ? std::string("flat curve") : curve.notices.back()));
    if (opts.refine && delta > 0.01) {
        throw ConvergenceError("dip FWHM changes by " + number(100.0 * delta) + "% on a doubled grid");
    }
    return out;
}

}  // namespace xhom::pipeline
