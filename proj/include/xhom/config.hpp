#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xhom/hom.hpp"
#include "xhom/materials.hpp"
#include "xhom/multilayer.hpp"
#include "xhom/quadrature.hpp"
#include "xhom/spdc.hpp"

namespace xhom::config {

/// Environment variable naming the directory of .nff scattering tables.
inline constexpr const char* table_dir_env = "XHOM_DATA_DIR";

struct Diagnostic {
    std::string key;  ///< section.key, or the section name
    std::string message;
};

std::string format(const std::vector<Diagnostic>& diagnostics);

struct DeviceConfig {
    std::string name;
    multilayer::MultilayerDesign design;
    /// Explicit nominal grazing angle; otherwise the refraction-corrected
    /// Bragg angle at the degenerate energy.
    std::optional<double> nominal_rad;
};

struct RunConfig {
    spdc::PumpConfig pump;
    spdc::CrystalConfig crystal;
    double aperture_rad = 0.0;
    std::map<std::string, materials::Material> materials;
    DeviceConfig mirror_s;
    DeviceConfig mirror_i;
    DeviceConfig beam_splitter;
    multilayer::Polarization device_polarization = multilayer::Polarization::P;
    bool signal_on_front = true;
    quadrature::GridDims grid;
    std::filesystem::path output_dir = "out";
    std::filesystem::path table_dir;
    /// SHA-256 of the file bytes, lower-case hex.
    std::string digest;

    const DeviceConfig& device(const std::string& name) const;
    double nominal_angle(const DeviceConfig& device) const;
    double degenerate_energy() const { return 0.5 * pump.energy_keV; }
    hom::BenchGeometry geometry() const;
    hom::Devices devices() const;
};

struct ValidationResult {
    std::optional<RunConfig> config;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return config.has_value() && diagnostics.empty(); }
};

/// Parses and fully validates a configuration; every violation is reported.
/// Throws IoError when the file cannot be read and ConfigError (with the
/// line) on syntax errors. `table_dir` falls back to $XHOM_DATA_DIR, then to
/// the build-time data directory.
ValidationResult validate_file(const std::filesystem::path& path,
                               std::optional<std::filesystem::path> table_dir = std::nullopt);

ValidationResult validate_text(const std::string& text,
                               std::optional<std::filesystem::path> table_dir = std::nullopt);

/// validate_file, throwing ConfigError listing all diagnostics on failure.
RunConfig load(const std::filesystem::path& path,
               std::optional<std::filesystem::path> table_dir = std::nullopt);

/// "96x48x24" -> dims; throws ConfigError.
quadrature::GridDims parse_grid(const std::string& text);

std::string sha256_hex(const std::string& bytes);

std::filesystem::path default_table_dir();

}  // namespace xhom::config
