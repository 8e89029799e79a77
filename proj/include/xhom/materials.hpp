#pragma once

#include <complex>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xhom/errors.hpp"

namespace xhom::materials {

/// Thrown by the .nff reader; carries the 1-based line of the offending input.
class TableParseError : public ConfigError {
public:
    TableParseError(const std::string& what, int line)
        : ConfigError(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct ScatteringRow {
    double energy_eV;
    double f1;
    double f2;

    /// Rows whose f1 carries the -9999 below-range marker are kept for
    /// fidelity with the source file but never used for interpolation.
    bool usable() const { return f1 > -9000.0; }
};

/// Henke-style atomic scattering factors for one element, energies strictly
/// increasing.
class ScatteringTable {
public:
    static ScatteringTable parse(std::istream& in, std::string element);
    static ScatteringTable load(const std::filesystem::path& file, std::string element);

    const std::string& element() const { return element_; }
    std::span<const ScatteringRow> rows() const { return rows_; }

    struct Factors {
        double f1;
        double f2;
    };

    /// Log-log interpolation of (f1, f2). Exact at tabulated energies.
    /// Throws DomainError outside coverage or when a bracketing row is a gap.
    Factors factors(double energy_keV) const;

    /// True when every energy in [lo, hi] keV is bracketed by usable rows.
    bool covers(double lo_keV, double hi_keV) const;

private:
    ScatteringTable(std::string element, std::vector<ScatteringRow> rows)
        : element_(std::move(element)), rows_(std::move(rows)) {}

    std::string element_;
    std::vector<ScatteringRow> rows_;
};

/// Standard atomic weight (g/mol); throws ConfigError for unknown symbols.
double atomic_mass(std::string_view symbol);

struct Constituent {
    std::string element;
    double count;
    std::shared_ptr<const ScatteringTable> table;
};

class Material {
public:
    Material(std::string name, double density_g_cm3, std::vector<Constituent> constituents);

    /// Empty medium: n = 1 at every energy.
    static Material vacuum();

    const std::string& name() const { return name_; }
    double density() const { return density_; }
    std::span<const Constituent> constituents() const { return constituents_; }
    bool is_vacuum() const { return constituents_.empty(); }

    /// Same composition at another density.
    Material with_density(double density_g_cm3) const;

    bool covers(double lo_keV, double hi_keV) const;

private:
    Material() = default;

    std::string name_;
    double density_ = 0.0;
    std::vector<Constituent> constituents_;
};

/// n = 1 - delta + i beta at one photon energy.
struct OpticalConstants {
    double delta;
    double beta;
    double energy_keV;

    std::complex<double> index() const { return {1.0 - delta, beta}; }
};

OpticalConstants refractive_index(const Material& material, double energy_keV);

/// 1/e intensity attenuation length lambda / (4 pi beta) in meters;
/// +infinity for a non-absorbing medium.
double attenuation_length(const Material& material, double energy_keV);

/// Loads and shares .nff tables from one directory, file names `<symbol>.nff`
/// in lower case.
class TableLibrary {
public:
    explicit TableLibrary(std::filesystem::path directory) : dir_(std::move(directory)) {}

    std::shared_ptr<const ScatteringTable> get(const std::string& element);
    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::shared_ptr<const ScatteringTable>> cache_;
};

/// Parses "Pt:1" or "Si:1,O:2" into (symbol, count) pairs.
std::vector<std::pair<std::string, double>> parse_formula(std::string_view formula);

}  // namespace xhom::materials
