#include "xhom/materials.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "xhom/constants.hpp"

namespace xhom::materials {

namespace {

bool parse_double(std::string_view token, double& out) {
    // std::from_chars for double is available in libstdc++ >= 11.
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

double interpolate_column(double e0, double e1, double y0, double y1, double e) {
    if (y0 > 0.0 && y1 > 0.0) {
        const double t = std::log(e / e0) / std::log(e1 / e0);
        return std::exp(std::log(y0) + t * (std::log(y1) - std::log(y0)));
    }
    // Sign change or zero (low-energy f1, vanishing f2): linear in log E.
    const double t = std::log(e / e0) / std::log(e1 / e0);
    return y0 + t * (y1 - y0);
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ScatteringTable ScatteringTable::parse(std::istream& in, std::string element) {
    std::vector<ScatteringRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) continue;  // header
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;) tokens.push_back(tok);
        if (tokens.empty()) continue;
        if (tokens.size() != 3) {
            throw TableParseError(element + " table: line " + std::to_string(line_no) +
                                      ": expected 3 columns, got " + std::to_string(tokens.size()),
                                  line_no);
        }
        ScatteringRow row{};
        if (!parse_double(tokens[0], row.energy_eV) || !parse_double(tokens[1], row.f1) ||
            !parse_double(tokens[2], row.f2)) {
            throw TableParseError(element + " table: line " + std::to_string(line_no) +
                                      ": malformed number in '" + trim(line) + "'",
                                  line_no);
        }
        if (!rows.empty() && row.energy_eV <= rows.back().energy_eV) {
            throw TableParseError(element + " table: line " + std::to_string(line_no) +
                                      ": energies not strictly increasing",
                                  line_no);
        }
        if (row.f2 < 0.0) {
            throw TableParseError(element + " table: line " + std::to_string(line_no) +
                                      ": negative f2",
                                  line_no);
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw TableParseError(element + " table: no data rows", line_no);
    return ScatteringTable(std::move(element), std::move(rows));
}

ScatteringTable ScatteringTable::load(const std::filesystem::path& file, std::string element) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open scattering table " + file.string());
    return parse(in, std::move(element));
}

ScatteringTable::Factors ScatteringTable::factors(double energy_keV) const {
    const double e = energy_keV * 1e3;
    auto it = std::lower_bound(rows_.begin(), rows_.end(), e,
                               [](const ScatteringRow& r, double v) { return r.energy_eV < v; });
    if (it != rows_.end() && it->energy_eV == e) {
        if (!it->usable()) {
            throw DomainError(element_ + ": tabulated row at " + std::to_string(energy_keV) +
                              " keV is flagged unusable");
        }
        return {it->f1, it->f2};
    }
    if (it == rows_.begin() || it == rows_.end()) {
        throw DomainError(element_ + ": energy " + std::to_string(energy_keV) +
                          " keV outside table coverage");
    }
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (!lo.usable() || !hi.usable()) {
        throw DomainError(element_ + ": energy " + std::to_string(energy_keV) +
                          " keV bracketed by a flagged gap row");
    }
    return {interpolate_column(lo.energy_eV, hi.energy_eV, lo.f1, hi.f1, e),
            interpolate_column(lo.energy_eV, hi.energy_eV, lo.f2, hi.f2, e)};
}

bool ScatteringTable::covers(double lo_keV, double hi_keV) const {
    const double lo = lo_keV * 1e3;
    const double hi = hi_keV * 1e3;
    if (rows_.front().energy_eV > lo || rows_.back().energy_eV < hi) return false;
    auto first = std::upper_bound(rows_.begin(), rows_.end(), lo,
                                  [](double v, const ScatteringRow& r) { return v < r.energy_eV; });
    auto last = std::lower_bound(rows_.begin(), rows_.end(), hi,
                                 [](const ScatteringRow& r, double v) { return r.energy_eV < v; });
    return std::all_of(first - 1, last + 1, [](const ScatteringRow& r) { return r.usable(); });
}

double atomic_mass(std::string_view symbol) {
    static const std::map<std::string, double, std::less<>> masses = {
        {"H", 1.008},     {"He", 4.0026},   {"Li", 6.94},     {"Be", 9.0122},
        {"B", 10.81},     {"C", 12.011},    {"N", 14.007},    {"O", 15.999},
        {"F", 18.998},    {"Na", 22.990},   {"Mg", 24.305},   {"Al", 26.982},
        {"Si", 28.0855},  {"P", 30.974},    {"S", 32.06},     {"Ti", 47.867},
        {"V", 50.942},    {"Cr", 51.996},   {"Mn", 54.938},   {"Fe", 55.845},
        {"Co", 58.933},   {"Ni", 58.693},   {"Cu", 63.546},   {"Zn", 65.38},
        {"Ge", 72.630},   {"Zr", 91.224},   {"Nb", 92.906},   {"Mo", 95.95},
        {"Ru", 101.07},   {"Rh", 102.91},   {"Pd", 106.42},   {"Ag", 107.87},
        {"Ta", 180.95},   {"W", 183.84},    {"Re", 186.21},   {"Os", 190.23},
        {"Ir", 192.22},   {"Pt", 195.084},  {"Au", 196.97},   {"Pb", 207.2},
    };
    auto it = masses.find(symbol);
    if (it == masses.end()) throw ConfigError("unknown element symbol '" + std::string(symbol) + "'");
    return it->second;
}

Material::Material(std::string name, double density_g_cm3, std::vector<Constituent> constituents)
    : name_(std::move(name)), density_(density_g_cm3), constituents_(std::move(constituents)) {
    if (!(density_ > 0.0)) throw ConfigError("material " + name_ + ": density must be > 0");
    if (constituents_.empty()) throw ConfigError("material " + name_ + ": no elements");
    for (const auto& c : constituents_) {
        if (!(c.count > 0.0)) {
            throw ConfigError("material " + name_ + ": count of " + c.element + " must be > 0");
        }
        if (!c.table) throw ConfigError("material " + name_ + ": no table for " + c.element);
        atomic_mass(c.element);
    }
}

Material Material::vacuum() {
    Material m;
    m.name_ = "vacuum";
    return m;
}

Material Material::with_density(double density_g_cm3) const {
    if (is_vacuum()) return *this;
    return Material(name_, density_g_cm3, constituents_);
}

bool Material::covers(double lo_keV, double hi_keV) const {
    return std::all_of(constituents_.begin(), constituents_.end(),
                       [&](const Constituent& c) { return c.table->covers(lo_keV, hi_keV); });
}

OpticalConstants refractive_index(const Material& material, double energy_keV) {
    if (material.is_vacuum()) return {0.0, 0.0, energy_keV};

    double formula_mass = 0.0;
    for (const auto& c : material.constituents()) formula_mass += c.count * atomic_mass(c.element);
    // formula units per m^3
    const double units = material.density() * 1e6 * constants::avogadro / formula_mass;

    double sum_f1 = 0.0;
    double sum_f2 = 0.0;
    for (const auto& c : material.constituents()) {
        const auto f = c.table->factors(energy_keV);
        sum_f1 += c.count * f.f1;
        sum_f2 += c.count * f.f2;
    }
    const double lambda = constants::wavelength_m(energy_keV);
    const double scale = constants::electron_radius_m * lambda * lambda * units / (2.0 * constants::pi);
    return {scale * sum_f1, scale * sum_f2, energy_keV};
}

double attenuation_length(const Material& material, double energy_keV) {
    const auto oc = refractive_index(material, energy_keV);
    if (oc.beta <= 0.0) return std::numeric_limits<double>::infinity();
    return constants::wavelength_m(energy_keV) / (4.0 * constants::pi * oc.beta);
}

std::shared_ptr<const ScatteringTable> TableLibrary::get(const std::string& element) {
    if (auto it = cache_.find(element); it != cache_.end()) return it->second;
    std::string lower = element;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    auto table = std::make_shared<const ScatteringTable>(
        ScatteringTable::load(dir_ / (lower + ".nff"), element));
    cache_.emplace(element, table);
    return table;
}

std::vector<std::pair<std::string, double>> parse_formula(std::string_view formula) {
    std::vector<std::pair<std::string, double>> out;
    std::string text(formula);
    std::istringstream parts(text);
    for (std::string part; std::getline(parts, part, ',');) {
        part = trim(part);
        if (part.empty()) throw ConfigError("empty element in formula '" + text + "'");
        double count = 1.0;
        std::string symbol = part;
        if (auto colon = part.find(':'); colon != std::string::npos) {
            symbol = trim(part.substr(0, colon));
            if (!parse_double(trim(part.substr(colon + 1)), count)) {
                throw ConfigError("bad count in formula '" + text + "'");
            }
        }
        atomic_mass(symbol);
        out.emplace_back(symbol, count);
    }
    if (out.empty()) throw ConfigError("empty formula");
    return out;
}

}  // namespace xhom::materials
