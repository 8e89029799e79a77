#include "xhom/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"

#ifndef XHOM_DEFAULT_DATA_DIR
#define XHOM_DEFAULT_DATA_DIR "data"
#endif

namespace xhom::config {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

std::optional<long> to_long(std::string_view s) {
    long v = 0;
    const auto t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Typed access to one section, recording a diagnostic for every problem.
class Section {
public:
    Section(const pt::ptree* tree, std::string name, std::vector<Diagnostic>& diags)
        : tree_(tree), name_(std::move(name)), diags_(diags) {}

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> text(const std::string& key, bool required = true) {
        seen_.insert(key);
        if (tree_) {
            if (auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '/'))) return trim(*v);
        }
        if (required) fail(key, "missing required key");
        return std::nullopt;
    }

    std::optional<double> number(const std::string& key, std::optional<double> fallback,
                                 double lo, double hi, bool lo_open = false, bool hi_open = false) {
        auto raw = text(key, !fallback.has_value());
        if (!raw) return fallback;
        auto v = to_double(*raw);
        if (!v) {
            fail(key, "not a number: '" + *raw + "'");
            return std::nullopt;
        }
        const bool below = lo_open ? !(*v > lo) : !(*v >= lo);
        const bool above = hi_open ? !(*v < hi) : !(*v <= hi);
        if (below || above) {
            fail(key, fmt(*v) + " outside " + (lo_open ? "(" : "[") + fmt(lo) + ", " + fmt(hi) +
                          (hi_open ? ")" : "]"));
            return std::nullopt;
        }
        return v;
    }

    std::optional<long> integer(const std::string& key, std::optional<long> fallback, long lo, long hi) {
        auto raw = text(key, !fallback.has_value());
        if (!raw) return fallback;
        auto v = to_long(*raw);
        if (!v) {
            fail(key, "not an integer: '" + *raw + "'");
            return std::nullopt;
        }
        if (*v < lo || *v > hi) {
            fail(key, std::to_string(*v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return std::nullopt;
        }
        return v;
    }

    std::optional<bool> boolean(const std::string& key, std::optional<bool> fallback) {
        auto raw = text(key, !fallback.has_value());
        if (!raw) return fallback;
        if (*raw == "true" || *raw == "yes" || *raw == "1") return true;
        if (*raw == "false" || *raw == "no" || *raw == "0") return false;
        fail(key, "expected true or false, got '" + *raw + "'");
        return std::nullopt;
    }

    std::optional<std::string> choice(const std::string& key, const std::string& fallback,
                                      const std::vector<std::string>& allowed) {
        auto raw = text(key, false);
        if (!raw) return fallback;
        for (const auto& a : allowed) {
            if (*raw == a) return raw;
        }
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(key, "'" + *raw + "' is not one of " + list);
        return std::nullopt;
    }

    void fail(const std::string& key, const std::string& message) {
        diags_.push_back({name_ + "." + key, message});
    }

    /// Flags keys that were never asked for (typos).
    void reject_unknown() {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_) {
            if (!seen_.count(key)) fail(key, "unknown key");
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::vector<Diagnostic>& diags_;
    std::set<std::string> seen_;
};

const pt::ptree* find_section(const pt::ptree& root, const std::string& name) {
    auto it = root.find(name);
    return it == root.not_found() ? nullptr : &it->second;
}

DeviceConfig read_device(Section s, const std::string& name,
                         const std::map<std::string, materials::Material>& mats,
                         std::vector<Diagnostic>& diags, bool& ok) {
    DeviceConfig dev;
    dev.name = name;
    if (!s.present()) {
        diags.push_back({name, "missing section [" + name + "]"});
        ok = false;
        return dev;
    }
    auto material = [&](const std::string& key) -> std::optional<materials::Material> {
        auto ref = s.text(key);
        if (!ref) return std::nullopt;
        auto it = mats.find(*ref);
        if (it == mats.end()) {
            s.fail(key, "references undeclared material '" + *ref + "' (add a [material." + *ref + "] section)");
            return std::nullopt;
        }
        return it->second;
    };
    auto absorber = material("absorber");
    auto spacer = material("spacer");
    auto substrate = material("substrate");
    auto n = s.integer("n_bilayers", std::nullopt, 1, 10000);
    auto d = s.number("bilayer_nm", std::nullopt, 0.0, 1e4, true);
    auto gamma = s.number("gamma", 0.5, 0.0, 1.0, true, true);
    auto order = s.integer("bragg_order", 1, 1, 100);
    auto on_top = s.boolean("absorber_on_top", true);
    auto thick = s.number("substrate_um", 0.0, 0.0, 1e6);
    auto semi = s.boolean("semi_infinite", false);
    auto nominal = s.number("nominal_deg", -1.0, -1.0, 90.0);
    s.reject_unknown();

    const bool has_thickness = thick && *thick > 0.0;
    if (semi && *semi && has_thickness) {
        s.fail("substrate_um", "give either substrate_um or semi_infinite = true, not both");
    }
    if (nominal && *nominal == 0.0) s.fail("nominal_deg", "must be > 0");
    if (!(absorber && spacer && substrate && n && d && gamma && order && on_top && thick && semi && nominal)) {
        ok = false;
        return dev;
    }
    dev.design = multilayer::MultilayerDesign{*absorber, *spacer, *substrate, static_cast<int>(*n),
                                              *d * 1e-9, *gamma, std::nullopt,
                                              static_cast<int>(*order), *on_top};
    if (has_thickness) dev.design.substrate_m = *thick * 1e-6;
    if (*nominal > 0.0) dev.nominal_rad = *nominal * constants::deg;
    return dev;
}

ValidationResult validate_tree(const pt::ptree& root, const std::string& bytes,
                               std::optional<std::filesystem::path> table_dir) {
    ValidationResult result;
    auto& diags = result.diagnostics;
    RunConfig cfg;
    cfg.digest = sha256_hex(bytes);
    cfg.table_dir = table_dir ? *table_dir : default_table_dir();
    bool ok = true;
    bool source_ok = true;  // pump, crystal and detector parsed

    static const std::set<std::string> known = {"pump", "crystal", "detector", "geometry", "quadrature",
                                                "output", "mirror_s", "mirror_i", "beam_splitter"};
    for (const auto& [name, child] : root) {
        if (!known.count(name) && name.rfind("material.", 0) != 0) {
            diags.push_back({name, "unknown section [" + name + "]"});
        }
        if (child.empty() && !child.data().empty()) {
            diags.push_back({name, "key outside any section"});
        }
    }

    {
        Section s(find_section(root, "pump"), "pump", diags);
        auto e = s.number("energy_keV", std::nullopt, 0.0, 1e3, true);
        auto dev = s.number("deviation_mdeg", 0.0, -1e4, 1e4);
        auto rate = s.number("rate_per_s", 0.0, 0.0, 1e30);
        auto area = s.number("area_mm2", std::nullopt, 0.0, 1e6, true);
        auto pol = s.choice("polarization", "in_plane", {"in_plane", "out_of_plane"});
        s.reject_unknown();
        if (e && dev && rate && area && pol) {
            cfg.pump.energy_keV = *e;
            cfg.pump.deviation_rad = *dev * 1e-3 * constants::deg;
            cfg.pump.rate_per_s = *rate;
            cfg.pump.area_m2 = *area * 1e-6;
            cfg.pump.polarization = *pol == "in_plane" ? spdc::Polarization::InPlane : spdc::Polarization::OutOfPlane;
        } else {
            source_ok = false;
        }
    }
    {
        Section s(find_section(root, "crystal"), "crystal", diags);
        auto material = s.text("material", false);
        auto l = s.number("thickness_mm", std::nullopt, 0.0, 1e4, true);
        auto a = s.number("lattice_A", std::nullopt, 0.0, 1e3, true);
        auto hkl = s.text("hkl");
        auto kappa = s.text("kappa_per_m");
        s.reject_unknown();
        bool good = l && a && hkl && kappa;
        if (hkl) {
            auto parts = split_ws(*hkl);
            std::vector<long> idx;
            for (const auto& p : parts) {
                if (auto v = to_long(p)) idx.push_back(*v);
            }
            if (parts.size() != 3 || idx.size() != 3) {
                s.fail("hkl", "expected three integers, got '" + *hkl + "'");
                good = false;
            } else if (idx[0] == 0 && idx[1] == 0 && idx[2] == 0) {
                s.fail("hkl", "(000) is not a reflection");
                good = false;
            } else {
                cfg.crystal.hkl = {static_cast<int>(idx[0]), static_cast<int>(idx[1]), static_cast<int>(idx[2])};
            }
        }
        if (kappa) {
            auto parts = split_ws(*kappa);
            std::vector<double> v;
            for (const auto& p : parts) {
                if (auto x = to_double(p)) v.push_back(*x);
            }
            if (v.empty() || v.size() != parts.size() || v.size() > 2) {
                s.fail("kappa_per_m", "expected '<re>' or '<re> <im>', got '" + *kappa + "'");
                good = false;
            } else {
                cfg.crystal.kappa_per_m = {v[0], v.size() > 1 ? v[1] : 0.0};
            }
        }
        if (good) {
            cfg.crystal.material = material ? *material : "diamond";
            cfg.crystal.thickness_m = *l * 1e-3;
            cfg.crystal.lattice_m = *a * 1e-10;
        } else {
            source_ok = false;
        }
    }
    {
        Section s(find_section(root, "detector"), "detector", diags);
        auto ap = s.number("aperture_deg", std::nullopt, 0.0, 10.0);
        s.reject_unknown();
        if (ap) cfg.aperture_rad = *ap * constants::deg;
        else source_ok = false;
    }

    // Materials first so devices can reference them.
    materials::TableLibrary library(cfg.table_dir);
    for (const auto& [name, child] : root) {
        if (name.rfind("material.", 0) != 0) continue;
        const std::string label = name.substr(9);
        Section s(&child, name, diags);
        auto formula = s.text("formula", false);
        auto density = s.number("density_g_cm3", std::nullopt, 0.0, 100.0, true);
        s.reject_unknown();
        if (label.empty()) {
            diags.push_back({name, "material section needs a name, e.g. [material.Pt]"});
            continue;
        }
        if (!density) continue;
        try {
            std::vector<materials::Constituent> parts;
            for (const auto& [symbol, count] : materials::parse_formula(formula ? *formula : label + ":1")) {
                parts.push_back({symbol, count, library.get(symbol)});
            }
            cfg.materials.emplace(label, materials::Material(label, *density, std::move(parts)));
        } catch (const std::exception& e) {
            s.fail(formula ? "formula" : "density_g_cm3", e.what());
        }
    }

    cfg.mirror_s = read_device(Section(find_section(root, "mirror_s"), "mirror_s", diags), "mirror_s",
                               cfg.materials, diags, ok);
    cfg.mirror_i = read_device(Section(find_section(root, "mirror_i"), "mirror_i", diags), "mirror_i",
                               cfg.materials, diags, ok);
    cfg.beam_splitter = read_device(Section(find_section(root, "beam_splitter"), "beam_splitter", diags),
                                    "beam_splitter", cfg.materials, diags, ok);
    {
        Section s(find_section(root, "geometry"), "geometry", diags);
        auto front = s.boolean("signal_on_front", true);
        auto pol = s.choice("polarization", "auto", {"auto", "s", "p"});
        s.reject_unknown();
        if (front) cfg.signal_on_front = *front;
        if (pol) {
            const bool in_plane = cfg.pump.polarization == spdc::Polarization::InPlane;
            cfg.device_polarization = (*pol == "p" || (*pol == "auto" && in_plane)) ? multilayer::Polarization::P
                                                                                    : multilayer::Polarization::S;
        }
    }
    {
        Section s(find_section(root, "quadrature"), "quadrature", diags);
        auto grid = s.text("grid", false);
        s.reject_unknown();
        if (grid) {
            try {
                cfg.grid = parse_grid(*grid);
            } catch (const ConfigError& e) {
                s.fail("grid", e.what());
            }
        }
    }
    {
        Section s(find_section(root, "output"), "output", diags);
        auto dir = s.text("dir", false);
        s.reject_unknown();
        if (dir) cfg.output_dir = *dir;
    }

    // Cross-checks that need the source and the optics.
    if (source_ok) {
        try {
            const double theta0 =
                spdc::solve_phase_matching(cfg.pump, cfg.crystal, cfg.degenerate_energy()).theta_signal;
            if (!(theta0 - 0.5 * cfg.aperture_rad > 0.0)) {
                diags.push_back({"detector.aperture_deg", "aperture wider than twice the emission angle " +
                                                              fmt(theta0 / constants::deg) + " deg"});
            } else if (cfg.aperture_rad > 0.0) {
                const auto win = quadrature::energy_breakpoints(
                    cfg.pump, cfg.crystal, {cfg.aperture_rad, quadrature::Acceptance::SignalOnly});
                const double lo = std::min(win.front(), cfg.pump.energy_keV - win.back());
                const double hi = std::max(win.back(), cfg.pump.energy_keV - win.front());
                for (const auto& [label, mat] : cfg.materials) {
                    if (!mat.covers(lo, hi)) {
                        diags.push_back({"material." + label,
                                         "scattering table of '" + label + "' does not cover " + fmt(lo) + "-" +
                                             fmt(hi) + " keV, the photon energies accepted at pump " +
                                             fmt(cfg.pump.energy_keV) + " keV"});
                    }
                }
            }
        } catch (const DomainError& e) {
            diags.push_back({"crystal", std::string("phase matching: ") + e.what()});
        }
    }
    ok = ok && source_ok;
    if (ok) {
        for (const DeviceConfig* dev : {&cfg.mirror_s, &cfg.mirror_i, &cfg.beam_splitter}) {
            try {
                dev->design.validate();
                (void)cfg.nominal_angle(*dev);
            } catch (const std::exception& e) {
                diags.push_back({dev->name, e.what()});
            }
        }
    }

    if (ok && diags.empty()) result.config = std::move(cfg);
    return result;
}

}  // namespace

std::string format(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) out += d.key + ": " + d.message + "\n";
    return out;
}

const DeviceConfig& RunConfig::device(const std::string& name) const {
    if (name == "mirror_s") return mirror_s;
    if (name == "mirror_i") return mirror_i;
    if (name == "beam_splitter") return beam_splitter;
    throw ConfigError("unknown device '" + name + "' (expected mirror_s, mirror_i or beam_splitter)");
}

double RunConfig::nominal_angle(const DeviceConfig& dev) const {
    if (dev.nominal_rad) return *dev.nominal_rad;
    return multilayer::bragg_corrected_angle(dev.design, degenerate_energy());
}

hom::BenchGeometry RunConfig::geometry() const {
    hom::BenchGeometry g;
    g.mirror_s_rad = nominal_angle(mirror_s);
    g.mirror_i_rad = nominal_angle(mirror_i);
    g.splitter_rad = nominal_angle(beam_splitter);
    g.axis_angle_rad = spdc::solve_phase_matching(pump, crystal, degenerate_energy()).theta_signal;
    g.signal_on_front = signal_on_front;
    g.aperture = {aperture_rad, quadrature::Acceptance::Pair};
    return g;
}

hom::Devices RunConfig::devices() const {
    return {hom::multilayer_device("mirror_s", mirror_s.design.build(), device_polarization),
            hom::multilayer_device("mirror_i", mirror_i.design.build(), device_polarization),
            hom::multilayer_device("beam_splitter", beam_splitter.design.build(), device_polarization)};
}

ValidationResult validate_text(const std::string& text, std::optional<std::filesystem::path> table_dir) {
    pt::ptree root;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    return validate_tree(root, text, std::move(table_dir));
}

ValidationResult validate_file(const std::filesystem::path& path, std::optional<std::filesystem::path> table_dir) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream bytes;
    bytes << in.rdbuf();
    try {
        return validate_text(bytes.str(), std::move(table_dir));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

RunConfig load(const std::filesystem::path& path, std::optional<std::filesystem::path> table_dir) {
    auto r = validate_file(path, std::move(table_dir));
    if (!r.ok()) throw ConfigError(path.string() + " is invalid:\n" + format(r.diagnostics));
    return std::move(*r.config);
}

quadrature::GridDims parse_grid(const std::string& text) {
    std::vector<long> v;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('x', start);
        const auto part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        auto n = to_long(part);
        if (!n) throw ConfigError("grid '" + text + "' is not of the form <energy>x<azimuth>x<radial>");
        v.push_back(*n);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (v.size() != 3) throw ConfigError("grid '" + text + "' is not of the form <energy>x<azimuth>x<radial>");
    for (long n : v) {
        if (n < 2 || n > 100000) throw ConfigError("grid '" + text + "': each count must be in [2, 100000]");
    }
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::filesystem::path default_table_dir() {
    if (const char* env = std::getenv(table_dir_env); env && *env) return env;
    return XHOM_DEFAULT_DATA_DIR;
}

}  // namespace xhom::config
