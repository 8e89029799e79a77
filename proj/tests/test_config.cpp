#include <doctest.h>

#include <fstream>
#include <sstream>

#include "xhom/config.hpp"
#include "xhom/constants.hpp"
#include "xhom/errors.hpp"
#include "xhom/pipeline.hpp"

using namespace xhom;

namespace {

const std::string golden_path = XHOM_SOURCE_DIR "/configs/reference.ini";

std::string golden() {
    std::ifstream in(golden_path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Replace the first occurrence of `from` after the line `[section]`.
std::string edit(std::string text, const std::string& section, const std::string& from, const std::string& to) {
    const auto at = text.find("[" + section + "]");
    REQUIRE(at != std::string::npos);
    const auto pos = text.find(from, at);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

config::ValidationResult check(const std::string& text) {
    return config::validate_text(text, XHOM_TEST_DATA_DIR);
}

bool has_key(const config::ValidationResult& r, const std::string& key) {
    for (const auto& d : r.diagnostics)
        if (d.key == key) return true;
    return false;
}

bool mentions(const config::ValidationResult& r, const std::string& text) {
    return config::format(r.diagnostics).find(text) != std::string::npos;
}

}  // namespace

TEST_CASE("golden configuration") {
    const auto r = config::validate_file(golden_path, XHOM_TEST_DATA_DIR);
    CHECK(r.diagnostics.empty());
    REQUIRE(r.ok());
    const auto& c = *r.config;
    CHECK(c.pump.energy_keV == 21.0);
    CHECK(c.pump.deviation_rad == doctest::Approx(8e-3 * constants::deg));
    CHECK(c.pump.area_m2 == doctest::Approx(0.4e-6));
    CHECK(c.crystal.thickness_m == doctest::Approx(0.8e-3));
    CHECK(c.crystal.hkl.h == 6);
    CHECK(c.crystal.hkl.l == 0);
    CHECK(c.crystal.lattice_m == doctest::Approx(3.567e-10));
    CHECK(c.crystal.kappa_per_m == std::complex<double>(1e-19, 0.0));
    CHECK(c.aperture_rad == doctest::Approx(0.4 * constants::deg));
    CHECK(c.device_polarization == multilayer::Polarization::P);
    CHECK(c.grid.energy == 96);
    CHECK(c.beam_splitter.design.substrate_m.value() == doctest::Approx(15e-6));
    CHECK_FALSE(c.mirror_s.design.substrate_m.has_value());
    CHECK(c.digest == config::sha256_hex(golden()));

    const auto geo = c.geometry();
    CHECK(geo.aperture.acceptance == quadrature::Acceptance::Pair);
    CHECK(geo.mirror_s_rad / constants::deg == doctest::Approx(0.97306).epsilon(1e-5));
    CHECK(geo.signal_on_front);
    CHECK(&c.device("beam_splitter") == &c.beam_splitter);
    CHECK_THROWS_AS(c.device("prism"), ConfigError);
}

TEST_CASE("out-of-range values are diagnosed by key") {
    const auto r = check(edit(golden(), "mirror_s", "gamma = 0.5", "gamma = 1.3"));
    CHECK_FALSE(r.ok());
    CHECK(has_key(r, "mirror_s.gamma"));
    CHECK_THROWS_AS(config::load(golden_path + ".missing"), IoError);
}

TEST_CASE("every violation is reported") {
    auto text = edit(golden(), "mirror_s", "gamma = 0.5", "gamma = 0");
    text = edit(text, "crystal", "thickness_mm = 0.8", "thickness_mm = -1");
    text = edit(text, "beam_splitter", "n_bilayers = 10", "n_bilayers = 2.5");
    text = edit(text, "pump", "polarization = in_plane", "polarization = diagonal");
    const auto r = check(text);
    CHECK(has_key(r, "mirror_s.gamma"));
    CHECK(has_key(r, "crystal.thickness_mm"));
    CHECK(has_key(r, "beam_splitter.n_bilayers"));
    CHECK(has_key(r, "pump.polarization"));
    CHECK(r.diagnostics.size() >= 4);
}

TEST_CASE("scattering tables must cover the accepted photon energies") {
    const auto r = check(edit(golden(), "pump", "energy_keV = 21", "energy_keV = 80"));
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "does not cover"));
    CHECK(mentions(r, "pump 80 keV"));
}

TEST_CASE("geometry cross-checks") {
    SUBCASE("aperture wider than the emission cone") {
        const auto r = check(edit(golden(), "detector", "aperture_deg = 0.4", "aperture_deg = 2.5"));
        CHECK(has_key(r, "detector.aperture_deg"));
    }
    SUBCASE("no phase matching below the Bragg cutoff") {
        const auto r = check(edit(golden(), "pump", "energy_keV = 21", "energy_keV = 5"));
        CHECK_FALSE(r.ok());
    }
    SUBCASE("undefined material") {
        const auto r = check(edit(golden(), "mirror_i", "absorber = Pt", "absorber = W"));
        CHECK_FALSE(r.ok());
        CHECK(mentions(r, "W"));
    }
    SUBCASE("explicit nominal angle") {
        const auto r = check(edit(golden(), "mirror_i", "gamma = 0.5", "gamma = 0.5\nnominal_deg = 1.0"));
        REQUIRE(r.ok());
        CHECK(r.config->geometry().mirror_i_rad == doctest::Approx(1.0 * constants::deg));
    }
    SUBCASE("polarization override") {
        const auto r = check(edit(golden(), "geometry", "polarization = auto", "polarization = s"));
        REQUIRE(r.ok());
        CHECK(r.config->device_polarization == multilayer::Polarization::S);
    }
}

TEST_CASE("structural problems") {
    SUBCASE("unknown key") {
        const auto r = check(edit(golden(), "pump", "rate_per_s", "rate_per_hour = 1\nrate_per_s"));
        CHECK(has_key(r, "pump.rate_per_hour"));
    }
    SUBCASE("unknown section") {
        CHECK_FALSE(check(golden() + "\n[lens]\nfocal_mm = 3\n").ok());
    }
    SUBCASE("missing section") {
        const auto text = golden();
        const auto at = text.find("[detector]");
        const auto end = text.find("[material.Pt]");
        CHECK(has_key(check(text.substr(0, at) + text.substr(end)), "detector.aperture_deg"));
    }
    SUBCASE("syntax error names the line") {
        auto text = edit(golden(), "crystal", "[crystal]", "[crystal");
        try {
            check(text);
            FAIL("expected a syntax error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 10") != std::string::npos);
        }
    }
}

TEST_CASE("grid and range syntax") {
    const auto g = config::parse_grid("192x96x48");
    CHECK(g.energy == 192);
    CHECK(g.azimuth == 96);
    CHECK(g.radial == 48);
    for (const char* bad : {"96x48", "96x48x1", "axbxc", "96x48x24x2", "-4x4x4", ""}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(config::parse_grid(bad), ConfigError);
    }

    const auto r = pipeline::parse_range("-3:3:401");
    CHECK(r.lo == -3.0);
    CHECK(r.hi == 3.0);
    CHECK(r.n == 401);
    for (const char* bad : {"3:-3:10", "0:1:1", "0:1", "a:b:c", "0:1:2.5"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(pipeline::parse_range(bad), ConfigError);
    }
}

TEST_CASE("SHA-256 digest") {
    CHECK(config::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(config::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
