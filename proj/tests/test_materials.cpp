#include <doctest.h>

#include <cmath>
#include <sstream>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"
#include "xhom/materials.hpp"

using namespace xhom;
using materials::ScatteringTable;

namespace {

materials::TableLibrary& library() {
    static materials::TableLibrary lib(XHOM_TEST_DATA_DIR);
    return lib;
}

materials::Material element(const std::string& symbol, double density) {
    return materials::Material(symbol, density, {{symbol, 1.0, library().get(symbol)}});
}

}  // namespace

TEST_CASE("two-row table parses and interpolates log-log") {
    std::istringstream in("E(eV)\tf1\tf2\n1000.0\t2.0\t0.5\n4000.0\t8.0\t0.125\n");
    const auto t = ScatteringTable::parse(in, "X");
    REQUIRE(t.rows().size() == 2);
    CHECK(t.rows()[1].f1 == 8.0);

    // exact at nodes
    CHECK(t.factors(1.0).f1 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(t.factors(4.0).f2 == doctest::Approx(0.125).epsilon(1e-15));

    // geometric midpoint of a power law: f1 ~ E, f2 ~ E^-1
    const auto mid = t.factors(2.0);
    CHECK(mid.f1 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mid.f2 == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(t.factors(0.5), DomainError);
    CHECK_THROWS_AS(t.factors(4.5), DomainError);
}

TEST_CASE("malformed rows report their line") {
    std::istringstream bad("E(eV) f1 f2\n10 1 1\n20 1 oops\n");
    try {
        ScatteringTable::parse(bad, "X");
        FAIL("expected a parse error");
    } catch (const materials::TableParseError& e) {
        CHECK(e.line() == 3);
    }

    std::istringstream order("E(eV) f1 f2\n10 1 1\n10 1 1\n");
    CHECK_THROWS_AS(ScatteringTable::parse(order, "X"), materials::TableParseError);

    std::istringstream columns("E(eV) f1 f2\n10 1\n");
    CHECK_THROWS_AS(ScatteringTable::parse(columns, "X"), materials::TableParseError);

    std::istringstream negative("E(eV) f1 f2\n10 1 -1\n");
    CHECK_THROWS_AS(ScatteringTable::parse(negative, "X"), materials::TableParseError);

    std::istringstream empty("E(eV) f1 f2\n");
    CHECK_THROWS_AS(ScatteringTable::parse(empty, "X"), materials::TableParseError);
}

TEST_CASE("carbon table spot rows") {
    const auto c = library().get("C");
    CHECK(c->rows().front().energy_eV == 10.0);
    CHECK_FALSE(c->rows().front().usable());
    CHECK(c->rows().back().energy_eV == 30000.0);

    const auto f = c->factors(10.4045);
    CHECK(f.f1 == doctest::Approx(6.01168).epsilon(1e-12));
    CHECK(f.f2 == doctest::Approx(0.538276e-2).epsilon(1e-12));

    // gap rows at the low end are never interpolated across
    CHECK_THROWS_AS(c->factors(0.0101), DomainError);
    CHECK(c->covers(8.0, 22.0));
    CHECK_FALSE(c->covers(8.0, 31.0));
    CHECK_FALSE(c->covers(0.010, 1.0));
}

TEST_CASE("optical constants at 10.5 keV match the numpy oracle") {
    // tests/oracles/optical_constants.py
    struct Case {
        const char* symbol;
        double density;
        double delta;
        double beta;
        double att_um;
    };
    const Case cases[] = {
        {"Pt", 21.45, 2.9520947199e-05, 1.9514863708e-06, 4.815059},
        {"C", 2.26, 4.2595799496e-06, 3.7352626200e-09, 2515.625653},
        {"Si", 2.33, 4.4304584266e-06, 6.0647849124e-08, 154.935791},
    };
    for (const auto& c : cases) {
        CAPTURE(c.symbol);
        const auto m = element(c.symbol, c.density);
        const auto n = materials::refractive_index(m, 10.5);
        CHECK(n.delta == doctest::Approx(c.delta).epsilon(1e-9));
        CHECK(n.beta == doctest::Approx(c.beta).epsilon(1e-9));
        CHECK(materials::attenuation_length(m, 10.5) * 1e6 == doctest::Approx(c.att_um).epsilon(1e-6));
    }
}

TEST_CASE("15 um substrate is ten times thinner than the Si attenuation length") {
    const auto si = element("Si", 2.33);
    CHECK(materials::attenuation_length(si, 10.5) > 150e-6);
}

TEST_CASE("formula units and formula parsing") {
    // Si2 at the same mass density has the same atom density as Si.
    const materials::Material si2("Si2", 2.33, {{"Si", 2.0, library().get("Si")}});
    const auto si = element("Si", 2.33);
    CHECK(materials::refractive_index(si2, 10.5).delta ==
          doctest::Approx(materials::refractive_index(si, 10.5).delta).epsilon(1e-14));

    CHECK_THROWS_AS(materials::Material("bad", 2.2, {{"O", 2.0, nullptr}}), ConfigError);
    CHECK_THROWS_AS(materials::Material("bad", -1.0, {{"Si", 1.0, library().get("Si")}}), ConfigError);

    const auto parts = materials::parse_formula("Si:1,O:2");
    REQUIRE(parts.size() == 2);
    CHECK(parts[1].first == "O");
    CHECK(parts[1].second == 2.0);
    CHECK_THROWS_AS(materials::parse_formula("Si:x"), ConfigError);
    CHECK_THROWS_AS(materials::atomic_mass("Xx"), ConfigError);
}

TEST_CASE("vacuum and scaling") {
    const auto vac = materials::Material::vacuum();
    CHECK(vac.is_vacuum());
    const auto n = materials::refractive_index(vac, 10.5);
    CHECK(n.delta == 0.0);
    CHECK(std::isinf(materials::attenuation_length(vac, 10.5)));

    const auto pt = element("Pt", 21.45);
    const auto half = pt.with_density(21.45 / 2);
    CHECK(materials::refractive_index(half, 10.5).delta ==
          doctest::Approx(0.5 * materials::refractive_index(pt, 10.5).delta).epsilon(1e-14));
}
