#include <doctest.h>

#include <cmath>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"
#include "xhom/quadrature.hpp"
#include "xhom/spdc.hpp"
#include "xhom/spectrum.hpp"

using namespace xhom;
using namespace xhom::spdc;

namespace {

PumpConfig pump() {
    PumpConfig p;
    p.energy_keV = 21.0;
    p.deviation_rad = 8e-3 * constants::deg;
    p.rate_per_s = 1e13;
    p.area_m2 = 0.4e-6;
    return p;
}

CrystalConfig diamond() {
    CrystalConfig c;
    c.thickness_m = 0.8e-3;
    c.hkl = {6, 6, 0};
    c.lattice_m = 3.567e-10;
    c.kappa_per_m = {1e-19, 0.0};
    return c;
}

quadrature::Aperture aperture(double deg = 0.4) {
    return {deg * constants::deg, quadrature::Acceptance::SignalOnly};
}

double rate(const PumpConfig& p, const CrystalConfig& c, quadrature::GridDims dims = {48, 24, 16}) {
    return total_rate(p, c, quadrature::build_grid(p, c, aperture(), dims));
}

}  // namespace

TEST_CASE("reciprocal lattice and pump Bragg angle") {
    // triangle-closure oracle (tests/oracles/phase_matching.py)
    CHECK(reciprocal_lattice_vector(diamond()) == doctest::Approx(1.494662048161e11).epsilon(1e-11));
    CHECK(pump_bragg_angle(pump(), diamond()) / constants::deg == doctest::Approx(44.606294826972).epsilon(1e-11));
    CHECK(axis_wavevector(pump(), diamond()) == doctest::Approx(1.064074917289e11).epsilon(1e-10));

    auto low = pump();
    low.energy_keV = 5.0;
    CHECK_THROWS_AS(pump_bragg_angle(low, diamond()), DomainError);
}

TEST_CASE("signal angles on the phase-matching ring") {
    const struct {
        double energy, deg;
    } oracle[] = {{9.0, 1.105556395959},  {10.0, 1.004163161081}, {10.2, 0.985187720159},
                  {10.5, 0.957427855168}, {11.0, 0.912867489495}, {12.0, 0.829144784747}};
    for (const auto& o : oracle) {
        CAPTURE(o.energy);
        const auto s = solve_phase_matching(pump(), diamond(), o.energy);
        CHECK(s.theta_signal / constants::deg == doctest::Approx(o.deg).epsilon(1e-8));
        CHECK(s.theta_idler < 0.0);

        // the reported angle closes the ring: dkz vanishes there
        const double q = constants::wavenumber(o.energy) * std::sin(s.theta_signal);
        const double dk = delta_kz({q, 0.0, o.energy}, pump(), diamond());
        CHECK(std::abs(dk) < 1e-6 * axis_wavevector(pump(), diamond()) * 1e-6);
        // and the idler carries the opposite transverse momentum
        const double qi = constants::wavenumber(21.0 - o.energy) * std::sin(-s.theta_idler);
        CHECK(qi == doctest::Approx(q).epsilon(1e-10));
    }
}

TEST_CASE("emission angle decreases monotonically with signal energy") {
    double previous = 1.0;
    for (double e = 7.0; e <= 14.0; e += 0.25) {
        const double t = solve_phase_matching(pump(), diamond(), e).theta_signal;
        CHECK(t < previous);
        previous = t;
    }
}

TEST_CASE("mismatch is symmetric under signal-idler exchange") {
    for (double e : {8.0, 9.3, 10.5, 11.7}) {
        for (double q : {0.0, 1e8, 9e8, 2e9}) {
            const double a = delta_kz({q * 0.6, q * 0.8, e}, pump(), diamond());
            const double b = delta_kz({-q * 0.6, -q * 0.8, 21.0 - e}, pump(), diamond());
            CHECK(a == doctest::Approx(b).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("mismatch slope matches finite differences") {
    const double e = 10.2;
    const double ks = constants::wavenumber(e), ki = constants::wavenumber(21.0 - e);
    for (double q : {5e8, 8e8, 1e9}) {
        const double h = 1e3;
        const double fd = (delta_kz({q + h, 0.0, e}, pump(), diamond()) - delta_kz({q - h, 0.0, e}, pump(), diamond())) / (2 * h);
        const double analytic = q / std::sqrt(ks * ks - q * q) + q / std::sqrt(ki * ki - q * q);
        CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
        // rotating q about the axis leaves the mismatch unchanged
        const double rotated = delta_kz({q * std::cos(0.3), q * std::sin(0.3), e}, pump(), diamond());
        CHECK(rotated == doctest::Approx(delta_kz({q, 0.0, e}, pump(), diamond())).epsilon(1e-9));
    }
}

TEST_CASE("sinc and the biphoton amplitude") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(1e-9) == doctest::Approx(1.0));
    CHECK(sinc(constants::pi) == doctest::Approx(0.0).scale(1.0));
    CHECK(sinc(-2.0) == doctest::Approx(std::sin(2.0) / 2.0));

    const auto c = diamond();
    const double full = std::pow(2 * constants::pi, 3) * 1e-19 * c.thickness_m;
    CHECK(std::abs(amplitude_from_mismatch(0.0, c)) == doctest::Approx(full));
    const double x = 0.7;
    const auto a = amplitude_from_mismatch(2 * x / c.thickness_m, c);
    CHECK(std::arg(a) == doctest::Approx(x));
    CHECK(std::abs(a) == doctest::Approx(full * std::sin(x) / x));
    CHECK(std::abs(amplitude_from_mismatch(2 * constants::pi / c.thickness_m, c)) < 1e-12 * full);

    // |phi|^2 on the ridge grows as L^2
    auto thick = c;
    thick.thickness_m *= 3.0;
    CHECK(std::norm(amplitude_from_mismatch(0.0, thick)) == doctest::Approx(9.0 * std::norm(amplitude_from_mismatch(0.0, c))));
}

TEST_CASE("spectral density agrees with a brute-force transverse integral") {
    // tests/oracles/spectral_density.py: dense polar grid, pointwise aperture test
    const struct {
        double energy, density;
    } oracle[] = {{9.0, 2.917855305e-02}, {10.2, 3.346315860e-02}, {10.5, 3.447378372e-02}, {12.5, 4.040201644e-02}};
    for (const auto& o : oracle) {
        CAPTURE(o.energy);
        CHECK(spectral_density(pump(), diamond(), aperture(), o.energy, {96, 48, 24}) ==
              doctest::Approx(o.density).epsilon(5e-3));
    }
}

TEST_CASE("pair rate scaling") {
    const double base = rate(pump(), diamond());
    REQUIRE(base > 0.0);

    auto brighter = pump();
    brighter.rate_per_s *= 7.0;
    CHECK(rate(brighter, diamond()) == doctest::Approx(7.0 * base).epsilon(1e-12));

    auto strong = diamond();
    strong.kappa_per_m = {0.0, 3e-19};
    CHECK(rate(pump(), strong) == doctest::Approx(9.0 * base).epsilon(1e-12));

    // on-ridge |phi|^2 ~ L^2, ridge width ~ 1/L: the integrated rate is linear in L
    auto thick = diamond();
    thick.thickness_m *= 2.0;
    CHECK(rate(pump(), thick) == doctest::Approx(2.0 * base).epsilon(1e-3));
}

TEST_CASE("pair acceptance is symmetric about degeneracy") {
    const quadrature::Aperture pair{0.4 * constants::deg, quadrature::Acceptance::Pair};
    for (double d : {0.3, 0.9, 1.6}) {
        const double lo = spectral_density(pump(), diamond(), pair, 10.5 - d, {96, 48, 24});
        const double hi = spectral_density(pump(), diamond(), pair, 10.5 + d, {96, 48, 24});
        CAPTURE(d);
        CHECK(lo > 0.0);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-9));
    }
    // pair acceptance can only remove photons; at 12.7 keV the 8.3 keV idler misses its aperture
    CHECK(spectral_density(pump(), diamond(), pair, 9.5, {96, 48, 24}) <=
          spectral_density(pump(), diamond(), aperture(), 9.5, {96, 48, 24}));
    CHECK(spectral_density(pump(), diamond(), aperture(), 12.7, {96, 48, 24}) > 0.0);
    CHECK(spectral_density(pump(), diamond(), pair, 12.7, {96, 48, 24}) == 0.0);
}

TEST_CASE("down-converted spectrum through the 0.4 degree aperture") {
    const auto energies = std::vector<double>{8.0, 9.0, 10.0, 10.5, 11.0, 12.0, 13.0};
    const auto s = nlc_spectrum(pump(), diamond(), aperture(), energies, {96, 48, 24}, true);
    CHECK(s.degenerate_angle_rad / constants::deg == doctest::Approx(0.957427855168).epsilon(1e-9));
    CHECK(s.window_lo_keV == doctest::Approx(8.531818504).epsilon(1e-8));
    CHECK(s.window_hi_keV == doctest::Approx(12.916067943).epsilon(1e-8));
    // frozen at the default grid; the doubled grid moves it by < 1e-4
    CHECK(s.total_rate == doctest::Approx(0.149894527).epsilon(1e-6));
    CHECK(s.convergence_delta < 1e-4);
    CHECK(s.bandwidth_keV == doctest::Approx(4.30972).epsilon(1e-4));
    CHECK(s.warnings.empty());
    REQUIRE(s.points.size() == energies.size());
    CHECK(s.points.front().density_per_keV == 0.0);

    // a narrower aperture accepts fewer pairs and a narrower band
    const auto narrow = nlc_spectrum(pump(), diamond(), aperture(0.2), energies, {96, 48, 24}, false);
    CHECK(narrow.total_rate < s.total_rate);
    CHECK(narrow.bandwidth_keV < s.bandwidth_keV);
}

TEST_CASE("FWHM helper") {
    std::vector<double> x, y;
    for (int i = 0; i <= 200; ++i) {
        x.push_back(-5.0 + 0.05 * i);
        y.push_back(std::exp(-x.back() * x.back() / 2.0));
    }
    CHECK(full_width_half_max(x, y) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-3));
    y.back() = 1.0;
    CHECK_THROWS_AS(full_width_half_max(x, y), DomainError);
}

TEST_CASE("input validation") {
    auto p = pump();
    p.rate_per_s = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    auto c = diamond();
    c.thickness_m = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(solve_phase_matching(pump(), diamond(), 25.0), DomainError);
    CHECK_THROWS_AS(quadrature::build_grid(pump(), diamond(), aperture(0.0), {8, 8, 8}), DomainError);
}
