#include "xhom/spdc.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"

namespace xhom::spdc {

namespace {

double longitudinal(double k, double q2) {
    const double kz2 = k * k - q2;
    return kz2 > 0.0 ? std::sqrt(kz2) : 0.0;
}

}  // namespace

void PumpConfig::validate() const {
    if (!(energy_keV > 0.0)) throw ConfigError("pump energy must be > 0");
    if (!(rate_per_s >= 0.0)) throw ConfigError("pump rate must be >= 0");
    if (!(area_m2 > 0.0)) throw ConfigError("pump area must be > 0");
}

void CrystalConfig::validate() const {
    if (!(thickness_m > 0.0)) throw ConfigError("crystal thickness must be > 0");
    if (hkl.h == 0 && hkl.k == 0 && hkl.l == 0) throw ConfigError("Miller indices all zero");
    if (!(lattice_m > 0.0)) throw ConfigError("lattice constant must be > 0");
    if (!(std::abs(kappa_per_m) > 0.0)) throw ConfigError("coupling coefficient must be nonzero");
}

double reciprocal_lattice_vector(const CrystalConfig& crystal) {
    const auto& m = crystal.hkl;
    const double n2 = double(m.h) * m.h + double(m.k) * m.k + double(m.l) * m.l;
    return 2.0 * constants::pi * std::sqrt(n2) / crystal.lattice_m;
}

double pump_bragg_angle(const PumpConfig& pump, const CrystalConfig& crystal) {
    const double g = reciprocal_lattice_vector(crystal);
    const double kp = constants::wavenumber(pump.energy_keV);
    const double s = g / (2.0 * kp);
    if (s > 1.0) {
        throw DomainError("no Bragg solution: |G| exceeds 2 k_p at " +
                          std::to_string(pump.energy_keV) + " keV");
    }
    return std::asin(s);
}

double axis_wavevector(const PumpConfig& pump, const CrystalConfig& crystal) {
    const double g = reciprocal_lattice_vector(crystal);
    const double kp = constants::wavenumber(pump.energy_keV);
    const double glancing = pump_bragg_angle(pump, crystal) + pump.deviation_rad;
    // G is normal to the planes and opposes the pump's normal component.
    const double k2 = kp * kp + g * g - 2.0 * kp * g * std::sin(glancing);
    return std::sqrt(std::max(k2, 0.0));
}

double delta_kz(const SignalMode& mode, const PumpConfig& pump, const CrystalConfig& crystal) {
    const double q2 = mode.kx * mode.kx + mode.ky * mode.ky;
    const double ks = constants::wavenumber(mode.energy_keV);
    const double ki = constants::wavenumber(mode.idler_energy(pump));
    return axis_wavevector(pump, crystal) - longitudinal(ks, q2) - longitudinal(ki, q2);
}

PhaseMatchState solve_phase_matching(const PumpConfig& pump, const CrystalConfig& crystal,
                                     double signal_energy_keV) {
    if (!(signal_energy_keV > 0.0 && signal_energy_keV < pump.energy_keV)) {
        throw DomainError("signal energy must lie strictly between 0 and the pump energy");
    }
    const double big_k = axis_wavevector(pump, crystal);
    const double ks = constants::wavenumber(signal_energy_keV);
    const double ki = constants::wavenumber(pump.energy_keV - signal_energy_keV);
    const double theta_b = pump_bragg_angle(pump, crystal);

    auto mismatch = [&](double theta) {
        const double q = ks * std::sin(theta);
        return big_k - ks * std::cos(theta) - longitudinal(ki, q * q);
    };

    // Beyond this angle the idler would be evanescent.
    const double theta_max = ks > ki ? std::asin(ki / ks) : constants::pi / 2.0;
    const double lo = mismatch(0.0);
    const double hi = mismatch(theta_max);
    if (lo == 0.0) return {0.0, 0.0, 0.0, theta_b};
    if (lo > 0.0 || hi < 0.0) {
        throw DomainError("no real phase-matching solution at signal energy " +
                          std::to_string(signal_energy_keV) + " keV");
    }
    std::uintmax_t iterations = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
    auto [a, b] = boost::math::tools::toms748_solve(mismatch, 0.0, theta_max, lo, hi, tol, iterations);
    const double theta = 0.5 * (a + b);
    const double q = ks * std::sin(theta);
    return {mismatch(theta), theta, -std::asin(q / ki), theta_b};
}

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

std::complex<double> amplitude_from_mismatch(double dkz, const CrystalConfig& crystal) {
    constexpr double two_pi_cubed = 8.0 * constants::pi * constants::pi * constants::pi;
    const double x = 0.5 * dkz * crystal.thickness_m;
    return two_pi_cubed * crystal.kappa_per_m * crystal.thickness_m * std::polar(1.0, x) * sinc(x);
}

std::complex<double> biphoton_amplitude(const SignalMode& mode, const PumpConfig& pump,
                                        const CrystalConfig& crystal) {
    return amplitude_from_mismatch(delta_kz(mode, pump, crystal), crystal);
}

}  // namespace xhom::spdc
