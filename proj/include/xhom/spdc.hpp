#pragma once

#include <complex>
#include <string>

namespace xhom::spdc {

enum class Polarization { InPlane, OutOfPlane };

struct PumpConfig {
    double energy_keV = 21.0;
    /// Rotation of the pump away from the kinematic Bragg angle, rad.
    double deviation_rad = 0.0;
    double rate_per_s = 0.0;
    double area_m2 = 0.0;
    Polarization polarization = Polarization::InPlane;

    void validate() const;
};

struct Miller {
    int h = 0;
    int k = 0;
    int l = 0;
};

struct CrystalConfig {
    std::string material = "diamond";
    double thickness_m = 0.0;
    Miller hkl;
    /// Cubic lattice constant, m.
    double lattice_m = 0.0;
    /// Coupling coefficient at unit pump photon flux density (1 photon / m^2 / s);
    /// the physical coupling scales with the square root of the flux.
    std::complex<double> kappa_per_m{0.0, 0.0};

    void validate() const;
};

/// A signal-photon phase-space point. The idler partner is fixed by energy
/// and transverse momentum conservation: energy E_p - E, transverse -q.
struct SignalMode {
    double kx = 0.0;  ///< in-plane transverse wavevector, 1/m
    double ky = 0.0;  ///< out-of-plane transverse wavevector, 1/m
    double energy_keV = 0.0;

    double idler_energy(const PumpConfig& pump) const { return pump.energy_keV - energy_keV; }
};

struct PhaseMatchState {
    double delta_kz;       ///< residual longitudinal mismatch, 1/m
    double theta_signal;   ///< signal angle from the symmetry axis, rad (> 0, +x side)
    double theta_idler;    ///< idler angle, rad (< 0, -x side)
    double bragg_angle;    ///< pump kinematic Bragg angle, rad
};

/// |G| = 2 pi sqrt(h^2 + k^2 + l^2) / a.
double reciprocal_lattice_vector(const CrystalConfig& crystal);

/// Kinematic Bragg angle, sin(theta_B) = |G| / (2 k_p). Throws DomainError
/// when |G| > 2 k_p.
double pump_bragg_angle(const PumpConfig& pump, const CrystalConfig& crystal);

/// |k_p + G| for the pump at theta_B + deviation; the symmetry axis of the
/// down-converted pairs points along this vector.
double axis_wavevector(const PumpConfig& pump, const CrystalConfig& crystal);

/// Longitudinal mismatch K - k_sz - k_iz along the symmetry axis with the
/// idler transverse momentum fixed at -q.
double delta_kz(const SignalMode& mode, const PumpConfig& pump, const CrystalConfig& crystal);

/// Signal/idler angles on the phase-matching ring at a signal energy.
/// Throws DomainError when no real (non-evanescent) solution exists.
PhaseMatchState solve_phase_matching(const PumpConfig& pump, const CrystalConfig& crystal,
                                     double signal_energy_keV);

/// (2 pi)^3 kappa L exp(i x) sinc(x), x = dkz L / 2.
std::complex<double> amplitude_from_mismatch(double dkz, const CrystalConfig& crystal);

std::complex<double> biphoton_amplitude(const SignalMode& mode, const PumpConfig& pump,
                                        const CrystalConfig& crystal);

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

}  // namespace xhom::spdc
