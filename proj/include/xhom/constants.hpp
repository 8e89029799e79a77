#pragma once

#include <numbers>

namespace xhom::constants {

inline constexpr double pi = std::numbers::pi;

/// Planck constant times speed of light, keV * nm.
inline constexpr double hc_keV_nm = 1.23984193;
/// Classical electron radius, m.
inline constexpr double electron_radius_m = 2.8179403262e-15;
inline constexpr double avogadro = 6.02214076e23;
inline constexpr double speed_of_light = 299792458.0;
/// Reduced Planck constant, keV * s (hc / 2 pi c).
inline constexpr double hbar_keV_s = hc_keV_nm * 1e-9 / (2.0 * pi * speed_of_light);

inline constexpr double deg = pi / 180.0;
inline constexpr double attosecond = 1e-18;

/// Vacuum wavelength in meters for a photon energy in keV.
constexpr double wavelength_m(double energy_keV) { return hc_keV_nm * 1e-9 / energy_keV; }

/// Vacuum wavenumber 2 pi / lambda in 1/m.
constexpr double wavenumber(double energy_keV) { return 2.0 * pi / wavelength_m(energy_keV); }

/// Angular frequency in rad/s.
constexpr double angular_frequency(double energy_keV) { return energy_keV / hbar_keV_s; }

}  // namespace xhom::constants
