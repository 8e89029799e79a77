#pragma once

#include <vector>

#include "xhom/spdc.hpp"

namespace xhom::quadrature {

/// Which photons the detector aperture constrains.
enum class Acceptance {
    SignalOnly,  ///< only the signal direction is bounded (crystal-output spectrum)
    Pair,        ///< signal and idler both inside their apertures
};

/// Square angular aperture of full width `full_width_rad` in and out of the
/// scattering plane, centred on the degenerate phase-matched direction of
/// each arm.
struct Aperture {
    double full_width_rad = 0.0;
    Acceptance acceptance = Acceptance::SignalOnly;
};

/// Node counts per dimension: signal energy, azimuth around the
/// phase-matching ring, and radial offset across the ring.
struct GridDims {
    int energy = 96;
    int azimuth = 48;
    int radial = 24;

    GridDims doubled() const { return {2 * energy, 2 * azimuth, 2 * radial}; }
};

/// One integration node. weight is the measure d^2q d(omega) (m^-2 s^-1)
/// including quadrature weights and Jacobians; sinc^2 is not folded in.
struct Node {
    double energy_keV;
    double kx;
    double ky;
    double weight;
};

/// Phase-matching-ring adapted grid over (omega, kx, ky). The sinc^2 ridge is
/// ~1e-4 of the aperture wide, so the transverse plane is parametrised by the
/// ring azimuth and by u = dkz L / 2 across the ring. Radial weights are
/// scaled so that sum w sinc^2(u) = pi, the full-line sinc^2 mass.
struct QuadratureGrid {
    GridDims dims;
    Aperture aperture;
    double window_lo_keV = 0.0;
    double window_hi_keV = 0.0;
    double degenerate_angle_rad = 0.0;
    std::vector<Node> nodes;
};

/// Gauss-Legendre nodes and weights on [lo, hi].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};
Rule gauss_legendre(int n, double lo, double hi);

/// Nodes of the ring slice at one signal energy; weights are d^2q only.
/// Empty when the ring misses the aperture.
std::vector<Node> ring_slice(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                             const Aperture& aperture, double energy_keV, const GridDims& dims);

/// Signal-energy interval over which the ring intersects the aperture,
/// split into panels at kinks of the accepted arc length.
std::vector<double> energy_breakpoints(const spdc::PumpConfig& pump,
                                       const spdc::CrystalConfig& crystal,
                                       const Aperture& aperture);

QuadratureGrid build_grid(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                          const Aperture& aperture, const GridDims& dims);

/// Signal energy whose in-plane phase-matched angle equals `angle_rad`.
double energy_at_signal_angle(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                              double angle_rad);

/// Rate prefactor S/(2 pi)^9 * (flux / unit flux) = pump rate / (2 pi)^9
/// multiplying |phi|^2 and the device bracket.
double rate_prefactor(const spdc::PumpConfig& pump);

}  // namespace xhom::quadrature
