#pragma once

#include <string>
#include <vector>

#include "xhom/quadrature.hpp"
#include "xhom/spdc.hpp"

namespace xhom::spdc {

struct SpectrumPoint {
    double energy_keV;
    double normalized;        ///< density / peak density
    double density_per_keV;   ///< pairs / s / keV
};

struct NlcSpectrum {
    std::vector<SpectrumPoint> points;
    double total_rate = 0.0;          ///< pairs / s through the aperture
    double bandwidth_keV = 0.0;       ///< FWHM of the density
    double window_lo_keV = 0.0;       ///< in-plane edge energies of the aperture
    double window_hi_keV = 0.0;
    double degenerate_angle_rad = 0.0;
    double convergence_delta = 0.0;   ///< |R(dims) - R(2 dims)| / R(2 dims), 0 if not checked
    std::vector<std::string> warnings;
};

/// Rate density dR/dE (pairs / s / keV) at one signal energy.
double spectral_density(const PumpConfig& pump, const CrystalConfig& crystal,
                        const quadrature::Aperture& aperture, double energy_keV,
                        const quadrature::GridDims& dims);

/// Total pair rate through the aperture on a prepared grid.
double total_rate(const PumpConfig& pump, const CrystalConfig& crystal,
                  const quadrature::QuadratureGrid& grid);

/// Down-converted spectrum sampled at `energies`, with the pair rate and the
/// spectral FWHM. When `refine` is set the rate is recomputed on a doubled
/// grid and a warning is raised for a change above 1%.
NlcSpectrum nlc_spectrum(const PumpConfig& pump, const CrystalConfig& crystal,
                         const quadrature::Aperture& aperture,
                         const std::vector<double>& energies,
                         const quadrature::GridDims& dims, bool refine = true);

/// Full width at half maximum between the outermost half-maximum crossings,
/// linearly interpolated. Throws DomainError when the curve never drops below
/// half maximum on either side.
double full_width_half_max(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace xhom::spdc
