#include "xhom/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"

namespace xhom::spdc {

double spectral_density(const PumpConfig& pump, const CrystalConfig& crystal,
                        const quadrature::Aperture& aperture, double energy_keV,
                        const quadrature::GridDims& dims) {
    const auto slice = quadrature::ring_slice(pump, crystal, aperture, energy_keV, dims);
    double sum = 0.0;
    for (const auto& node : slice) {
        sum += node.weight * std::norm(biphoton_amplitude({node.kx, node.ky, node.energy_keV}, pump, crystal));
    }
    return quadrature::rate_prefactor(pump) * sum / constants::hbar_keV_s;
}

double total_rate(const PumpConfig& pump, const CrystalConfig& crystal,
                  const quadrature::QuadratureGrid& grid) {
    double sum = 0.0;
    for (const auto& node : grid.nodes) {
        sum += node.weight * std::norm(biphoton_amplitude({node.kx, node.ky, node.energy_keV}, pump, crystal));
    }
    return quadrature::rate_prefactor(pump) * sum;
}

double full_width_half_max(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw DomainError("FWHM needs at least 3 samples");
    const auto peak = std::max_element(y.begin(), y.end());
    const double half = 0.5 * *peak;
    const std::size_t n = y.size();
    std::size_t first = 0;
    while (first < n && y[first] < half) ++first;
    std::size_t last = n - 1;
    while (last > 0 && y[last] < half) --last;
    if (first == 0 || last == n - 1) throw DomainError("curve does not fall below half maximum");
    auto cross = [&](std::size_t i, std::size_t j) {
        return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    };
    return cross(last, last + 1) - cross(first - 1, first);
}

NlcSpectrum nlc_spectrum(const PumpConfig& pump, const CrystalConfig& crystal,
                         const quadrature::Aperture& aperture,
                         const std::vector<double>& energies,
                         const quadrature::GridDims& dims, bool refine) {
    pump.validate();
    crystal.validate();
    NlcSpectrum out;
    const auto grid = quadrature::build_grid(pump, crystal, aperture, dims);
    out.degenerate_angle_rad = grid.degenerate_angle_rad;
    const double rho = 0.5 * aperture.full_width_rad;
    out.window_lo_keV = quadrature::energy_at_signal_angle(pump, crystal, grid.degenerate_angle_rad + rho);
    out.window_hi_keV = quadrature::energy_at_signal_angle(pump, crystal, grid.degenerate_angle_rad - rho);
    out.total_rate = total_rate(pump, crystal, grid);

    // Bandwidth from a dense internal sampling so it does not depend on the
    // caller's output grid.
    const double pad = 0.05 * (grid.window_hi_keV - grid.window_lo_keV);
    const int n_dense = 801;
    std::vector<double> ex(n_dense), ey(n_dense);
    for (int i = 0; i < n_dense; ++i) {
        ex[i] = grid.window_lo_keV - pad + (grid.window_hi_keV - grid.window_lo_keV + 2 * pad) * i / (n_dense - 1);
        ey[i] = spectral_density(pump, crystal, aperture, ex[i], dims);
    }
    out.bandwidth_keV = full_width_half_max(ex, ey);
    double peak = *std::max_element(ey.begin(), ey.end());

    out.points.reserve(energies.size());
    for (double e : energies) {
        const double d = spectral_density(pump, crystal, aperture, e, dims);
        peak = std::max(peak, d);
        out.points.push_back({e, 0.0, d});
    }
    for (auto& p : out.points) p.normalized = peak > 0.0 ? p.density_per_keV / peak : 0.0;

    if (refine) {
        const auto fine = quadrature::build_grid(pump, crystal, aperture, dims.doubled());
        const double r2 = total_rate(pump, crystal, fine);
        out.convergence_delta = std::abs(out.total_rate - r2) / r2;
        if (out.convergence_delta > 0.01) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "pair rate changes by %.3g%% on a doubled grid; increase the grid",
                          100.0 * out.convergence_delta);
            out.warnings.emplace_back(buf);
        }
    }
    return out;
}

}  // namespace xhom::spdc
