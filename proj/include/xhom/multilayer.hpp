#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "xhom/materials.hpp"

namespace xhom::multilayer {

using complex = std::complex<double>;
using materials::Material;

enum class Polarization { S, P };

struct Layer {
    Material material;
    double thickness_m;
};

/// Stratified medium between a semi-infinite ambient (entrance, "front")
/// and a semi-infinite exit medium ("back").
struct LayerStack {
    Material ambient = Material::vacuum();
    std::vector<Layer> layers;
    Material exit = Material::vacuum();

    double total_thickness() const;
    /// Every layer split into `slices` equal sub-layers of the same material.
    LayerStack subdivided(int slices) const;
};

/// Periodic absorber/spacer multilayer on a substrate. gamma is the absorber
/// fraction of the bilayer period.
struct MultilayerDesign {
    Material absorber = Material::vacuum();
    Material spacer = Material::vacuum();
    Material substrate = Material::vacuum();
    int n_bilayers = 0;
    double bilayer_m = 0.0;
    double gamma = 0.5;
    /// Finite substrate thickness; nullopt means semi-infinite.
    std::optional<double> substrate_m;
    int bragg_order = 1;
    bool absorber_on_top = true;

    void validate() const;
    double absorber_thickness() const { return gamma * bilayer_m; }
    double spacer_thickness() const { return (1.0 - gamma) * bilayer_m; }
    /// Vacuum ambient; finite substrate becomes a layer with vacuum behind it.
    LayerStack build() const;
};

struct StackResponse {
    complex r_front;
    complex r_back;
    /// Flux-normalized amplitude transmission, identical from both faces.
    complex t_front;
    complex t_back;
    Polarization polarization;
    double grazing_rad;
    double energy_keV;
    /// Re(Y_exit)/|Y_exit| * |Y_ambient| / Re(Y_ambient): converts |t|^2 to
    /// transmitted intensity (zero for an evanescent exit).
    double flux_factor = 1.0;

    double reflectivity_front() const { return std::norm(r_front); }
    double reflectivity_back() const { return std::norm(r_back); }
    double transmissivity() const { return std::norm(t_front) * flux_factor; }
};

/// Fresnel amplitude reflectivity at a single interface; grazing angle is
/// measured inside medium 1. s: (kz1 - kz2)/(kz1 + kz2); p uses kz/n^2
/// (magnetic-field convention).
complex fresnel_interface_r(complex n1, complex n2, double grazing_rad, Polarization pol);

/// Small-angle interface amplitude with refraction neglected,
/// |n_a - n_s| / (2 sin^2 theta); the quantity entering the tanh estimate.
double interface_amplitude_estimate(const MultilayerDesign& design, double grazing_rad,
                                    double energy_keV);

/// Refraction-corrected Bragg angle of the design's order:
/// n lambda = 2 d sin(theta) sqrt(1 - (2 dbar - dbar^2) / sin^2(theta)).
/// mean_delta overrides the gamma-weighted decrement when given.
double bragg_corrected_angle(const MultilayerDesign& design, double energy_keV,
                             std::optional<double> mean_delta = std::nullopt);

/// R = tanh^2[2 N r sin(pi n gamma)].
double tanh_reflectivity_estimate(const MultilayerDesign& design, double interface_r);

/// Characteristic-matrix solution; grazing angle measured in the ambient.
StackResponse stack_response(const LayerStack& stack, double grazing_rad, double energy_keV,
                             Polarization pol = Polarization::S);

enum class ScanAxis { Angle, Energy };

struct ScanPoint {
    double abscissa;  ///< rad for angle scans, keV for energy scans
    StackResponse response;
};

struct PeakMetrics {
    double position;
    double height;
    double fwhm;
};

struct ScanResult {
    ScanAxis axis;
    std::vector<ScanPoint> points;
};

/// Sweeps grazing angle at fixed energy or energy at fixed angle.
ScanResult response_scan(const LayerStack& stack, ScanAxis axis, const std::vector<double>& grid,
                         double fixed_value, Polarization pol = Polarization::S);

/// First Bragg peak of the front reflectivity: the highest local maximum
/// preceded by a local minimum (so the total-reflection plateau is skipped).
/// FWHM from linearly interpolated half-maximum crossings. Throws
/// DomainError when no such peak exists in range.
PeakMetrics find_peak(const ScanResult& scan);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace xhom::multilayer
