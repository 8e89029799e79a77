#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "xhom/multilayer.hpp"
#include "xhom/quadrature.hpp"
#include "xhom/spdc.hpp"

namespace xhom::hom {

using complex = std::complex<double>;

/// Amplitude response of an optic at a grazing angle and photon energy.
/// Mirrors use r_front; the beam splitter uses all four amplitudes.
struct OpticalDevice {
    std::string name;
    std::function<multilayer::StackResponse(double grazing_rad, double energy_keV)> respond;
};

OpticalDevice multilayer_device(std::string name, multilayer::LayerStack stack,
                                multilayer::Polarization pol = multilayer::Polarization::S);
/// r = 1, t = 0 at every angle and energy.
OpticalDevice perfect_mirror(std::string name);
/// t = 1, r = 0.
OpticalDevice transparent_device(std::string name);
/// All amplitudes zero.
OpticalDevice opaque_device(std::string name);
/// Lossless 50:50 splitter, t = 1/sqrt(2), r_front = r_back = i/sqrt(2).
OpticalDevice ideal_splitter(std::string name);
/// Same moduli as `device`; the back-face reflection takes the front-face
/// phase. (A pointwise mean is ill-defined: the back phase winds by many
/// turns across the band through a thick substrate.)
OpticalDevice symmetrized_phases(OpticalDevice device);

enum class DevicePort { MirrorS, MirrorI, BeamSplitter };

/// Layout of the interferometer. Every optic is parallel-offset so a photon
/// leaving the crystal at angle alpha from the symmetry axis meets it at
/// nominal + (|alpha| - axis_angle): the two arms are mirror images and a
/// deviation survives the mirror reflection unchanged at the beam splitter.
struct BenchGeometry {
    double mirror_s_rad = 0.0;
    double mirror_i_rad = 0.0;
    double splitter_rad = 0.0;
    /// Degenerate phase-matched angle, where a photon meets the nominal angles.
    double axis_angle_rad = 0.0;
    /// The idler arm carries the delay line; positive T delays the idler.
    /// When true the signal meets the multilayer face of the splitter.
    bool signal_on_front = true;
    quadrature::Aperture aperture;
};

struct Devices {
    OpticalDevice mirror_s;
    OpticalDevice mirror_i;
    OpticalDevice splitter;
};

/// Grazing angle on `port` for a photon of transverse wavevector kx and energy.
/// Throws DomainError when the angle is not positive.
double device_incidence(double kx, double energy_keV, const BenchGeometry& geometry,
                        DevicePort port);

/// Per-node, delay-independent pieces of the coincidence integral with the
/// rate prefactor and quadrature weight folded in. The rate at delay T is
/// sum baseline + 2 Re(interference exp(i frequency T)).
struct NodeCoefficients {
    std::vector<double> baseline;
    std::vector<complex> interference;
    std::vector<double> frequency;  ///< omega_p - 2 omega, rad/s
    double baseline_total = 0.0;
    double source_rate = 0.0;       ///< pair rate with identity devices, same grid
};

NodeCoefficients node_coefficients(const quadrature::QuadratureGrid& grid,
                                   const spdc::PumpConfig& pump,
                                   const spdc::CrystalConfig& crystal,
                                   const BenchGeometry& geometry, const Devices& devices);

struct RateSample {
    double value;         ///< real part, pairs/s
    double imag_residue;  ///< imaginary part left after summation
};

RateSample coincidence_rate(const NodeCoefficients& coeffs, double delay_s);

struct DipMetrics {
    double fwhm_s = 0.0;
    double visibility = 0.0;
    double shift_s = 0.0;
    double path_difference_m = 0.0;
    /// hbar / FWHM, keV.
    double bandwidth_keV = 0.0;
    double min_rate = 0.0;
};

struct HomCurve {
    std::vector<double> delay_s;
    std::vector<double> rate;
    std::vector<double> normalized;
    double baseline = 0.0;
    double source_rate = 0.0;
    /// Continuous minimiser of the rate and the rate there.
    double center_s = 0.0;
    double center_rate = std::numeric_limits<double>::quiet_NaN();
    double max_imag_ratio = 0.0;
    DipMetrics metrics;
    std::vector<std::string> notices;
};

/// Delay sweep over [t_lo, t_hi] with `samples` points. With `locate` a
/// 16x wider window is searched first and the range recentred on a deeper
/// minimum; the range is then widened until both half-depth crossings lie
/// inside it. Every change is recorded as a notice.
HomCurve hom_curve(const NodeCoefficients& coeffs, double t_lo, double t_hi, int samples,
                   bool locate = true);

HomCurve hom_curve(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                   const BenchGeometry& geometry, const Devices& devices,
                   const quadrature::GridDims& dims, double t_lo, double t_hi, int samples);

/// Throws DomainError when the visibility is below 0.01.
DipMetrics dip_metrics(const HomCurve& curve);

}  // namespace xhom::hom
