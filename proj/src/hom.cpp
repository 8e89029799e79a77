#include "xhom/hom.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdio>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"

namespace xhom::hom {

namespace {

multilayer::StackResponse fixed_response(complex r_front, complex r_back, complex t,
                                         double grazing, double energy) {
    multilayer::StackResponse out{};
    out.r_front = r_front;
    out.r_back = r_back;
    out.t_front = t;
    out.t_back = t;
    out.polarization = multilayer::Polarization::S;
    out.grazing_rad = grazing;
    out.energy_keV = energy;
    out.flux_factor = 1.0;
    return out;
}

double photon_angle(double kx, double energy_keV) {
    return std::asin(std::abs(kx) / constants::wavenumber(energy_keV));
}

}  // namespace

OpticalDevice multilayer_device(std::string name, multilayer::LayerStack stack,
                                multilayer::Polarization pol) {
    return {std::move(name), [stack = std::move(stack), pol](double grazing, double energy) {
                return multilayer::stack_response(stack, grazing, energy, pol);
            }};
}

OpticalDevice perfect_mirror(std::string name) {
    return {std::move(name), [](double g, double e) { return fixed_response(1.0, 1.0, 0.0, g, e); }};
}

OpticalDevice transparent_device(std::string name) {
    return {std::move(name), [](double g, double e) { return fixed_response(0.0, 0.0, 1.0, g, e); }};
}

OpticalDevice opaque_device(std::string name) {
    return {std::move(name), [](double g, double e) { return fixed_response(0.0, 0.0, 0.0, g, e); }};
}

OpticalDevice ideal_splitter(std::string name) {
    const double h = 1.0 / std::sqrt(2.0);
    return {std::move(name), [h](double g, double e) {
                return fixed_response(complex(0.0, h), complex(0.0, h), h, g, e);
            }};
}

OpticalDevice symmetrized_phases(OpticalDevice device) {
    auto inner = std::move(device.respond);
    return {device.name + " (symmetrized)", [inner](double g, double e) {
                auto r = inner(g, e);
                r.r_back = std::polar(std::abs(r.r_back), std::arg(r.r_front));
                return r;
            }};
}

double device_incidence(double kx, double energy_keV, const BenchGeometry& geometry,
                        DevicePort port) {
    double nominal = 0.0;
    switch (port) {
        case DevicePort::MirrorS: nominal = geometry.mirror_s_rad; break;
        case DevicePort::MirrorI: nominal = geometry.mirror_i_rad; break;
        case DevicePort::BeamSplitter: nominal = geometry.splitter_rad; break;
    }
    const double angle = nominal + photon_angle(kx, energy_keV) - geometry.axis_angle_rad;
    if (!(angle > 0.0)) {
        throw DomainError("non-positive grazing angle " + std::to_string(angle / constants::deg) +
                          " deg on a device");
    }
    return angle;
}

NodeCoefficients node_coefficients(const quadrature::QuadratureGrid& grid,
                                   const spdc::PumpConfig& pump,
                                   const spdc::CrystalConfig& crystal,
                                   const BenchGeometry& geometry, const Devices& devices) {
    NodeCoefficients out;
    const std::size_t n = grid.nodes.size();
    out.baseline.reserve(n);
    out.interference.reserve(n);
    out.frequency.reserve(n);
    const double prefactor = quadrature::rate_prefactor(pump);
    const double ep = pump.energy_keV;

    for (const auto& node : grid.nodes) {
        const double e = node.energy_keV;
        const double e2 = ep - e;
        const double kx = node.kx;
        const double ky = node.ky;

        const complex phi_pp = spdc::biphoton_amplitude({kx, ky, e}, pump, crystal);
        const complex phi_pm = spdc::biphoton_amplitude({kx, -ky, e2}, pump, crystal);

        auto mirror = [&](const OpticalDevice& d, DevicePort port, double energy) {
            return d.respond(device_incidence(kx, energy, geometry, port), energy).r_front;
        };
        const complex ms = mirror(devices.mirror_s, DevicePort::MirrorS, e);
        const complex ms2 = mirror(devices.mirror_s, DevicePort::MirrorS, e2);
        const complex mi = mirror(devices.mirror_i, DevicePort::MirrorI, e);
        const complex mi2 = mirror(devices.mirror_i, DevicePort::MirrorI, e2);

        // A, D: transmission of the idler / signal face; B, C: reflection at
        // the signal / idler face.
        const auto bs = devices.splitter.respond(device_incidence(kx, e, geometry, DevicePort::BeamSplitter), e);
        const auto bs2 = devices.splitter.respond(device_incidence(kx, e2, geometry, DevicePort::BeamSplitter), e2);
        const bool front = geometry.signal_on_front;
        const complex a = front ? bs.t_back : bs.t_front;
        const complex a2 = front ? bs2.t_back : bs2.t_front;
        const complex b = front ? bs.r_front : bs.r_back;
        const complex b2 = front ? bs2.r_front : bs2.r_back;
        const complex c = front ? bs.r_back : bs.r_front;
        const complex c2 = front ? bs2.r_back : bs2.r_front;
        const complex d = front ? bs.t_front : bs.t_back;
        const complex d2 = front ? bs2.t_front : bs2.t_back;

        const double w = prefactor * node.weight;
        const double source = w * std::norm(phi_pp);
        const double bracket = std::norm(a2 * d) + std::norm(b * c2);
        out.baseline.push_back(std::norm(ms * mi2) * source * bracket);

        const complex paths = ms2 * std::conj(ms) * mi * std::conj(mi2);
        const complex split = a * std::conj(b) * std::conj(c2) * d2 + std::conj(a2) * b2 * c * std::conj(d);
        out.interference.push_back(0.5 * w * paths * std::conj(phi_pp) * phi_pm * split);
        out.frequency.push_back((ep - 2.0 * e) / constants::hbar_keV_s);

        out.baseline_total += out.baseline.back();
        out.source_rate += source;
    }
    return out;
}

RateSample coincidence_rate(const NodeCoefficients& coeffs, double delay_s) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < coeffs.baseline.size(); ++i) {
        const complex z = coeffs.interference[i] * std::polar(1.0, coeffs.frequency[i] * delay_s);
        re += coeffs.baseline[i] + 2.0 * z.real();
        im += 2.0 * z.imag();
    }
    return {re, im};
}

namespace {

struct Crossings {
    bool found = false;
    double left = 0.0;
    double right = 0.0;
};

Crossings half_depth_crossings(const std::vector<double>& t, const std::vector<double>& rate,
                               double baseline, std::size_t imin, double depth_max) {
    Crossings c;
    const double half = 0.5 * depth_max;
    auto depth = [&](std::size_t i) { return baseline - rate[i]; };
    std::size_t l = imin;
    while (l > 0 && depth(l - 1) >= half) --l;
    std::size_t r = imin;
    while (r + 1 < t.size() && depth(r + 1) >= half) ++r;
    if (l == 0 || r + 1 == t.size()) return c;
    auto lerp = [&](std::size_t i, std::size_t j) {
        return t[i] + (half - depth(i)) * (t[j] - t[i]) / (depth(j) - depth(i));
    };
    c.found = true;
    c.left = lerp(l - 1, l);
    c.right = lerp(r, r + 1);
    return c;
}

void sweep(const NodeCoefficients& coeffs, HomCurve& curve, double lo, double hi, int samples) {
    curve.delay_s = multilayer::linspace(lo, hi, samples);
    curve.rate.assign(samples, 0.0);
    curve.normalized.assign(samples, 0.0);
    curve.max_imag_ratio = 0.0;
    for (int i = 0; i < samples; ++i) {
        const auto r = coincidence_rate(coeffs, curve.delay_s[i]);
        curve.rate[i] = r.value;
        curve.normalized[i] = coeffs.source_rate > 0.0 ? r.value / coeffs.source_rate : 0.0;
        if (r.value > 0.0) curve.max_imag_ratio = std::max(curve.max_imag_ratio, std::abs(r.imag_residue) / r.value);
    }
}

}  // namespace

namespace {

struct Assessment {
    std::size_t imin = 0;
    double depth = 0.0;
    bool flat = false;
    bool resolved = false;  ///< interior minimum with both half-depth crossings
};

Assessment assess(const HomCurve& curve) {
    Assessment a;
    const auto it = std::min_element(curve.rate.begin(), curve.rate.end());
    a.imin = static_cast<std::size_t>(it - curve.rate.begin());
    a.depth = curve.baseline - *it;
    a.flat = !(a.depth > 0.01 * curve.baseline);
    if (a.flat) return a;
    const bool interior = a.imin > 0 && a.imin + 1 < curve.rate.size();
    const auto c = half_depth_crossings(curve.delay_s, curve.rate, curve.baseline, a.imin, a.depth);
    a.resolved = interior && c.found;
    return a;
}

void note_range(HomCurve& curve, const char* what, double lo, double hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "delay range %s to [%.6g, %.6g] as to bracket the dip", what,
                  lo / constants::attosecond, hi / constants::attosecond);
    curve.notices.emplace_back(buf);
}

}  // namespace

HomCurve hom_curve(const NodeCoefficients& coeffs, double t_lo, double t_hi, int samples, bool locate) {
    if (!(t_hi > t_lo) || samples < 5) throw ConfigError("delay range needs t_hi > t_lo and >= 5 samples");
    HomCurve curve;
    curve.baseline = coeffs.baseline_total;
    curve.source_rate = coeffs.source_rate;

    double lo = t_lo;
    double hi = t_hi;
    sweep(coeffs, curve, lo, hi, samples);
    auto a = assess(curve);

    if (locate && !a.flat) {
        // A device delay can push the dip far from T = 0; look for a deeper
        // minimum over a 16x wider window at a quarter of the resolution.
        const double span = hi - lo;
        const double mid = 0.5 * (lo + hi);
        HomCurve wide = curve;
        sweep(coeffs, wide, mid - 8.0 * span, mid + 8.0 * span, 4 * samples);
        const auto w = assess(wide);
        if (!w.flat && w.depth > a.depth * 1.05) {
            const double centre = wide.delay_s[w.imin];
            lo = centre - 0.5 * span;
            hi = centre + 0.5 * span;
            note_range(curve, "moved", lo, hi);
            sweep(coeffs, curve, lo, hi, samples);
            a = assess(curve);
        }
    }
    for (int attempt = 0; attempt < 10 && !a.flat && !a.resolved; ++attempt) {
        const double mid = 0.5 * (lo + hi);
        const double span = hi - lo;
        lo = mid - span;
        hi = mid + span;
        note_range(curve, "widened", lo, hi);
        sweep(coeffs, curve, lo, hi, samples);
        a = assess(curve);
    }

    const std::size_t imin = a.imin;
    curve.center_s = curve.delay_s[imin];
    curve.center_rate = curve.rate[imin];
    if (imin > 0 && imin + 1 < curve.rate.size()) {
        auto f = [&](double t) { return coincidence_rate(coeffs, t).value; };
        std::uintmax_t iterations = 200;
        const auto [t, r] = boost::math::tools::brent_find_minima(
            f, curve.delay_s[imin - 1], curve.delay_s[imin + 1], 40, iterations);
        if (r < curve.center_rate) {
            curve.center_s = t;
            curve.center_rate = r;
        }
    }
    try {
        curve.metrics = dip_metrics(curve);
    } catch (const DomainError& e) {
        curve.notices.emplace_back(e.what());
    }
    return curve;
}

HomCurve hom_curve(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                   const BenchGeometry& geometry, const Devices& devices,
                   const quadrature::GridDims& dims, double t_lo, double t_hi, int samples) {
    const auto grid = quadrature::build_grid(pump, crystal, geometry.aperture, dims);
    return hom_curve(node_coefficients(grid, pump, crystal, geometry, devices), t_lo, t_hi, samples);
}

DipMetrics dip_metrics(const HomCurve& curve) {
    if (curve.rate.size() < 3 || !(curve.baseline > 0.0)) throw DomainError("no dip: empty coincidence baseline");
    const auto it = std::min_element(curve.rate.begin(), curve.rate.end());
    const std::size_t imin = static_cast<std::size_t>(it - curve.rate.begin());
    DipMetrics m;
    m.min_rate = std::isnan(curve.center_rate) ? *it : std::min(*it, curve.center_rate);
    m.visibility = (curve.baseline - m.min_rate) / curve.baseline;
    if (m.visibility < 0.01) throw DomainError("no dip: visibility below 0.01");
    const auto c = half_depth_crossings(curve.delay_s, curve.rate, curve.baseline, imin,
                                        curve.baseline - m.min_rate);
    if (!c.found) throw DomainError("no dip: half-depth crossings outside the delay range");
    m.fwhm_s = c.right - c.left;
    m.shift_s = curve.center_s;
    m.path_difference_m = constants::speed_of_light * m.fwhm_s;
    m.bandwidth_keV = constants::hbar_keV_s / m.fwhm_s;
    return m;
}

}  // namespace xhom::hom
