#include "xhom/multilayer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"

namespace xhom::multilayer {

namespace {

using Matrix = std::array<complex, 4>;  // row-major 2x2

Matrix multiply(const Matrix& a, const Matrix& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

/// n^2 - n0^2 cos^2(theta0) without cancellation: both indices are within
/// 1e-4 of unity in the x-ray regime.
complex normal_component_squared(complex n, complex n0, double grazing) {
    const complex eps = n - 1.0;
    const complex eps0 = n0 - 1.0;
    const double s = std::sin(grazing);
    const double c2 = 1.0 - s * s;
    // n^2 - n0^2 c^2 = (n^2 - 1) - (n0^2 - 1) c^2 + s^2
    return eps * (2.0 + eps) - eps0 * (2.0 + eps0) * c2 + s * s;
}

complex decaying_root(complex z) {
    complex w = std::sqrt(z);
    if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
    return w;
}

struct Medium {
    complex kz_over_k;  ///< sqrt(n^2 - n0^2 cos^2 theta0)
    complex admittance;
};

Medium medium(complex n, complex n0, double grazing, Polarization pol) {
    const complex kz = decaying_root(normal_component_squared(n, n0, grazing));
    return {kz, pol == Polarization::S ? kz : kz / (n * n)};
}

bool same_material(const Material& a, const Material& b) {
    return a.name() == b.name() && a.density() == b.density();
}

}  // namespace

double LayerStack::total_thickness() const {
    double t = 0.0;
    for (const auto& l : layers) t += l.thickness_m;
    return t;
}

LayerStack LayerStack::subdivided(int slices) const {
    LayerStack out{ambient, {}, exit};
    for (const auto& l : layers) {
        for (int i = 0; i < slices; ++i) out.layers.push_back({l.material, l.thickness_m / slices});
    }
    return out;
}

void MultilayerDesign::validate() const {
    if (n_bilayers < 0) throw ConfigError("n_bilayers must be >= 0");
    if (!(bilayer_m > 0.0)) throw ConfigError("bilayer width must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (substrate_m && !(*substrate_m > 0.0)) throw ConfigError("substrate thickness must be > 0");
    if (bragg_order < 1) throw ConfigError("Bragg order must be >= 1");
}

LayerStack MultilayerDesign::build() const {
    validate();
    LayerStack stack;
    const Layer a{absorber, absorber_thickness()};
    const Layer s{spacer, spacer_thickness()};
    for (int i = 0; i < n_bilayers; ++i) {
        stack.layers.push_back(absorber_on_top ? a : s);
        stack.layers.push_back(absorber_on_top ? s : a);
    }
    if (substrate_m) {
        stack.layers.push_back({substrate, *substrate_m});
        stack.exit = Material::vacuum();
    } else {
        stack.exit = substrate;
    }
    return stack;
}

complex fresnel_interface_r(complex n1, complex n2, double grazing_rad, Polarization pol) {
    const complex kz1 = n1 * std::sin(grazing_rad);
    const complex kz2 = decaying_root(normal_component_squared(n2, n1, grazing_rad));
    if (pol == Polarization::S) return (kz1 - kz2) / (kz1 + kz2);
    const complex a = kz1 * n2 * n2;
    const complex b = kz2 * n1 * n1;
    return (a - b) / (a + b);
}

double interface_amplitude_estimate(const MultilayerDesign& design, double grazing_rad,
                                    double energy_keV) {
    const auto na = materials::refractive_index(design.absorber, energy_keV).index();
    const auto ns = materials::refractive_index(design.spacer, energy_keV).index();
    const double s = std::sin(grazing_rad);
    return std::abs(na - ns) / (2.0 * s * s);
}

double bragg_corrected_angle(const MultilayerDesign& design, double energy_keV,
                             std::optional<double> mean_delta) {
    double dbar = 0.0;
    if (mean_delta) {
        dbar = *mean_delta;
    } else {
        const double da = materials::refractive_index(design.absorber, energy_keV).delta;
        const double ds = materials::refractive_index(design.spacer, energy_keV).delta;
        dbar = design.gamma * da + (1.0 - design.gamma) * ds;
    }
    const double ratio = design.bragg_order * constants::wavelength_m(energy_keV) / (2.0 * design.bilayer_m);
    const double s2 = ratio * ratio + 2.0 * dbar - dbar * dbar;
    if (!(s2 > 0.0 && s2 <= 1.0)) {
        throw DomainError("no Bragg solution of order " + std::to_string(design.bragg_order) +
                          " at " + std::to_string(energy_keV) + " keV");
    }
    return std::asin(std::sqrt(s2));
}

double tanh_reflectivity_estimate(const MultilayerDesign& design, double interface_r) {
    const double arg = 2.0 * design.n_bilayers * std::abs(interface_r) *
                       std::sin(constants::pi * design.bragg_order * design.gamma);
    const double t = std::tanh(arg);
    return t * t;
}

StackResponse stack_response(const LayerStack& stack, double grazing_rad, double energy_keV,
                             Polarization pol) {
    if (!(grazing_rad > 0.0 && grazing_rad < constants::pi / 2.0 + 1e-12)) {
        throw DomainError("grazing angle must lie in (0, pi/2]");
    }
    const double k = constants::wavenumber(energy_keV);
    const complex n0 = materials::refractive_index(stack.ambient, energy_keV).index();
    const Medium in = medium(n0, n0, grazing_rad, pol);
    const complex ns = materials::refractive_index(stack.exit, energy_keV).index();
    const Medium out = medium(ns, n0, grazing_rad, pol);

    // Layer matrices are shared between repeated (material, thickness) pairs.
    struct Cached {
        const Material* material;
        double thickness;
        Matrix m;
    };
    std::vector<Cached> cache;
    struct Index {
        const Material* material;
        complex n;
    };
    std::vector<Index> indices;
    auto index_of = [&](const Material& m) {
        for (const auto& i : indices) {
            if (same_material(*i.material, m)) return i.n;
        }
        const complex n = materials::refractive_index(m, energy_keV).index();
        indices.push_back({&m, n});
        return n;
    };

    Matrix total{1.0, 0.0, 0.0, 1.0};
    for (const auto& layer : stack.layers) {
        const Matrix* found = nullptr;
        for (const auto& c : cache) {
            if (c.thickness == layer.thickness_m && same_material(*c.material, layer.material)) {
                found = &c.m;
                break;
            }
        }
        if (!found) {
            const Medium med = medium(index_of(layer.material), n0, grazing_rad, pol);
            const complex phase = k * med.kz_over_k * layer.thickness_m;
            const complex c = std::cos(phase);
            const complex s = std::sin(phase);
            const complex i{0.0, 1.0};
            cache.push_back({&layer.material, layer.thickness_m,
                             Matrix{c, -i * s / med.admittance, -i * med.admittance * s, c}});
            found = &cache.back().m;
        }
        total = multiply(total, *found);
    }

    const complex y0 = in.admittance;
    const complex ys = out.admittance;
    const complex a = y0 * total[0] + y0 * ys * total[1];
    const complex b = total[2] + ys * total[3];
    const complex denom = a + b;
    const complex r_front = (a - b) / denom;
    const complex r_back = (ys * total[3] + y0 * ys * total[1] - total[2] - y0 * total[0]) / denom;
    const complex t = 2.0 * std::sqrt(y0 * ys) / denom;

    double flux = 0.0;
    if (std::abs(ys) > 0.0 && y0.real() > 0.0) flux = ys.real() / std::abs(ys) * std::abs(y0) / y0.real();
    return {r_front, r_back, t, t, pol, grazing_rad, energy_keV, flux};
}

ScanResult response_scan(const LayerStack& stack, ScanAxis axis, const std::vector<double>& grid,
                         double fixed_value, Polarization pol) {
    if (grid.size() < 3) throw ConfigError("scan grid needs at least 3 points");
    ScanResult out{axis, {}};
    out.points.reserve(grid.size());
    for (double x : grid) {
        const double angle = axis == ScanAxis::Angle ? x : fixed_value;
        const double energy = axis == ScanAxis::Angle ? fixed_value : x;
        out.points.push_back({x, stack_response(stack, angle, energy, pol)});
    }
    return out;
}

PeakMetrics find_peak(const ScanResult& scan) {
    const auto& p = scan.points;
    const std::size_t n = p.size();
    auto y = [&](std::size_t i) { return p[i].response.reflectivity_front(); };

    std::size_t best = n;
    bool seen_min = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (y(i) < y(i - 1) && y(i) <= y(i + 1)) seen_min = true;
        if (seen_min && y(i) > y(i - 1) && y(i) >= y(i + 1)) {
            if (best == n || y(i) > y(best)) best = i;
        }
    }
    if (best == n || y(best) <= 0.0) throw DomainError("no Bragg peak found in scan range");

    // Parabolic refinement through the three samples around the maximum.
    double pos = p[best].abscissa;
    double height = y(best);
    {
        const double x0 = p[best - 1].abscissa, x1 = p[best].abscissa, x2 = p[best + 1].abscissa;
        const double y0 = y(best - 1), y1 = y(best), y2 = y(best + 1);
        const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
        if (d != 0.0) {
            const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
            const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
            const double c = y1 - a * x1 * x1 - b * x1;
            if (a < 0.0) {
                pos = -b / (2.0 * a);
                height = c - b * b / (4.0 * a);
            }
        }
    }

    const double half = 0.5 * height;
    std::size_t i = best;
    while (i > 0 && y(i) > half) --i;
    if (y(i) > half) throw DomainError("peak half-maximum not reached below the peak");
    const double left = p[i].abscissa + (half - y(i)) * (p[i + 1].abscissa - p[i].abscissa) / (y(i + 1) - y(i));
    std::size_t j = best;
    while (j + 1 < n && y(j) > half) ++j;
    if (y(j) > half) throw DomainError("peak half-maximum not reached above the peak");
    const double right = p[j - 1].abscissa + (half - y(j - 1)) * (p[j].abscissa - p[j - 1].abscissa) / (y(j) - y(j - 1));
    return {pos, height, right - left};
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace xhom::multilayer
