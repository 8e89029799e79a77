#include "xhom/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <memory>

#include "xhom/constants.hpp"
#include "xhom/errors.hpp"

namespace xhom::quadrature {

namespace {

struct ArcInterval {
    double lo = 0.0;
    double hi = -1.0;
    bool empty() const { return !(hi > lo); }
};

/// Positive-azimuth arc of a ring with transverse direction radius s that
/// falls inside the square aperture centred at sin(theta0).
ArcInterval arc_inside(double s, double theta0, double half_width) {
    const double outer = std::sin(theta0 + half_width);
    const double inner = std::sin(theta0 - half_width);
    const double side = std::sin(half_width);
    ArcInterval arc;
    if (s <= inner) return arc;
    arc.lo = s > outer ? std::acos(outer / s) : 0.0;
    const double by_inner = std::acos(std::min(1.0, inner / s));
    const double by_side = s > side ? std::asin(side / s) : constants::pi / 2.0;
    arc.hi = std::min(by_inner, by_side);
    return arc;
}

ArcInterval intersect(ArcInterval a, ArcInterval b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

double degenerate_angle(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal) {
    return spdc::solve_phase_matching(pump, crystal, 0.5 * pump.energy_keV).theta_signal;
}

/// Signal energy at which sin(theta_s) equals s.
double energy_at_direction(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                           double s) {
    return energy_at_signal_angle(pump, crystal, std::asin(s));
}

}  // namespace

Rule gauss_legendre(int n, double lo, double hi) {
    if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
        table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)),
              &gsl_integration_glfixed_table_free);
    Rule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        gsl_integration_glfixed_point(lo, hi, static_cast<std::size_t>(i), &rule.x[i], &rule.w[i],
                                      table.get());
    }
    return rule;
}

double energy_at_signal_angle(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                              double angle_rad) {
    auto residual = [&](double e) {
        return spdc::solve_phase_matching(pump, crystal, e).theta_signal - angle_rad;
    };
    // theta_s decreases with signal energy; walk outward from degeneracy.
    const double mid = 0.5 * pump.energy_keV;
    const double step = 0.02 * pump.energy_keV;
    double a = mid;
    double fa = residual(a);
    double b = a;
    double fb = fa;
    const double dir = fa < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < 48 && (fa < 0.0) == (fb < 0.0); ++i) {
        a = b;
        fa = fb;
        b = mid + dir * step * (i + 1);
        if (b <= 0.0 || b >= pump.energy_keV) break;
        try {
            fb = residual(b);
        } catch (const DomainError&) {
            break;
        }
    }
    if ((fa < 0.0) == (fb < 0.0)) {
        throw DomainError("no signal energy emits at " + std::to_string(angle_rad / constants::deg) + " deg");
    }
    if (fa == 0.0) return a;
    std::uintmax_t iterations = 200;
    auto tol = [](double x, double y) { return std::abs(x - y) < 1e-12; };
    auto [lo, hi] = boost::math::tools::toms748_solve(residual, std::min(a, b), std::max(a, b),
                                                      a < b ? fa : fb, a < b ? fb : fa, tol, iterations);
    return 0.5 * (lo + hi);
}

std::vector<double> energy_breakpoints(const spdc::PumpConfig& pump,
                                       const spdc::CrystalConfig& crystal,
                                       const Aperture& aperture) {
    const double rho = 0.5 * aperture.full_width_rad;
    if (!(rho > 0.0)) throw DomainError("aperture must be > 0");
    const double theta0 = degenerate_angle(pump, crystal);
    if (!(theta0 - rho > 0.0)) throw DomainError("aperture wider than the emission angle");

    const double inner = std::sin(theta0 - rho);
    const double outer = std::sin(theta0 + rho);
    const double side = std::sin(rho);
    const double s_min = inner;
    const double s_max = std::hypot(outer, side);
    const std::vector<double> kinks = {std::hypot(inner, side), outer};

    const double e_hi = energy_at_direction(pump, crystal, s_min);
    const double e_lo = energy_at_direction(pump, crystal, s_max);
    std::vector<double> points = {e_lo, e_hi};
    for (double s : kinks) points.push_back(energy_at_direction(pump, crystal, s));

    double lo = e_lo;
    double hi = e_hi;
    if (aperture.acceptance == Acceptance::Pair) {
        const double ep = pump.energy_keV;
        lo = std::max(lo, ep - e_hi);
        hi = std::min(hi, ep - e_lo);
        const auto n = points.size();
        for (std::size_t i = 0; i < n; ++i) points.push_back(ep - points[i]);
    }
    if (!(hi > lo)) throw DomainError("empty accepted energy window");
    std::vector<double> out = {lo, hi};
    for (double e : points) {
        if (e > lo && e < hi) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-9; }),
              out.end());
    return out;
}

std::vector<Node> ring_slice(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                             const Aperture& aperture, double energy_keV, const GridDims& dims) {
    const double rho = 0.5 * aperture.full_width_rad;
    const double theta0 = degenerate_angle(pump, crystal);
    const auto pm = spdc::solve_phase_matching(pump, crystal, energy_keV);
    const double ks = constants::wavenumber(energy_keV);
    const double ki = constants::wavenumber(pump.energy_keV - energy_keV);
    const double q0 = ks * std::sin(pm.theta_signal);

    ArcInterval arc = arc_inside(q0 / ks, theta0, rho);
    if (aperture.acceptance == Acceptance::Pair) arc = intersect(arc, arc_inside(q0 / ki, theta0, rho));
    if (arc.empty()) return {};

    const double big_k = spdc::axis_wavevector(pump, crystal);
    const double length = crystal.thickness_m;
    auto mismatch = [&](double q) {
        return big_k - std::sqrt(ks * ks - q * q) - std::sqrt(ki * ki - q * q);
    };
    auto slope = [&](double q) {
        return q / std::sqrt(ks * ks - q * q) + q / std::sqrt(ki * ki - q * q);
    };

    const int half_azimuth = std::max(1, dims.azimuth / 2);
    const Rule phi = gauss_legendre(half_azimuth, arc.lo, arc.hi);
    const double u_max = constants::pi * dims.radial / 4.0;
    const Rule radial = gauss_legendre(dims.radial, -u_max, u_max);
    double mass = 0.0;
    for (int j = 0; j < dims.radial; ++j) mass += radial.w[j] * std::pow(spdc::sinc(radial.x[j]), 2);
    const double fold = constants::pi / mass;

    // Radial positions and Jacobians q dq/du are shared by every azimuth.
    std::vector<double> q_of_u(dims.radial);
    std::vector<double> jac(dims.radial);
    for (int j = 0; j < dims.radial; ++j) {
        const double target = 2.0 * radial.x[j] / length;
        double q = q0;
        for (int it = 0; it < 50; ++it) {
            const double dq = (mismatch(q) - target) / slope(q);
            q -= dq;
            if (std::abs(dq) < 1e-12 * q0) break;
        }
        q_of_u[j] = q;
        jac[j] = q * 2.0 / (length * slope(q));
    }

    std::vector<Node> nodes;
    nodes.reserve(2 * half_azimuth * dims.radial);
    for (int sign : {-1, 1}) {
        for (int a = 0; a < half_azimuth; ++a) {
            // Negative side visited in reverse so node order is monotone in azimuth.
            const int idx = sign < 0 ? half_azimuth - 1 - a : a;
            const double angle = sign * phi.x[idx];
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            for (int j = 0; j < dims.radial; ++j) {
                nodes.push_back({energy_keV, q_of_u[j] * c, q_of_u[j] * s,
                                 phi.w[idx] * radial.w[j] * fold * jac[j]});
            }
        }
    }
    return nodes;
}

QuadratureGrid build_grid(const spdc::PumpConfig& pump, const spdc::CrystalConfig& crystal,
                          const Aperture& aperture, const GridDims& dims) {
    if (dims.energy < 2 || dims.azimuth < 2 || dims.radial < 2) {
        throw ConfigError("quadrature grid needs at least 2 nodes per dimension");
    }
    QuadratureGrid grid;
    grid.dims = dims;
    grid.aperture = aperture;
    grid.degenerate_angle_rad = degenerate_angle(pump, crystal);
    const auto breaks = energy_breakpoints(pump, crystal, aperture);
    grid.window_lo_keV = breaks.front();
    grid.window_hi_keV = breaks.back();
    const double total = breaks.back() - breaks.front();

    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p];
        const double b = breaks[p + 1];
        const int n = std::max(2, static_cast<int>(std::lround(dims.energy * (b - a) / total)));
        const Rule rule = gauss_legendre(n, a, b);
        for (int i = 0; i < n; ++i) {
            const double d_omega = rule.w[i] / constants::hbar_keV_s;
            for (auto node : ring_slice(pump, crystal, aperture, rule.x[i], dims)) {
                node.weight *= d_omega;
                grid.nodes.push_back(node);
            }
        }
    }
    return grid;
}

double rate_prefactor(const spdc::PumpConfig& pump) {
    return pump.rate_per_s / std::pow(2.0 * constants::pi, 9);
}

}  // namespace xhom::quadrature
