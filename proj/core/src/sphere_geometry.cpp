#include "coulomb/sphere_geometry.hpp"

#include <algorithm>
#include <numbers>

#include "coulomb/errors.hpp"
#include "coulomb/gauss_legendre.hpp"

namespace coulomb {

EnergyContext::EnergyContext(double energy, double alpha, double energy_unit_ev)
    : energy_(energy), p_e_(0.0), alpha_(alpha), energy_unit_ev_(energy_unit_ev) {
    if (!std::isfinite(energy) || !(energy < 0.0)) {
        throw InvalidArgument("EnergyContext: energy must be finite and negative (bound regime)");
    }
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw InvalidArgument("EnergyContext: alpha must be finite and positive");
    }
    if (!std::isfinite(energy_unit_ev) || !(energy_unit_ev > 0.0)) {
        throw InvalidArgument("EnergyContext: energy unit must be positive");
    }
    p_e_ = std::sqrt(-2.0 * energy);
}

EnergyContext EnergyContext::from_momentum_scale(double p_e, double alpha) {
    if (!std::isfinite(p_e) || !(p_e > 0.0)) {
        throw InvalidArgument("EnergyContext: momentum scale must be positive");
    }
    return EnergyContext(-0.5 * p_e * p_e, alpha);
}

SpherePoint4 SpherePoint4::normalized(double x1, double x2, double x3, double x4) {
    const double n2 = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4;
    if (!std::isfinite(n2) || n2 == 0.0) {
        throw InvalidArgument("SpherePoint4: cannot normalize a zero or non-finite vector");
    }
    const double inv = 1.0 / std::sqrt(n2);
    return SpherePoint4({x1 * inv, x2 * inv, x3 * inv}, x4 * inv);
}

SpherePoint4 SpherePoint4::checked(double x1, double x2, double x3, double x4) {
    const double n2 = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4;
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-12) {
        throw InvalidArgument("SpherePoint4: components do not have unit norm");
    }
    return SpherePoint4({x1, x2, x3}, x4);
}

SpherePoint4 SpherePoint4::from_angles(double chi, double beta, double gamma) {
    const double s = std::sin(chi);
    const double sb = std::sin(beta);
    return normalized(s * sb * std::cos(gamma), s * sb * std::sin(gamma), s * std::cos(beta),
                      std::cos(chi));
}

SpherePoint4 project(const Momentum3& p, const EnergyContext& ctx) {
    if (!p.is_finite()) throw InvalidArgument("project: non-finite momentum");
    const double pe = ctx.p_e();
    const double pe2 = ctx.p_e_squared();
    const double p2 = p.norm_squared();
    const double denom = p2 + pe2;
    const double scale = 2.0 * pe / denom;
    // The closed form is unit-norm analytically; normalizing removes the
    // last-bit drift for very large |p|.
    return SpherePoint4::normalized(scale * p[0], scale * p[1], scale * p[2], (p2 - pe2) / denom);
}

Momentum3 unproject(const SpherePoint4& pi, const EnergyContext& ctx) {
    const double gap = 1.0 - pi.pi4();
    if (gap <= 1e-14) throw PointAtInfinity("unproject: north pole maps to infinite momentum");
    const auto& v = pi.pi_vec();
    // Near the north pole 1 − π₄ cancels; |π⃗|² / (1 + π₄) is the same gap
    // on the unit sphere without the cancellation.
    const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double scale = ctx.p_e() / (pi.pi4() > 0.0 ? v2 / (1.0 + pi.pi4()) : gap);
    return {{scale * v[0], scale * v[1], scale * v[2]}};
}

double invariant_angle(const Momentum3& p_b, const Momentum3& p_a, const EnergyContext& ctx) {
    if (!p_b.is_finite() || !p_a.is_finite()) {
        throw InvalidArgument("invariant_angle: non-finite momentum");
    }
    const double pe2 = ctx.p_e_squared();
    const double b2 = p_b.norm_squared();
    const double a2 = p_a.norm_squared();
    const double c = ((b2 - pe2) * (a2 - pe2) + 4.0 * pe2 * dot(p_b, p_a)) / ((b2 + pe2) * (a2 + pe2));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double sphere_angle(const SpherePoint4& a, const SpherePoint4& b) {
    const auto x = a.components();
    const auto y = b.components();
    double diff = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        diff += (x[k] - y[k]) * (x[k] - y[k]);
        sum += (x[k] + y[k]) * (x[k] + y[k]);
    }
    return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

double measure_density(const Momentum3& p, const EnergyContext& ctx) {
    const double d = p.norm_squared() + ctx.p_e_squared();
    const double pe = ctx.p_e();
    return 8.0 * pe * pe * pe / (d * d * d);
}

double metric_factor(const Momentum3& p, const EnergyContext& ctx) {
    const double d = p.norm_squared() + ctx.p_e_squared();
    return 4.0 / (d * d);
}

double total_measure(const EnergyContext& ctx, int nodes) {
    const auto rule = gauss_legendre(nodes, 0.0, 0.5 * std::numbers::pi);
    const double pe = ctx.p_e();
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double t = rule.nodes[i];
        const double r = pe * std::tan(t);
        const double c = std::cos(t);
        const double dr_dt = pe / (c * c);
        const Momentum3 p{{0.0, 0.0, r}};
        sum += rule.weights[i] * 4.0 * std::numbers::pi * r * r * measure_density(p, ctx) * dr_dt;
    }
    return sum;
}

}  // namespace coulomb
