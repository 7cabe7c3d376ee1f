#include "coulomb/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "coulomb/classical_eikonal.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/sliced_propagator.hpp"
#include "coulomb/so4_harmonics.hpp"
#include "coulomb/spectral_engine.hpp"
#include "coulomb/sphere_geometry.hpp"

namespace coulomb {
namespace {

constexpr double kPi = std::numbers::pi;

CheckResult timed(const std::string& name, double threshold, const std::function<void(CheckResult&)>& body) {
    CheckResult r;
    r.name = name;
    r.threshold = threshold;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

SpherePoint4 random_sphere_point(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return SpherePoint4::normalized(g(rng), g(rng), g(rng), g(rng));
}

Momentum3 random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Momentum3 v{{g(rng), g(rng), g(rng)}};
    return (1.0 / v.norm()) * v;
}

void check_spectrum_poles(CheckResult& r) {
    PoleScanConfig cfg;
    const auto poles = find_poles(cfg);
    double worst = 0.0;
    for (const auto& p : poles) worst = std::max(worst, std::abs(p.energy + 0.5 / (p.n * p.n)));
    r.measured = worst;
    r.passed = poles.size() == 6 && worst < r.threshold;
    r.detail = "6 poles vs -1/(2n^2)";
}

void check_measure_discrimination(CheckResult& r) {
    SpectrumSweep on;
    on.n_levels = 2;
    const auto with = extract_spectrum(on);
    SpectrumSweep off = on;
    off.with_measure_factor = false;
    const auto without = extract_spectrum(off);
    const double e1 = std::abs(with[0].energy + 0.5);
    const double e2 = std::abs(with[1].energy + 0.125);
    const double e2_off = std::abs(without[1].energy + 1.0 / 6.0);
    r.measured = std::max({e1, e2, e2_off});
    r.passed = r.measured < r.threshold && !without[0].bound && with[0].bound;
    std::ostringstream os;
    os << "E1=" << with[0].energy << " E2=" << with[1].energy << " off: n1 bound=" << without[0].bound
       << " E2=" << without[1].energy;
    r.detail = os.str();
}

void check_rterm_distortion(CheckResult& r) {
    const double cs[] = {1.0 / 24.0, 1.0 / 12.0, 1.0 / 8.0};
    const double stated_percent[] = {11.1, 20.0, 27.3};
    std::vector<RTermVariant> variants{RTermVariant(0.0)};
    for (double c : cs) variants.emplace_back(c);
    const auto analytic = level_spacing_report(variants, 3);

    bool ok = !analytic.verdicts[0].excluded;
    double worst = 0.0;
    std::ostringstream os;
    for (int i = 0; i < 3; ++i) {
        SpectrumSweep sweep;
        sweep.n_levels = 1;
        sweep.c = cs[i];
        const auto lv = extract_spectrum(sweep);
        const double target = -0.5 / (1.0 + 3.0 * cs[i]);
        worst = std::max(worst, std::abs(lv[0].energy - target));
        const double percent = 100.0 * std::abs(target + 0.5) / 0.5;
        ok = ok && std::abs(percent - stated_percent[i]) < 0.05 && analytic.verdicts[static_cast<std::size_t>(i) + 1].excluded;
        os << (i ? " " : "") << "c=" << cs[i] << " E1=" << lv[0].energy << " (" << percent << "%)";
    }
    r.measured = worst;
    r.passed = ok && worst < r.threshold;
    r.detail = os.str();
}

void check_orthonormality(CheckResult& r, int resolution) {
    r.measured = orthonormality_error(4, resolution);
    r.passed = r.measured < r.threshold;
    r.detail = "Gram matrix of Y_nlm, n <= 4";
}

void check_addition_theorem(CheckResult& r, std::uint64_t seed, int pairs) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const auto a = random_sphere_point(rng);
        const auto b = random_sphere_point(rng);
        for (int n = 1; n <= 6; ++n) worst = std::max(worst, addition_theorem_residual(n, b, a));
    }
    r.measured = worst;
    r.passed = worst < r.threshold;
    r.detail = std::to_string(pairs) + " random pairs, n <= 6";
}

void check_measure_integral(CheckResult& r) {
    double worst = 0.0;
    for (double pe : {0.5, 1.0, 3.0}) {
        const double total = total_measure(EnergyContext::from_momentum_scale(pe));
        worst = std::max(worst, std::abs(total / (2.0 * kPi * kPi) - 1.0));
    }
    r.measured = worst;
    r.passed = worst < r.threshold;
    r.detail = "relative error vs 2 pi^2";
}

void check_semigroup(CheckResult& r, std::uint64_t seed) {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    std::mt19937_64 rng(seed);
    const auto a = random_sphere_point(rng);
    const auto b = random_sphere_point(rng);
    const double weight = std::pow(2.0 * kPi, 1.5);
    double worst = 0.0;
    for (auto [s1, s2] : {std::pair{0.1, 0.1}, std::pair{0.2, 0.5}}) {
        const auto composed = s3_quadrature(
            [&](const SpherePoint4& x) {
                return pseudotime_amplitude(b, x, s2, ctx).value * pseudotime_amplitude(x, a, s1, ctx).value / weight;
            },
            24);
        const double direct = pseudotime_amplitude(b, a, s1 + s2, ctx).value;
        worst = std::max(worst, std::abs(composed.value - direct) / std::abs(direct));
    }
    r.measured = worst;
    r.passed = worst < r.threshold;
    r.detail = "(S1,S2) in {(0.1,0.1),(0.2,0.5)}";
}

void check_eikonal(CheckResult& r, std::uint64_t seed) {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.2, 3.0);
    double worst = 0.0;
    double worst_bound = 0.0;
    int done = 0;
    while (done < 10) {
        const Momentum3 pa = radius(rng) * random_direction(rng);
        const Momentum3 pb = radius(rng) * random_direction(rng);
        const double theta = invariant_angle(pb, pa, ctx);
        if (theta <= 0.1 || theta >= 3.0) continue;
        const auto res = minimize_eikonal(pa, pb, ctx);
        const double exact = geodesic_action(pa, pb, ctx);
        worst = std::max(worst, std::abs(res.action - exact));
        worst_bound = std::max({worst_bound, exact - res.action, exact - res.initial_action});
        ++done;
    }
    r.measured = worst;
    r.passed = worst < r.threshold && worst_bound < 1e-6;
    std::ostringstream os;
    os << "max lower-bound violation " << worst_bound;
    r.detail = os.str();
}

void check_kepler(CheckResult& r) {
    const double energy = -0.5;
    const auto ctx = EnergyContext(energy);
    const double period = kepler_period(energy);
    const double dt = 1e-4 * period;
    double worst_fit = 0.0, worst_energy = 0.0, worst_eikonal = 0.0;
    for (double l_frac : {1.0, 0.9, 0.8, 0.6}) {
        const double l = l_frac / std::sqrt(-2.0 * energy);
        const auto orbit = simulate_kepler(energy, l, period, dt);
        const auto fit = fit_hodograph_circle(orbit);
        worst_fit = std::max(worst_fit, fit.max_residual / fit.radius);
        for (const auto& s : orbit) worst_energy = std::max(worst_energy, std::abs(kepler_energy(s) - energy));
        const std::vector<KeplerState> quarter(orbit.begin(), orbit.begin() + static_cast<std::ptrdiff_t>(orbit.size() / 4));
        worst_eikonal = std::max(worst_eikonal, eikonal_along_orbit(quarter, ctx).relative_difference);
    }
    r.measured = worst_eikonal;
    r.passed = worst_fit < 1e-6 && worst_energy < 1e-8 && worst_eikonal < r.threshold;
    std::ostringstream os;
    os << "circle residual/R=" << worst_fit << " energy drift=" << worst_energy << " eq19-vs-eq20=" << worst_eikonal;
    r.detail = os.str();
}

void check_series_acceleration(CheckResult& r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> energy(-0.6, -0.02);
    std::uniform_real_distribution<double> angle(0.3, kPi - 0.1);
    double worst = 0.0;  // |difference| / combined bound
    int done = 0;
    while (done < 20) {
        const double e = energy(rng);
        const double t = angle(rng);
        try {
            const auto acc = fixed_energy_amplitude(t, e);
            const auto ces = fixed_energy_amplitude_cesaro(t, e, 1.0, RTermVariant{}, 200000);
            worst = std::max(worst, std::abs(acc.value - ces.value) / (acc.tail_bound + ces.tail_bound));
            ++done;
        } catch (const PoleProximity&) {
        }
    }
    r.measured = worst;
    r.passed = worst <= r.threshold;
    r.detail = "max |accelerated - Cesaro| / combined bound over 20 samples";
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const VerificationOptions& opt) {
    std::vector<CheckResult> out;
    out.push_back(timed("spectrum_poles", 1e-9, check_spectrum_poles));
    out.push_back(timed("measure_factor_discrimination", 5e-3, check_measure_discrimination));
    out.push_back(timed("rterm_distortion", 5e-3, check_rterm_distortion));
    out.push_back(timed("harmonics_orthonormality", 1e-8,
                        [&](CheckResult& r) { check_orthonormality(r, opt.harmonics_resolution); }));
    out.push_back(timed("harmonics_addition_theorem", 1e-10,
                        [&](CheckResult& r) { check_addition_theorem(r, opt.seed, opt.random_pairs); }));
    out.push_back(timed("measure_integral", 1e-6, check_measure_integral));
    out.push_back(timed("semigroup", 1e-6, [&](CheckResult& r) { check_semigroup(r, opt.seed); }));
    out.push_back(timed("eikonal_geodesics", 1e-4, [&](CheckResult& r) { check_eikonal(r, opt.seed); }));
    out.push_back(timed("kepler_correspondence", 1e-5, check_kepler));
    out.push_back(timed("series_acceleration", 1.0, [&](CheckResult& r) { check_series_acceleration(r, opt.seed); }));
    return out;
}

}  // namespace coulomb
