#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "coulomb/classical_eikonal.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/so4_harmonics.hpp"
#include "coulomb/spectral_engine.hpp"
#include "coulomb/sphere_geometry.hpp"
#include "oracles.hpp"

using namespace coulomb;

namespace {

constexpr double kPi = std::numbers::pi;

Momentum3 rotate(const Momentum3& p, const std::array<double, 9>& r) {
    return {{r[0] * p[0] + r[1] * p[1] + r[2] * p[2], r[3] * p[0] + r[4] * p[1] + r[5] * p[2],
             r[6] * p[0] + r[7] * p[1] + r[8] * p[2]}};
}

// Rotation matrix from a unit quaternion.
std::array<double, 9> random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n, x /= n, y /= n, z /= n;
    return {1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
            2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
            2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};
}

Momentum3 random_momentum(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return {{g(rng), g(rng), g(rng)}};
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("invariant angle is rotation invariant") {
    std::mt19937_64 rng(1);
    const EnergyContext ctx(-0.4);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_momentum(rng);
        const auto b = random_momentum(rng);
        const auto r = random_rotation(rng);
        CHECK(invariant_angle(rotate(b, r), rotate(a, r), ctx) == doctest::Approx(invariant_angle(b, a, ctx)).epsilon(1e-10));
    }
}

TEST_CASE("geodesic action is the scaled invariant angle") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> e(-2.0, -0.01);
    std::uniform_real_distribution<double> al(0.2, 3.0);
    for (int i = 0; i < 200; ++i) {
        const EnergyContext ctx(e(rng), al(rng));
        const auto a = random_momentum(rng);
        const auto b = random_momentum(rng);
        CHECK(geodesic_action(a, b, ctx) ==
              doctest::Approx(ctx.alpha() / ctx.p_e() * invariant_angle(b, a, ctx)).epsilon(1e-12));
    }
}

TEST_CASE("pseudotime kernels compose under dense S3 integration") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    const double weight = std::pow(2.0 * kPi, 1.5);
    for (auto [s1, s2] : {std::pair{0.1, 0.15}, std::pair{0.3, 0.2}}) {
        auto k1 = [&](double t) { return pseudotime_kernel(t, s1, ctx).value; };
        auto k2 = [&](double t) { return pseudotime_kernel(t, s2, ctx).value; };
        for (double theta : {0.3, 1.4}) {
            const double composed = oracle::zonal_convolution(k1, k2, theta, 200) / weight;
            CHECK(composed == doctest::Approx(oracle::pseudotime_kernel(theta, s1 + s2, 1.0, 1.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("poles follow the shifted levels for random c") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> cdist(0.0, 0.2);
    for (int i = 0; i < 4; ++i) {
        const double c = cdist(rng);
        PoleScanConfig cfg;
        cfg.variant = RTermVariant(c);
        cfg.n_expect = 3;
        cfg.energy_min = -0.6;
        cfg.energy_max = -0.04;
        const auto poles = find_poles(cfg);
        for (int n = 1; n <= 3; ++n) {
            CHECK(std::abs(poles[static_cast<std::size_t>(n - 1)].energy + 0.5 / (n * n + 3.0 * c)) < 1e-9);
        }
    }
}

TEST_CASE("addition theorem and level sums at random points") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const auto a = SpherePoint4::normalized(g(rng), g(rng), g(rng), g(rng));
        const auto b = SpherePoint4::normalized(g(rng), g(rng), g(rng), g(rng));
        for (int n = 1; n <= 5; ++n) CHECK(addition_theorem_residual(n, a, b) < 1e-10);
        // level sum Σ|Y|² = n²/2π² everywhere
        for (int n = 1; n <= 5; ++n) {
            double s = 0.0;
            for (const auto& y : hyperspherical_Y_level(n, a)) s += std::norm(y);
            CHECK(s == doctest::Approx(n * n / (2.0 * kPi * kPi)).epsilon(1e-12));
        }
    }
}

TEST_CASE("fixed-energy amplitude closed form over random samples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> e(-1.0, -0.01);
    std::uniform_real_distribution<double> t(0.01, kPi);
    int done = 0;
    while (done < 50) {
        const double energy = e(rng), theta = t(rng);
        try {
            const auto r = fixed_energy_amplitude(theta, energy);
            const double expected = oracle::fixed_energy_amplitude(theta, energy, 1.0, 0.0);
            CHECK(std::abs(r.value - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
            ++done;
        } catch (const PoleProximity&) {
        }
    }
}

}  // TEST_SUITE
