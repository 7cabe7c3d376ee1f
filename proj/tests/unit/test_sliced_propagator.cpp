#include <doctest.h>

#include <cmath>
#include <numbers>

#include "coulomb/errors.hpp"
#include "coulomb/sliced_propagator.hpp"
#include "oracles.hpp"

using namespace coulomb;

namespace {

constexpr double kPi = std::numbers::pi;

SliceConfig config(double epsilon, bool measure = true, double c = 0.0) {
    SliceConfig cfg;
    cfg.epsilon = epsilon;
    cfg.with_measure_factor = measure;
    cfg.c = c;
    return cfg;
}

}  // namespace

TEST_SUITE("sliced_propagator") {

TEST_CASE("curvature of the unit three-sphere") {
    CHECK(kUnitS3Curvature == 6.0);
    CHECK(scalar_curvature(3, 2.0) == 0.5);
    CHECK(measure_factor_shift() == 1.0);
    CHECK(curvature_term_shift(1.0 / 12.0) == doctest::Approx(0.25));
}

TEST_CASE("slice configuration validation") {
    CHECK_NOTHROW(SliceConfig{}.validate());
    SliceConfig bad = config(0.0);
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = config(0.01);
    bad.num_slices = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = config(0.01);
    bad.grid_points = 100;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = config(0.01);
    bad.n_modes = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK(config(0.02).total_pseudotime() == 0.02);
}

TEST_CASE("short-time kernel has unit mass without the multiplier") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    const ShortTimeKernel k(config(0.02, false), ctx);
    CHECK(k.multiplier() == 1.0);
    const double mass = oracle::zonal_convolution(
        [&](double t) { return k(t); }, [](double) { return 1.0; }, 0.0, 400);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(short_time_kernel(-0.1, config(0.02), ctx), InvalidArgument);
}

TEST_CASE("measure factor multiplies each slice by exp(-eps pE^2 / 2)") {
    for (double pe : {0.5, 1.0, 1.7}) {
        const auto ctx = EnergyContext::from_momentum_scale(pe);
        for (double eps : {0.04, 0.01}) {
            const ShortTimeKernel on(config(eps, true), ctx);
            const ShortTimeKernel off(config(eps, false), ctx);
            for (double t : {0.0, 0.1, 0.3}) {
                CHECK(on(t) / off(t) == doctest::Approx(std::exp(-eps * pe * pe / 2.0)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("c-term ratio is independent of the angle") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    for (double c : {1.0 / 24.0, 1.0 / 12.0, 1.0 / 8.0}) {
        const ShortTimeKernel with(config(0.02, true, c), ctx);
        const ShortTimeKernel base(config(0.02, true, 0.0), ctx);
        const double expected = std::exp(-0.02 * 3.0 * c / 2.0);
        for (double t : {0.0, 0.05, 0.2, 0.4}) CHECK(with(t) / base(t) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("mode composition matches dense convolution on S3") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    const auto cfg = config(0.05, false);
    const ShortTimeKernel k(cfg, ctx);
    const auto modes = kernel_to_modes(sample_kernel(k, cfg.grid_points), cfg);
    const auto twice = compose_slices(modes, 2);
    for (double t : {0.0, 0.15, 0.4, 0.8}) {
        const double dense = oracle::zonal_convolution(k, k, t);
        CHECK(modes_to_kernel(twice, t) == doctest::Approx(dense).epsilon(1e-7));
    }
    // one slice reconstructs the kernel itself
    for (double t : {0.0, 0.2, 0.5}) CHECK(modes_to_kernel(modes, t) == doctest::Approx(k(t)).epsilon(1e-7));
}

TEST_CASE("characters are orthonormal on the angle grid") {
    const auto grid = theta_grid(256);
    double worst = 0.0;
    for (int n = 1; n <= 16; ++n) {
        for (int m = 1; m <= 16; ++m) {
            double s = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double t = grid.nodes[i];
                s += grid.weights[i] * std::sin(n * t) * std::sin(m * t);
            }
            worst = std::max(worst, std::abs(2.0 / kPi * s - (n == m ? 1.0 : 0.0)));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("constant kernel keeps only the trivial mode") {
    const auto cfg = config(0.01);
    const auto modes = kernel_to_modes(std::vector<double>(static_cast<std::size_t>(cfg.grid_points), 1.0 / (2.0 * kPi * kPi)), cfg);
    CHECK(modes.value(1) == doctest::Approx(1.0).epsilon(1e-12));
    for (int n = 2; n <= modes.n_modes(); ++n) CHECK(std::abs(modes.value(n)) < 1e-10);
}

TEST_CASE("flat kernel modes decay like the free spectrum") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    for (double eps : {0.04, 0.02, 0.01}) {
        const auto cfg = config(eps, false);
        const auto modes = kernel_to_modes(sample_kernel(ShortTimeKernel(cfg, ctx), cfg.grid_points), cfg);
        CHECK(modes.value(1) == doctest::Approx(1.0).epsilon(1e-10));
        for (int n = 1; n <= modes.n_modes(); ++n) {
            CHECK(modes.value(n) > 0.0);
            CHECK(modes.value(n) <= 1.0 + 1e-12);
        }
        // first order in ε: k_n ≈ exp(−(n² − 1) ε / 2)
        for (int n = 2; n <= 4; ++n) {
            const double rate = -std::log(modes.value(n)) / eps;
            CHECK(rate == doctest::Approx((n * n - 1) / 2.0).epsilon(0.1));
        }
    }
}

TEST_CASE("c-term scales every mode by the same factor") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    const auto base_cfg = config(0.02, true, 0.0);
    const auto base = kernel_to_modes(sample_kernel(ShortTimeKernel(base_cfg, ctx), base_cfg.grid_points), base_cfg);
    for (double c : {1.0 / 24.0, 1.0 / 8.0}) {
        const auto cfg = config(0.02, true, c);
        const auto modes = kernel_to_modes(sample_kernel(ShortTimeKernel(cfg, ctx), cfg.grid_points), cfg);
        const double first = modes.value(1) / base.value(1);
        CHECK(first == doctest::Approx(std::exp(-0.02 * 3.0 * c / 2.0)).epsilon(1e-12));
        for (int n = 2; n <= 12; ++n) CHECK(modes.value(n) / base.value(n) == doctest::Approx(first).epsilon(1e-12));
    }
}

TEST_CASE("composition is exact in log space") {
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    const auto cfg = config(0.01);
    const auto modes = kernel_to_modes(sample_kernel(ShortTimeKernel(cfg, ctx), cfg.grid_points), cfg);
    const auto a = compose_slices(compose_slices(modes, 2), 3);
    const auto b = compose_slices(modes, 6);
    CHECK(a.power() == 6);
    for (int n = 1; n <= modes.n_modes(); ++n) {
        CHECK(a.log_abs(n) == b.log_abs(n));
        CHECK(a.value(n) == b.value(n));
    }
    CHECK(b.log_abs(3) == doctest::Approx(6.0 * modes.log_abs(3)).epsilon(1e-15));
    CHECK_THROWS_AS(compose_slices(modes, 0), InvalidArgument);
    CHECK_THROWS_AS(modes.log_abs(0), InvalidArgument);
    CHECK_THROWS_AS(ModeCoefficients({}), InvalidArgument);
}

TEST_CASE("negative coefficients keep their sign under odd powers") {
    const ModeCoefficients m({2.0, -0.5});
    CHECK(m.composed(3).value(2) == doctest::Approx(-0.125));
    CHECK(m.composed(2).value(2) == doctest::Approx(0.25));
}

TEST_CASE("projection of the exact kernel is calibrated") {
    // relative per mode, so the check stops where k_32 nears roundoff of k_1
    for (double eps : {0.02, 0.01}) {
        CHECK(calibration_error(eps, EnergyContext::from_momentum_scale(1.0), 32, 256) < 1e-10);
    }
    CHECK(calibration_error(0.1, EnergyContext::from_momentum_scale(1.0), 8, 256) < 1e-8);
}

TEST_CASE("under-resolved kernels are rejected") {
    auto cfg = config(1e-4);
    cfg.n_modes = 8;
    cfg.grid_points = 64;
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    CHECK_THROWS_AS(kernel_to_modes(sample_kernel(ShortTimeKernel(cfg, ctx), cfg.grid_points), cfg), ResolutionError);
    const auto good = config(0.01);
    CHECK_THROWS_AS(kernel_to_modes(std::vector<double>(10, 1.0), good), InvalidArgument);
    CHECK_THROWS_AS(kernel_to_modes(std::vector<double>(256, 1.0), good, KernelMeasure::amplitude), InvalidArgument);
}

TEST_CASE("analytic decay exponents") {
    CHECK(analytic_kappa(1, true, 0.0) == 1.0);
    CHECK(analytic_kappa(1, false, 0.0) == 0.0);
    CHECK(analytic_kappa(2, false, 0.0) == 3.0);
    CHECK(analytic_kappa(2, true, 1.0 / 24.0) == doctest::Approx(4.125));
}

TEST_CASE("extracted spectrum with and without the measure factor") {
    SpectrumSweep on;
    on.n_levels = 3;
    const auto with = extract_spectrum(on);
    for (const auto& lv : with) {
        CHECK(lv.bound);
        CHECK(std::abs(lv.energy + 0.5 / (lv.n * lv.n)) < 5e-3);
        CHECK(lv.analytic_energy == doctest::Approx(-0.5 / (lv.n * lv.n)));
        CHECK(lv.decay_rates.size() == 3);
    }
    SpectrumSweep off = on;
    off.with_measure_factor = false;
    const auto without = extract_spectrum(off);
    CHECK_FALSE(without[0].bound);
    CHECK(std::isnan(without[0].energy));
    CHECK(std::isnan(without[0].analytic_energy));
    CHECK(std::abs(without[1].energy + 1.0 / 6.0) < 5e-3);
}

TEST_CASE("decay rates converge at first order in epsilon") {
    SpectrumSweep sweep;
    sweep.n_levels = 4;
    for (const auto& lv : extract_spectrum(sweep)) {
        const auto& r = lv.decay_rates;
        // the measure-factor ground mode carries no ε dependence at all
        if (std::abs(r[0] - r[1]) < 1e-12) {
            CHECK(std::abs(r[1] - r[2]) < 1e-12);
            continue;
        }
        CHECK(std::abs(r[0] - r[1]) >= 1.8 * std::abs(r[1] - r[2]));
    }
}

TEST_CASE("c = 1/12 ground level") {
    SpectrumSweep sweep;
    sweep.n_levels = 1;
    sweep.c = 1.0 / 12.0;
    CHECK(std::abs(extract_spectrum(sweep)[0].energy + 0.4) < 5e-3);
}

TEST_CASE("sweep validation") {
    SpectrumSweep two;
    two.epsilons = {0.02, 0.01};
    CHECK_THROWS_AS(extract_spectrum(two), InvalidArgument);
    SpectrumSweep uneven;
    uneven.epsilons = {0.04, 0.03, 0.01};
    CHECK_THROWS_AS(extract_spectrum(uneven), InvalidArgument);
    SpectrumSweep levels;
    levels.n_levels = 40;
    CHECK_THROWS_AS(extract_spectrum(levels), InvalidArgument);
}

TEST_CASE("discrimination report") {
    SpectrumSweep base;
    base.n_levels = 2;
    const auto rep = discrimination_report(base, {0.0, 1.0 / 24.0});
    REQUIRE(rep.verdicts.size() == 3);
    CHECK_FALSE(rep.verdicts[0].excluded);
    CHECK(rep.verdicts[1].excluded);
    CHECK(rep.verdicts[1].ground_deviation_percent == doctest::Approx(11.1).epsilon(5e-3));
    CHECK_FALSE(rep.verdicts[2].with_measure_factor);
    CHECK_FALSE(rep.verdicts[2].has_ground_state);
    CHECK(rep.verdicts[2].excluded);
    CHECK(rep.rows.size() == 6);
    for (const auto& row : rep.rows) {
        if (row.c == 0.0 && row.with_measure_factor) CHECK(row.deviation_percent < 1.0);
    }
}

}  // TEST_SUITE
