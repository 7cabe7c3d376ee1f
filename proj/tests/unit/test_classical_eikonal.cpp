#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "coulomb/classical_eikonal.hpp"
#include "coulomb/errors.hpp"
#include "oracles.hpp"

using namespace coulomb;

namespace {

constexpr double kPi = std::numbers::pi;

Momentum3 random_vector(std::mt19937_64& rng, double lo, double hi) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> r(lo, hi);
    Momentum3 d{{g(rng), g(rng), g(rng)}};
    return (r(rng) / d.norm()) * d;
}

}  // namespace

TEST_SUITE("classical_eikonal") {

TEST_CASE("momentum path construction") {
    const Momentum3 a{{1, 0, 0}}, b{{0, 1, 0}};
    CHECK(MomentumPath({a, a, b, b}).size() == 2);
    CHECK(MomentumPath({a, a}).size() == 1);
    CHECK_THROWS_AS(MomentumPath({a}), InvalidArgument);
    CHECK_THROWS_AS(MomentumPath({a, Momentum3{{std::nan(""), 0, 0}}}), InvalidArgument);
    const auto r = MomentumPath({a, b}).refined(4);
    REQUIRE(r.size() == 5);
    CHECK(r.points()[2][0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(MomentumPath({a, b}).refined(0), InvalidArgument);
}

TEST_CASE("geodesic action examples") {
    const EnergyContext ctx(-0.5);
    const Momentum3 a{{1, 0, 0}}, b{{0, 1, 0}};
    CHECK(geodesic_action(a, b, ctx) == doctest::Approx(kPi / 2.0).epsilon(1e-14));
    const EnergyContext other(-0.5, 3.0);
    CHECK(geodesic_action(a, b, other) == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-14));
    // a radial path through the origin is a great circle; with |c| < p_E it is the short arc
    const Momentum3 c{{-0.5, 0, 0}};
    const auto line = MomentumPath({a, c}).refined(4000);
    CHECK(eikonal_action(line, ctx) == doctest::Approx(geodesic_action(a, c, ctx)).epsilon(1e-6));
}

TEST_CASE("degenerate paths and segments") {
    const EnergyContext ctx(-0.5);
    const Momentum3 a{{1, 0, 0}}, b{{0, 1, 0}};
    CHECK(eikonal_action(MomentumPath({a, a}), ctx) == 0.0);
    CHECK(eikonal_action(MomentumPath({a, b, b}), ctx) == eikonal_action(MomentumPath({a, b}), ctx));
}

TEST_CASE("path along the projected great circle has the geodesic action") {
    const EnergyContext ctx(-0.18);
    const Momentum3 pa{{0.3, -0.1, 0.2}}, pb{{-0.4, 0.5, 0.9}};
    const auto x = project(pa, ctx).components();
    const auto y = project(pb, ctx).components();
    const double theta = sphere_angle(project(pa, ctx), project(pb, ctx));
    std::vector<Momentum3> pts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        const double wa = std::sin((1.0 - t) * theta) / std::sin(theta);
        const double wb = std::sin(t * theta) / std::sin(theta);
        pts.push_back(unproject(SpherePoint4::normalized(wa * x[0] + wb * y[0], wa * x[1] + wb * y[1],
                                                         wa * x[2] + wb * y[2], wa * x[3] + wb * y[3]),
                                ctx));
    }
    pts.front() = pa;
    pts.back() = pb;
    const MomentumPath path(pts);
    CHECK(std::abs(eikonal_action(path, ctx) - geodesic_action(pa, pb, ctx)) < 1e-6);
    CHECK(great_circle_deviation(path, ctx) < 1e-12);
}

TEST_CASE("fourfold refinement of random paths") {
    std::mt19937_64 rng(606);
    const EnergyContext ctx(-0.5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Momentum3> pts;
        for (int k = 0; k < 5; ++k) pts.push_back(random_vector(rng, 0.0, 3.0));
        const auto base = MomentumPath(pts).refined(512);
        const double a = eikonal_action(base, ctx);
        const double b = eikonal_action(base.refined(4), ctx);
        CHECK(std::abs(a - b) < 1e-6 * b);
    }
}

TEST_CASE("action is invariant under refinement of a fixed curve") {
    const EnergyContext ctx(-0.3);
    const MomentumPath path({Momentum3{{1, 0, 0}}, Momentum3{{0.2, 0.8, 0.3}}, Momentum3{{-0.5, 0.1, 1.0}}});
    const double a = eikonal_action(path.refined(500), ctx);
    const double b = eikonal_action(path.refined(1000), ctx);
    const double c = eikonal_action(path.refined(2000), ctx);
    CHECK(std::abs(b - c) < 1e-6 * c);
    // midpoint rule: the error shrinks fourfold per halving
    CHECK(std::abs(a - c) / std::abs(b - c) == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("gradient matches finite differences") {
    const EnergyContext ctx(-0.5);
    std::mt19937_64 rng(17);
    std::vector<Momentum3> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(random_vector(rng, 0.2, 2.0));
    const auto g = eikonal_gradient(pts, ctx);
    REQUIRE(g.size() == pts.size());
    const double h = 1e-6;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            auto plus = pts, minus = pts;
            plus[i][k] += h;
            minus[i][k] -= h;
            const double fd = (eikonal_action(MomentumPath(plus), ctx) - eikonal_action(MomentumPath(minus), ctx)) / (2 * h);
            CHECK(g[i][k] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("no path beats the geodesic") {
    std::mt19937_64 rng(2024);
    const EnergyContext ctx(-0.5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = random_vector(rng, 0.1, 4.0);
        const auto b = random_vector(rng, 0.1, 4.0);
        std::vector<Momentum3> pts{a};
        for (int k = 0; k < 3; ++k) pts.push_back(random_vector(rng, 0.0, 3.0));
        pts.push_back(b);
        const double action = eikonal_action(MomentumPath(pts).refined(400), ctx);
        CHECK(action >= geodesic_action(a, b, ctx) - 1e-6);
    }
}

TEST_CASE("geodesic action obeys the triangle inequality") {
    std::mt19937_64 rng(99);
    const EnergyContext ctx(-0.8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_vector(rng, 0.01, 10.0);
        const auto b = random_vector(rng, 0.01, 10.0);
        const auto c = random_vector(rng, 0.01, 10.0);
        CHECK(geodesic_action(a, c, ctx) <= geodesic_action(a, b, ctx) + geodesic_action(b, c, ctx) + 1e-12);
        CHECK(geodesic_action(a, b, ctx) == doctest::Approx(geodesic_action(b, a, ctx)).epsilon(1e-12));
    }
}

TEST_CASE("minimizer reaches the geodesic") {
    const EnergyContext ctx(-0.5);
    const Momentum3 a{{1, 0, 0}}, b{{0, 1, 0}};
    const auto res = minimize_eikonal(a, b, ctx);
    const double exact = geodesic_action(a, b, ctx);
    CHECK(std::abs(res.action - exact) < 1e-4);
    CHECK(res.action < res.initial_action);
    CHECK(res.initial_action >= exact - 1e-6);
    CHECK(res.normal_gradient_norm < 1e-7);
    CHECK(res.points.size() == 1025);
    CHECK(res.points.front() == a);
    CHECK(res.points.back() == b);
    CHECK(great_circle_deviation(res.path(), ctx) < 1e-4);
}

TEST_CASE("minimizer at random endpoints") {
    std::mt19937_64 rng(4242);
    const EnergyContext ctx(-0.32);
    int done = 0;
    while (done < 4) {
        const auto a = random_vector(rng, 0.1, 2.0);
        const auto b = random_vector(rng, 0.1, 2.0);
        const double theta = invariant_angle(b, a, ctx);
        if (theta < 0.1 || theta > 3.0) continue;
        MinimizerOptions opt;
        opt.n_points = 513;
        const auto res = minimize_eikonal(a, b, ctx, opt);
        CHECK(res.action == doctest::Approx(geodesic_action(a, b, ctx)).epsilon(1e-4));
        CHECK(great_circle_deviation(res.path(), ctx) < 1e-4);
        ++done;
    }
}

TEST_CASE("minimizer preconditions and failure") {
    const EnergyContext ctx(-0.5);
    const Momentum3 a{{1, 0, 0}};
    CHECK_THROWS_AS(minimize_eikonal(a, a, ctx), InvalidArgument);
    // p ↦ −p_E² p / |p|² is the antipodal map on S³
    CHECK_THROWS_AS(minimize_eikonal(a, Momentum3{{-1, 0, 0}}, ctx), InvalidArgument);
    MinimizerOptions few;
    few.n_points = 2;
    CHECK_THROWS_AS(minimize_eikonal(a, Momentum3{{0, 1, 0}}, ctx, few), InvalidArgument);
    MinimizerOptions starved;
    starved.max_iterations = 3;
    try {
        (void)minimize_eikonal(a, Momentum3{{0, 2, 0.5}}, ctx, starved);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.residual() > 1e-7);
    }
}

TEST_CASE("kepler period") {
    CHECK(kepler_period(-0.5) == doctest::Approx(2.0 * kPi));
    CHECK(kepler_period(-0.125) == doctest::Approx(16.0 * kPi));
    CHECK(kepler_period(-0.5, 4.0) == doctest::Approx(8.0 * kPi));
    CHECK_THROWS_AS(kepler_period(0.1), InvalidArgument);
}

TEST_CASE("circular orbit has constant momentum") {
    const double energy = -0.5;
    const double period = kepler_period(energy);
    const auto orbit = simulate_kepler(energy, 1.0, period, 1e-4 * period);
    double worst = 0.0;
    for (const auto& s : orbit) {
        const double p = std::hypot(s.momentum[0], s.momentum[1]);
        worst = std::max(worst, std::abs(p - 1.0));
    }
    CHECK(worst < 1e-9);
    CHECK(orbit.back().time == doctest::Approx(period));
}

TEST_CASE("hodograph is the analytic circle") {
    const double energy = -0.5;
    const double period = kepler_period(energy);
    for (double l : {0.9, 0.7}) {
        const auto orbit = simulate_kepler(energy, l, period, 1e-4 * period);
        const auto fit = fit_hodograph_circle(orbit);
        const auto exact = oracle::kepler_hodograph(energy, l, 1.0);
        CHECK(std::abs(fit.center_x) < 1e-7);
        CHECK(fit.center_y == doctest::Approx(exact.center_y).epsilon(1e-7));
        CHECK(fit.radius == doctest::Approx(exact.radius).epsilon(1e-7));
        CHECK(fit.max_residual < 1e-6 * fit.radius);
    }
}

TEST_CASE("energy drift of the integrators") {
    const double energy = -0.5;
    const double period = kepler_period(energy);
    const double l = 0.8;
    auto drift = [&](KeplerIntegrator integ) {
        KeplerOptions opt;
        opt.integrator = integ;
        const auto orbit = simulate_kepler(energy, l, period, 1e-4 * period, 1.0, opt);
        double worst = 0.0;
        for (const auto& s : orbit) worst = std::max(worst, std::abs(kepler_energy(s) - energy));
        return worst;
    };
    const double y4 = drift(KeplerIntegrator::yoshida4);
    const double lf = drift(KeplerIntegrator::leapfrog);
    CHECK(y4 < 1e-8);
    CHECK(lf > y4);
}

TEST_CASE("sampling and validation") {
    KeplerOptions opt;
    opt.sample_every = 10;
    const auto orbit = simulate_kepler(-0.5, 1.0, 1.0, 0.01, 1.0, opt);
    CHECK(orbit.size() == 11);
    CHECK(orbit.front().position[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(simulate_kepler(-0.5, 1.5, 1.0, 0.01), InvalidArgument);
    CHECK_THROWS_AS(simulate_kepler(-0.5, 0.0, 1.0, 0.01), InvalidArgument);
    CHECK_THROWS_AS(simulate_kepler(0.5, 1.0, 1.0, 0.01), InvalidArgument);
    CHECK_THROWS_AS(simulate_kepler(-0.5, 1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("radius and momentum obey energy conservation") {
    const double energy = -0.5;
    const EnergyContext ctx(energy);
    const double period = kepler_period(energy);
    for (double l : {1.0, 0.8, 0.6}) {
        double worst = 0.0;
        for (const auto& s : simulate_kepler(energy, l, period, 1e-4 * period)) {
            const double r = std::hypot(s.position[0], s.position[1], s.position[2]);
            const double p2 = s.momentum[0] * s.momentum[0] + s.momentum[1] * s.momentum[1] + s.momentum[2] * s.momentum[2];
            worst = std::max(worst, std::abs(1.0 / r - (p2 + ctx.p_e_squared()) / 2.0));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("orbit eikonal over a full period is the hodograph arc") {
    const double energy = -0.5;
    const EnergyContext ctx(energy);
    const double period = kepler_period(energy);
    const auto orbit = simulate_kepler(energy, 0.8, period, 1e-4 * period);
    const auto cmp = eikonal_along_orbit(orbit, ctx);
    CHECK(cmp.hodograph_angle == doctest::Approx(2.0 * kPi).epsilon(1e-5));
    CHECK(cmp.geometric == doctest::Approx(ctx.alpha() / ctx.p_e() * cmp.hodograph_angle).epsilon(1e-5));
    CHECK(cmp.relative_difference < 1e-5);
}

TEST_CASE("two evaluations of the orbit eikonal agree") {
    const double energy = -0.5;
    const EnergyContext ctx(energy);
    const double period = kepler_period(energy);
    const auto orbit = simulate_kepler(energy, 0.8, period / 4.0, 1e-4 * period);
    const auto cmp = eikonal_along_orbit(orbit, ctx);
    CHECK(cmp.relative_difference < 1e-5);
    CHECK(cmp.geometric > 0.0);
    CHECK(cmp.hodograph_angle > 0.0);
    CHECK(cmp.geometric == doctest::Approx(cmp.hodograph_angle).epsilon(1e-5));
}

}  // TEST_SUITE
