#include "coulomb/classical_eikonal.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "coulomb/errors.hpp"

namespace coulomb {
namespace {

constexpr double kPi = std::numbers::pi;

double max_norm(const std::vector<Momentum3>& g, std::size_t first, std::size_t last) {
    double m = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        for (std::size_t k = 0; k < 3; ++k) m = std::max(m, std::abs(g[i][k]));
    }
    return m;
}

double raw_action(const std::vector<Momentum3>& pts, const EnergyContext& ctx) {
    const double pe2 = ctx.p_e_squared();
    long double sum = 0.0L;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Momentum3 d = pts[i + 1] - pts[i];
        const Momentum3 mid = 0.5 * (pts[i] + pts[i + 1]);
        sum += d.norm() / (mid.norm_squared() + pe2);
    }
    return 2.0 * ctx.alpha() * static_cast<double>(sum);
}

struct DescentOutcome {
    std::vector<Momentum3> points;
    double action;
    double normal_gradient;
    int iterations;
    bool converged;
};

// Points on the straight segment p_a → p_b, spaced evenly in conformal arc
// length. Along t ↦ p_a + t d the density |d|/(|p|² + p_E²) integrates to an
// arctangent, which inverts in closed form.
std::vector<Momentum3> straight_start(const Momentum3& p_a, const Momentum3& p_b, std::size_t n,
                                      const EnergyContext& ctx) {
    const Momentum3 d = p_b - p_a;
    const double dd = dot(d, d);
    const double t0 = -dot(p_a, d) / dd;  // closest approach to the origin
    const double h = std::sqrt((p_a + t0 * d).norm_squared() + ctx.p_e_squared()) / std::sqrt(dd);
    const double s0 = std::atan(-t0 / h);
    const double s1 = std::atan((1.0 - t0) / h);
    std::vector<Momentum3> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        const double t = t0 + h * std::tan(s0 + f * (s1 - s0));
        pts[i] = p_a + t * d;
    }
    pts.front() = p_a;
    pts.back() = p_b;
    return pts;
}

// Moves the interior points along the polyline so that every segment carries
// the same conformal length.
void redistribute(std::vector<Momentum3>& x, double pe2) {
    const std::size_t n = x.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Momentum3 mid = 0.5 * (x[i] + x[i + 1]);
        cum[i + 1] = cum[i] + (x[i + 1] - x[i]).norm() / (mid.norm_squared() + pe2);
    }
    std::vector<Momentum3> y(n);
    y.front() = x.front();
    y.back() = x.back();
    std::size_t seg = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double target = cum.back() * static_cast<double>(i) / static_cast<double>(n - 1);
        while (seg + 2 < n && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double u = len > 0.0 ? (target - cum[seg]) / len : 0.0;
        y[i] = x[seg] + u * (x[seg + 1] - x[seg]);
    }
    x = std::move(y);
}

// Gradient with the component along the local chord x[i+1] − x[i−1] removed.
std::vector<Momentum3> normal_part(const std::vector<Momentum3>& x, std::vector<Momentum3> g) {
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        Momentum3 t = x[i + 1] - x[i - 1];
        const double len = t.norm();
        if (len == 0.0) continue;
        t = (1.0 / len) * t;
        g[i] = g[i] - dot(g[i], t) * t;
    }
    return g;
}

// String-method descent: steps follow the normal part of the Riemannian
// gradient (inverse conformal metric (p² + p_E²)²/4 per point), and after
// each accepted step the points are redistributed to equal conformal arc
// length. Sliding points along the curve is a reparametrization, flat for
// the continuum action and badly conditioned for the discrete one.
DescentOutcome descend(std::vector<Momentum3> x, const EnergyContext& ctx, const MinimizerOptions& opt) {
    const std::size_t first = 1, last = x.size() - 1;
    const double pe2 = ctx.p_e_squared();

    double f = raw_action(x, ctx);
    auto g = normal_part(x, eikonal_gradient(x, ctx));
    double gnorm = max_norm(g, first, last);
    double step = 1e-3;
    std::vector<Momentum3> x_prev, g_prev;
    std::vector<double> w(x.size());

    int iter = 0;
    for (; iter < opt.max_iterations && gnorm >= opt.gradient_tol; ++iter) {
        for (std::size_t i = first; i < last; ++i) {
            const double q = x[i].norm_squared() + pe2;
            w[i] = 0.25 * q * q;
        }
        if (!x_prev.empty()) {
            // preconditioned Barzilai–Borwein: (s·W⁻¹s) / (s·y)
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = first; i < last; ++i) {
                const Momentum3 s = x[i] - x_prev[i];
                const Momentum3 y = g[i] - g_prev[i];
                ss += dot(s, s) / w[i];
                sy += dot(s, y);
            }
            if (sy > 0.0 && std::isfinite(ss / sy)) step = ss / sy;
        }
        double gwg = 0.0;
        for (std::size_t i = first; i < last; ++i) gwg += w[i] * dot(g[i], g[i]);

        std::vector<Momentum3> trial = x;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = first; i < last; ++i) trial[i] = x[i] - (step * w[i]) * g[i];
            if (raw_action(trial, ctx) <= f - 1e-4 * step * gwg) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stalled at roundoff
        redistribute(trial, pe2);

        x_prev = std::move(x);
        g_prev = std::move(g);
        x = std::move(trial);
        f = raw_action(x, ctx);
        g = normal_part(x, eikonal_gradient(x, ctx));
        gnorm = max_norm(g, first, last);
    }
    return {std::move(x), f, gnorm, iter, gnorm < opt.gradient_tol};
}

std::vector<Momentum3> with_midpoints(const std::vector<Momentum3>& x) {
    std::vector<Momentum3> y;
    y.reserve(2 * x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        y.push_back(x[i]);
        y.push_back(0.5 * (x[i] + x[i + 1]));
    }
    y.push_back(x.back());
    return y;
}

std::array<double, 4> as_array(const SpherePoint4& s) { return s.components(); }

}  // namespace

MomentumPath::MomentumPath(std::vector<Momentum3> points) {
    if (points.size() < 2) throw InvalidArgument("MomentumPath: need at least two points");
    for (const auto& p : points) {
        if (!p.is_finite()) throw InvalidArgument("MomentumPath: non-finite point");
    }
    points_.reserve(points.size());
    for (const auto& p : points) {
        if (points_.empty() || !(points_.back() == p)) points_.push_back(p);
    }
}

MomentumPath MomentumPath::refined(int factor) const {
    if (factor < 1) throw InvalidArgument("MomentumPath::refined: factor must be >= 1");
    if (points_.size() < 2) return *this;
    std::vector<Momentum3> out;
    out.reserve((points_.size() - 1) * static_cast<std::size_t>(factor) + 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const Momentum3 d = points_[i + 1] - points_[i];
        for (int k = 0; k < factor; ++k) out.push_back(points_[i] + (static_cast<double>(k) / factor) * d);
    }
    out.push_back(points_.back());
    return MomentumPath(std::move(out));
}

double eikonal_action(const MomentumPath& path, const EnergyContext& ctx) { return raw_action(path.points(), ctx); }

std::vector<Momentum3> eikonal_gradient(const std::vector<Momentum3>& pts, const EnergyContext& ctx) {
    const double pe2 = ctx.p_e_squared();
    const double scale = 2.0 * ctx.alpha();
    std::vector<Momentum3> g(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Momentum3 d = pts[i + 1] - pts[i];
        const double len = d.norm();
        if (len == 0.0) continue;
        const Momentum3 mid = 0.5 * (pts[i] + pts[i + 1]);
        const double q = mid.norm_squared() + pe2;
        // ∂/∂p_{i+1} and ∂/∂p_i of |d|/q; the midpoint contributes half to each.
        const Momentum3 along = (scale / (len * q)) * d;
        const Momentum3 radial = (scale * len / (q * q)) * mid;
        g[i + 1] = g[i + 1] + along - radial;
        g[i] = g[i] - along - radial;
    }
    return g;
}

double geodesic_action(const Momentum3& p_a, const Momentum3& p_b, const EnergyContext& ctx) {
    return ctx.alpha() / ctx.p_e() * invariant_angle(p_b, p_a, ctx);
}

GeodesicResult minimize_eikonal(const Momentum3& p_a, const Momentum3& p_b, const EnergyContext& ctx,
                                const MinimizerOptions& opt) {
    if (!p_a.is_finite() || !p_b.is_finite()) throw InvalidArgument("minimize_eikonal: non-finite endpoint");
    if (p_a == p_b) throw InvalidArgument("minimize_eikonal: endpoints coincide");
    if (opt.n_points < 3) throw InvalidArgument("minimize_eikonal: need at least one interior point");
    if (invariant_angle(p_b, p_a, ctx) > kPi - 1e-6) {
        throw InvalidArgument("minimize_eikonal: antipodal endpoints have no unique geodesic");
    }

    const auto n = static_cast<std::size_t>(opt.n_points);
    const Momentum3 d = p_b - p_a;

    GeodesicResult result;
    result.initial_action = raw_action(straight_start(p_a, p_b, n, ctx), ctx);

    // Coarse-to-fine: halve the segment count while it stays even and at
    // least 64, solve from the straight line there, then double the points
    // and re-solve from the previous shape.
    std::size_t coarse = n - 1;
    while (coarse % 2 == 0 && coarse / 2 >= 64) coarse /= 2;

    std::vector<Momentum3> x = straight_start(p_a, p_b, coarse + 1, ctx);
    DescentOutcome outcome{};
    int total_iterations = 0;
    while (true) {
        outcome = descend(x, ctx, opt);
        total_iterations += outcome.iterations;
        if (!outcome.converged && !result.restarted) {
            std::mt19937_64 rng(opt.seed);
            std::normal_distribution<double> noise(0.0, 1e-3 * (d.norm() + ctx.p_e()));
            auto perturbed = outcome.points;
            for (std::size_t i = 1; i + 1 < perturbed.size(); ++i) {
                for (std::size_t k = 0; k < 3; ++k) perturbed[i][k] += noise(rng);
            }
            outcome = descend(perturbed, ctx, opt);
            total_iterations += outcome.iterations;
            result.restarted = true;
        }
        if (!outcome.converged) {
            std::ostringstream msg;
            msg << "minimize_eikonal: gradient max-norm " << std::scientific << std::setprecision(3)
                << outcome.normal_gradient << " above tolerance " << opt.gradient_tol << " at "
                << outcome.points.size() << " points";
            throw NonConvergence(outcome.normal_gradient, msg.str());
        }
        x = std::move(outcome.points);
        if (x.size() >= n) break;
        x = with_midpoints(x);
        redistribute(x, ctx.p_e_squared());
    }
    outcome.points = std::move(x);
    result.action = outcome.action;
    result.normal_gradient_norm = outcome.normal_gradient;
    result.gradient_norm = max_norm(eikonal_gradient(outcome.points, ctx), 1, n - 1);
    result.iterations = total_iterations;
    result.points = std::move(outcome.points);
    return result;
}

double great_circle_deviation(const MomentumPath& path, const EnergyContext& ctx) {
    const auto a = as_array(project(path.front(), ctx));
    const auto b_raw = as_array(project(path.back(), ctx));
    // Orthonormal basis {a, e} of the plane.
    double ab = 0.0;
    for (std::size_t k = 0; k < 4; ++k) ab += a[k] * b_raw[k];
    std::array<double, 4> e{};
    double en = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        e[k] = b_raw[k] - ab * a[k];
        en += e[k] * e[k];
    }
    en = std::sqrt(en);
    if (en == 0.0) throw InvalidArgument("great_circle_deviation: endpoints project to the same or antipodal points");
    for (auto& v : e) v /= en;

    double worst = 0.0;
    for (const auto& p : path.points()) {
        const auto x = as_array(project(p, ctx));
        double xa = 0.0, xe = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            xa += x[k] * a[k];
            xe += x[k] * e[k];
        }
        double r2 = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const double r = x[k] - xa * a[k] - xe * e[k];
            r2 += r * r;
        }
        worst = std::max(worst, std::sqrt(r2));
    }
    return worst;
}

double kepler_period(double energy, double alpha) {
    if (!(energy < 0.0) || !(alpha > 0.0)) throw InvalidArgument("kepler_period: need E < 0 and alpha > 0");
    const double a = alpha / (-2.0 * energy);
    return 2.0 * kPi * std::pow(a, 1.5) / std::sqrt(alpha);
}

double kepler_energy(const KeplerState& s, double alpha) {
    const auto& x = s.position;
    const auto& p = s.momentum;
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return 0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - alpha / r;
}

namespace {

struct PlaneState {
    double x, y, px, py;
};

double radius(const PlaneState& s) { return std::hypot(s.x, s.y); }

void kick(PlaneState& s, double h, double alpha) {
    const double r = radius(s);
    const double f = -alpha / (r * r * r);
    s.px += h * f * s.x;
    s.py += h * f * s.y;
}

void leapfrog_step(PlaneState& s, double h, double alpha) {
    kick(s, 0.5 * h, alpha);
    s.x += h * s.px;
    s.y += h * s.py;
    kick(s, 0.5 * h, alpha);
}

}  // namespace

std::vector<KeplerState> simulate_kepler(double energy, double angular_momentum, double duration, double dt,
                                         double alpha, const KeplerOptions& options) {
    if (!std::isfinite(energy) || !(energy < 0.0)) throw InvalidArgument("simulate_kepler: need E < 0");
    if (!(alpha > 0.0)) throw InvalidArgument("simulate_kepler: alpha must be positive");
    const double l_max = alpha / std::sqrt(-2.0 * energy);
    if (!(angular_momentum > 0.0) || angular_momentum > l_max * (1.0 + 1e-12)) {
        throw InvalidArgument("simulate_kepler: need 0 < L <= alpha/sqrt(-2E) for a bound orbit");
    }
    if (!(dt > 0.0) || !(duration >= 0.0)) throw InvalidArgument("simulate_kepler: need dt > 0 and duration >= 0");
    if (options.sample_every < 1) throw InvalidArgument("simulate_kepler: sample_every must be >= 1");

    // Periapsis: E r² + α r − L²/2 = 0, smaller root.
    const double disc = std::max(0.0, alpha * alpha + 2.0 * energy * angular_momentum * angular_momentum);
    const double r_peri = (alpha - std::sqrt(disc)) / (-2.0 * energy);
    PlaneState s{r_peri, 0.0, 0.0, angular_momentum / r_peri};

    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2);
    const double w0 = -cbrt2 * w1;

    const auto steps = static_cast<std::int64_t>(std::llround(duration / dt));
    std::vector<KeplerState> out;
    out.reserve(static_cast<std::size_t>(steps / options.sample_every + 2));
    auto record = [&](double t) { out.push_back({{s.x, s.y, 0.0}, {s.px, s.py, 0.0}, t}); };
    record(0.0);
    for (std::int64_t i = 1; i <= steps; ++i) {
        if (options.integrator == KeplerIntegrator::leapfrog) {
            leapfrog_step(s, dt, alpha);
        } else {
            leapfrog_step(s, w1 * dt, alpha);
            leapfrog_step(s, w0 * dt, alpha);
            leapfrog_step(s, w1 * dt, alpha);
        }
        if (radius(s) < options.collision_radius) {
            throw NonConvergence(radius(s), "simulate_kepler: collision at t = " + std::to_string(i * dt));
        }
        if (i % options.sample_every == 0 || i == steps) record(static_cast<double>(i) * dt);
    }
    return out;
}

CircleFit fit_hodograph_circle(const std::vector<KeplerState>& states) {
    if (states.size() < 3) throw InvalidArgument("fit_hodograph_circle: need at least three samples");
    // x² + y² + D x + E y + F = 0, normal equations in (D, E, F).
    double m[3][3] = {};
    double rhs[3] = {};
    for (const auto& st : states) {
        const double x = st.momentum[0], y = st.momentum[1];
        const double row[3] = {x, y, 1.0};
        const double target = -(x * x + y * y);
        for (int i = 0; i < 3; ++i) {
            rhs[i] += row[i] * target;
            for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
        }
    }
    // Gaussian elimination with partial pivoting.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[perm[r]][col]) > std::abs(m[perm[piv]][col])) piv = r;
        }
        std::swap(perm[col], perm[piv]);
        const double diag = m[perm[col]][col];
        if (diag == 0.0) throw InvalidArgument("fit_hodograph_circle: degenerate samples");
        for (int r = col + 1; r < 3; ++r) {
            const double factor = m[perm[r]][col] / diag;
            for (int c = col; c < 3; ++c) m[perm[r]][c] -= factor * m[perm[col]][c];
            rhs[perm[r]] -= factor * rhs[perm[col]];
        }
    }
    double sol[3];
    for (int col = 2; col >= 0; --col) {
        double acc = rhs[perm[col]];
        for (int c = col + 1; c < 3; ++c) acc -= m[perm[col]][c] * sol[c];
        sol[col] = acc / m[perm[col]][col];
    }
    CircleFit fit;
    fit.center_x = -0.5 * sol[0];
    fit.center_y = -0.5 * sol[1];
    fit.radius = std::sqrt(fit.center_x * fit.center_x + fit.center_y * fit.center_y - sol[2]);
    for (const auto& st : states) {
        const double dist = std::hypot(st.momentum[0] - fit.center_x, st.momentum[1] - fit.center_y);
        fit.max_residual = std::max(fit.max_residual, std::abs(dist - fit.radius));
    }
    return fit;
}

EikonalComparison eikonal_along_orbit(const std::vector<KeplerState>& states, const EnergyContext& ctx) {
    if (states.size() < 2) throw InvalidArgument("eikonal_along_orbit: need at least two states");
    EikonalComparison out;
    std::vector<Momentum3> trace;
    trace.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        trace.push_back({{s.momentum[0], s.momentum[1], s.momentum[2]}});
        if (i == 0) continue;
        const auto& prev = states[i - 1];
        double dpx = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            dpx += (s.momentum[k] - prev.momentum[k]) * 0.5 * (s.position[k] + prev.position[k]);
        }
        out.canonical -= dpx;
    }
    out.geometric = raw_action(trace, ctx);
    double angle = 0.0;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        angle += sphere_angle(project(trace[i], ctx), project(trace[i + 1], ctx));
    }
    out.difference = out.canonical - out.geometric;
    const double scale = std::max(std::abs(out.canonical), std::abs(out.geometric));
    out.relative_difference = scale > 0.0 ? std::abs(out.difference) / scale : 0.0;
    out.hodograph_angle = angle;
    return out;
}

}  // namespace coulomb
