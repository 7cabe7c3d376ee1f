#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "coulomb/sphere_geometry.hpp"

namespace coulomb {

/// Piecewise-linear curve in momentum space. Consecutive duplicate points
/// are dropped on construction, so a path may collapse to a single point.
class MomentumPath {
public:
    /// Throws InvalidArgument for fewer than two points or non-finite entries.
    explicit MomentumPath(std::vector<Momentum3> points);

    const std::vector<Momentum3>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    const Momentum3& front() const { return points_.front(); }
    const Momentum3& back() const { return points_.back(); }

    /// Path with every segment split into `factor` equal collinear pieces.
    MomentumPath refined(int factor) const;

private:
    std::vector<Momentum3> points_;
};

/// Discretized reparametrization-invariant action
/// Σ_i 2α |Δp_i| / (p̄_i² + p_E²), with p̄_i the segment midpoint.
double eikonal_action(const MomentumPath& path, const EnergyContext& ctx);

/// Gradient of eikonal_action with respect to every path point.
std::vector<Momentum3> eikonal_gradient(const std::vector<Momentum3>& points, const EnergyContext& ctx);

/// Conformal geodesic distance (α/p_E)·ϑ(p_a, p_b).
double geodesic_action(const Momentum3& p_a, const Momentum3& p_b, const EnergyContext& ctx);

struct MinimizerOptions {
    int n_points = 1025;             ///< path points including both endpoints
    double gradient_tol = 1e-7;      ///< max-norm of the interior gradient normal to the path
    int max_iterations = 200000;     ///< per refinement level
    std::uint64_t seed = 20240601;   ///< for the single perturbed restart
};

struct GeodesicResult {
    double action = 0.0;
    double initial_action = 0.0;  ///< straight-line initialization
    double gradient_norm = 0.0;         ///< full interior gradient max-norm
    double normal_gradient_norm = 0.0;  ///< the part used for convergence
    int iterations = 0;
    bool restarted = false;
    std::vector<Momentum3> points;  ///< optimized path, endpoints included

    MomentumPath path() const { return MomentumPath(points); }
};

/// Minimizes eikonal_action over the interior points (endpoints fixed),
/// starting from the straight segment with points spaced evenly in conformal
/// length. Each step is gradient descent on the component of the
/// inverse-metric gradient normal to the path, with Barzilai–Borwein trial
/// steps and Armijo backtracking, followed by redistribution of the points
/// to equal conformal arc length. The solve runs coarse to fine, doubling
/// the point count up to n_points; converged means the normal gradient
/// max-norm is below gradient_tol. A single randomly perturbed restart is
/// attempted if a level stalls.
///
/// Throws InvalidArgument for p_a = p_b or antipodal endpoints (ϑ within
/// 1e-6 of π, where the geodesic is not unique), NonConvergence carrying the
/// final gradient norm if a level still fails after the restart.
GeodesicResult minimize_eikonal(const Momentum3& p_a, const Momentum3& p_b, const EnergyContext& ctx,
                                const MinimizerOptions& options = {});

/// Largest distance of project(p_i) from the 2-plane through the origin
/// spanned by project(p_a) and project(p_b): zero for a great circle.
double great_circle_deviation(const MomentumPath& path, const EnergyContext& ctx);

struct KeplerState {
    std::array<double, 3> position{};
    std::array<double, 3> momentum{};
    double time = 0.0;
};

enum class KeplerIntegrator {
    leapfrog,  ///< kick–drift–kick, second order
    yoshida4,  ///< triple-jump composition of leapfrog, fourth order
};

struct KeplerOptions {
    KeplerIntegrator integrator = KeplerIntegrator::yoshida4;
    int sample_every = 1;
    double collision_radius = 1e-9;
};

/// Period 2π a^{3/2}/√α of a bound orbit with energy E (a = α / 2|E|).
double kepler_period(double energy, double alpha = 1.0);

/// Integrates ẍ = −α x / r³ in the z = 0 plane starting at periapsis on the
/// +x axis. Requires E < 0 and 0 < L ≤ α/√(−2E). Returns the initial state
/// plus every `sample_every`-th step; throws NonConvergence if r falls below
/// the collision radius.
std::vector<KeplerState> simulate_kepler(double energy, double angular_momentum, double duration, double dt,
                                         double alpha = 1.0, const KeplerOptions& options = {});

double kepler_energy(const KeplerState& s, double alpha = 1.0);

struct CircleFit {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
    double max_residual = 0.0;  ///< max |distance − radius|
};

/// Algebraic least-squares circle through the (p_x, p_y) momentum samples.
CircleFit fit_hodograph_circle(const std::vector<KeplerState>& states);

struct EikonalComparison {
    double canonical = 0.0;      ///< −Σ Δp · x̄ (positions at segment midpoints)
    double geometric = 0.0;      ///< eikonal_action of the momentum trace
    double difference = 0.0;
    double relative_difference = 0.0;
    double hodograph_angle = 0.0;  ///< arc swept by the projected momenta on S³
};

/// Evaluates the momentum-space eikonal of an orbit two ways.
EikonalComparison eikonal_along_orbit(const std::vector<KeplerState>& states, const EnergyContext& ctx);

}  // namespace coulomb
