#pragma once

#include <array>
#include <cmath>

namespace coulomb {

/// Natural-unit energy scale Mα²/ℏ² expressed in electron volts.
inline constexpr double kHartreeEv = 27.21;

/// Bound-state energy with its derived momentum scale and pseudomass.
///
/// p_E and μ are always derived from E; there is no way to set them
/// independently, so p_E² = −2E and μ·p_E² = 1 hold by construction.
class EnergyContext {
public:
    /// Throws InvalidArgument unless E < 0 and α > 0 are finite.
    explicit EnergyContext(double energy, double alpha = 1.0, double energy_unit_ev = kHartreeEv);

    /// Context whose momentum scale equals p_E (E = −p_E²/2).
    static EnergyContext from_momentum_scale(double p_e, double alpha = 1.0);

    double energy() const noexcept { return energy_; }
    double p_e() const noexcept { return p_e_; }
    double p_e_squared() const noexcept { return -2.0 * energy_; }
    double pseudomass() const noexcept { return 1.0 / (-2.0 * energy_); }
    double alpha() const noexcept { return alpha_; }
    double energy_unit_ev() const noexcept { return energy_unit_ev_; }

private:
    double energy_;
    double p_e_;
    double alpha_;
    double energy_unit_ev_;
};

struct Momentum3 {
    std::array<double, 3> v{};

    double norm_squared() const noexcept { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }
    double norm() const noexcept { return std::sqrt(norm_squared()); }
    bool is_finite() const noexcept {
        return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
    }

    double operator[](std::size_t i) const noexcept { return v[i]; }
    double& operator[](std::size_t i) noexcept { return v[i]; }

    friend Momentum3 operator+(const Momentum3& a, const Momentum3& b) {
        return {{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2]}};
    }
    friend Momentum3 operator-(const Momentum3& a, const Momentum3& b) {
        return {{a.v[0] - b.v[0], a.v[1] - b.v[1], a.v[2] - b.v[2]}};
    }
    friend Momentum3 operator*(double s, const Momentum3& a) {
        return {{s * a.v[0], s * a.v[1], s * a.v[2]}};
    }
    friend double dot(const Momentum3& a, const Momentum3& b) noexcept {
        return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2];
    }
    friend bool operator==(const Momentum3&, const Momentum3&) = default;
};

/// Unit four-vector (π⃗, π₄) on S³.
class SpherePoint4 {
public:
    /// Normalizes (x1, x2, x3, x4); throws InvalidArgument for a zero or
    /// non-finite vector.
    static SpherePoint4 normalized(double x1, double x2, double x3, double x4);

    /// Accepts the components only if they already have unit norm to 1e-12.
    static SpherePoint4 checked(double x1, double x2, double x3, double x4);

    /// Point at angle χ from the north pole (0,0,0,1) in hyperspherical
    /// coordinates: π₄ = cos χ, π₃ = sin χ cos β, (π₁, π₂) = sin χ sin β (cos γ, sin γ).
    static SpherePoint4 from_angles(double chi, double beta, double gamma);

    const std::array<double, 3>& pi_vec() const noexcept { return pi_vec_; }
    double pi4() const noexcept { return pi4_; }
    std::array<double, 4> components() const noexcept {
        return {pi_vec_[0], pi_vec_[1], pi_vec_[2], pi4_};
    }

    friend double dot(const SpherePoint4& a, const SpherePoint4& b) noexcept {
        return a.pi_vec_[0] * b.pi_vec_[0] + a.pi_vec_[1] * b.pi_vec_[1] +
               a.pi_vec_[2] * b.pi_vec_[2] + a.pi4_ * b.pi4_;
    }

private:
    SpherePoint4(std::array<double, 3> pi_vec, double pi4) : pi_vec_(pi_vec), pi4_(pi4) {}

    std::array<double, 3> pi_vec_;
    double pi4_;
};

/// Stereographic projection of momentum space onto S³ (south pole at p = 0).
SpherePoint4 project(const Momentum3& p, const EnergyContext& ctx);

/// Inverse projection; throws PointAtInfinity when π₄ is within 1e-14 of 1.
Momentum3 unproject(const SpherePoint4& pi, const EnergyContext& ctx);

/// Angle between project(p_b) and project(p_a), in [0, π].
///
/// Evaluated from the closed momentum-space expression rather than by
/// projecting; cos ϑ is clamped to [-1, 1] before the arccos.
double invariant_angle(const Momentum3& p_b, const Momentum3& p_a, const EnergyContext& ctx);

/// Angle between two sphere points, 2·atan2(|a − b|, |a + b|) (accurate for
/// nearly coincident and nearly antipodal pairs).
double sphere_angle(const SpherePoint4& a, const SpherePoint4& b);

/// dΩ₃/d³p = 8 p_E³ / (p² + p_E²)³.
double measure_density(const Momentum3& p, const EnergyContext& ctx);

/// Conformal factor 4 / (p² + p_E²)² of the momentum-space metric.
double metric_factor(const Momentum3& p, const EnergyContext& ctx);

/// ∫ measure_density d³p over all of momentum space, using the radial
/// substitution |p| = p_E tan t on [0, π/2) with an n-point Gauss–Legendre
/// rule. The exact value is the surface 2π² of S³.
double total_measure(const EnergyContext& ctx, int nodes = 64);

}  // namespace coulomb
