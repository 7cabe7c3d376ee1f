#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "coulomb/sphere_geometry.hpp"

namespace coulomb {

using Complex = std::complex<double>;

/// Hydrogen quantum numbers (n, l, m); ranges are checked on construction.
class QuantumNumbers {
public:
    QuantumNumbers(int n, int l, int m);

    int n() const noexcept { return n_; }
    int l() const noexcept { return l_; }
    int m() const noexcept { return m_; }

    /// Twice the SU(2) spin carried by level n (2j = n − 1).
    int twice_j() const noexcept { return n_ - 1; }

    friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;

private:
    int n_;
    int l_;
    int m_;
};

/// Spin label (j; m1, m2) stored as doubled integers so that all label
/// arithmetic stays exact.
class SpinLabel {
public:
    SpinLabel(int twice_j, int twice_m1, int twice_m2);

    int twice_j() const noexcept { return tj_; }
    int twice_m1() const noexcept { return tm1_; }
    int twice_m2() const noexcept { return tm2_; }

private:
    int tj_;
    int tm1_;
    int tm2_;
};

/// 2×2 special unitary matrix, row-major.
struct SU2Element {
    std::array<Complex, 4> u{};

    Complex operator()(int row, int col) const noexcept { return u[static_cast<std::size_t>(2 * row + col)]; }

    static SU2Element identity() noexcept { return {{Complex{1.0}, Complex{}, Complex{}, Complex{1.0}}}; }
    friend SU2Element operator*(const SU2Element& a, const SU2Element& b) noexcept;
    SU2Element adjoint() const noexcept;
    Complex determinant() const noexcept { return u[0] * u[3] - u[1] * u[2]; }
};

/// u = π₄·𝟙 + i π⃗·σ⃗ (unit-quaternion embedding of S³ into SU(2)).
SU2Element su2_from_sphere(const SpherePoint4& pi);

/// Condon–Shortley Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | L M⟩ with all
/// arguments doubled. Returns 0 outside the coupling selection rules; throws
/// InvalidArgument when a label/projection pair has mismatched parity or a
/// projection exceeds its spin.
double clebsch_gordan(int twice_j1, int twice_m1, int twice_j2, int twice_m2, int twice_l, int twice_m);

/// Default ceiling on 2j for the representation matrices.
inline constexpr int kMaxTwiceJ = 64;

/// Matrix element D^j_{m1 m2}(u) of the spin-j representation.
Complex wigner_D(const SpinLabel& label, const SU2Element& u, int max_twice_j = kMaxTwiceJ);

/// Full (2j+1)×(2j+1) representation matrix, row-major, rows/columns
/// ordered m = −j, …, j.
std::vector<Complex> wigner_D_matrix(int twice_j, const SU2Element& u, int max_twice_j = kMaxTwiceJ);

/// Orthonormal hyperspherical harmonic Y_{nlm}(π).
Complex hyperspherical_Y(const QuantumNumbers& q, const SpherePoint4& pi);

/// All n² harmonics of level n at π, ordered by l = 0..n−1 then m = −l..l.
std::vector<Complex> hyperspherical_Y_level(int n, const SpherePoint4& pi);

/// Four-dimensional Legendre analog P_n(cos ϑ) = sin nϑ / (n sin ϑ).
double legendre4(int n, double cos_theta);

/// SU(2) character χ_n(ϑ) = sin nϑ / sin ϑ = n·P_n(cos ϑ), taking the angle.
double character(int n, double theta);

/// |Σ_{l,m} Y*_{nlm}(π_b) Y_{nlm}(π_a) − (n²/2π²) P_n(cos ϑ)|.
double addition_theorem_residual(int n, const SpherePoint4& pi_b, const SpherePoint4& pi_a);

/// Product grid on S³: Gauss–Legendre in χ and cos β, uniform in γ.
class S3Grid {
public:
    static constexpr int kMinResolution = 4;
    static constexpr int kDefaultResolution = 64;

    explicit S3Grid(int resolution = kDefaultResolution);

    int resolution() const noexcept { return resolution_; }
    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<SpherePoint4>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    int resolution_;
    std::vector<SpherePoint4> points_;
    std::vector<double> weights_;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  ///< |Q(2N) − Q(N)|
};

/// ∫_{S³} f dΩ₃ at `resolution` points per coordinate, with an error
/// estimate from a second evaluation at twice the resolution. The reported
/// value is the finer one.
QuadratureResult s3_quadrature(const std::function<double(const SpherePoint4&)>& f,
                               int resolution = S3Grid::kDefaultResolution);

/// Largest |G_ij − δ_ij| over the Gram matrix of every Y_nlm with n ≤ n_max,
/// integrated on S3Grid(resolution). Throws InvalidArgument for n_max < 1.
double orthonormality_error(int n_max, int resolution = S3Grid::kDefaultResolution);

}  // namespace coulomb
