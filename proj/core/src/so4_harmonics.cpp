#include "coulomb/so4_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coulomb/errors.hpp"
#include "coulomb/gauss_legendre.hpp"

namespace coulomb {
namespace {

constexpr double kTwoPiSquared = 2.0 * std::numbers::pi * std::numbers::pi;

// log(k!) for k up to a bound well beyond what 2j ≤ 64 requires.
class LogFactorials {
public:
    static constexpr int kSize = 512;

    LogFactorials() {
        table_[0] = 0.0;
        for (int k = 1; k < kSize; ++k) table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
    }

    double operator()(int k) const {
        if (k < 0 || k >= kSize) throw InvalidArgument("log-factorial argument out of range");
        return table_[k];
    }

private:
    std::array<double, kSize> table_{};
};

const LogFactorials& log_factorial() {
    static const LogFactorials table;
    return table;
}

bool same_parity(int a, int b) { return ((a - b) % 2) == 0; }

void check_projection(int tj, int tm, const char* what) {
    if (tj < 0 || !same_parity(tj, tm) || std::abs(tm) > tj) {
        throw InvalidArgument(std::string("clebsch_gordan: invalid label ") + what);
    }
}

Complex int_pow(Complex z, int k) {
    Complex r{1.0, 0.0};
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

}  // namespace

QuantumNumbers::QuantumNumbers(int n, int l, int m) : n_(n), l_(l), m_(m) {
    if (n < 1 || l < 0 || l > n - 1 || m < -l || m > l) {
        throw InvalidArgument("QuantumNumbers: require n >= 1, 0 <= l < n, |m| <= l");
    }
}

SpinLabel::SpinLabel(int twice_j, int twice_m1, int twice_m2) : tj_(twice_j), tm1_(twice_m1), tm2_(twice_m2) {
    if (twice_j < 0 || !same_parity(twice_j, twice_m1) || !same_parity(twice_j, twice_m2) ||
        std::abs(twice_m1) > twice_j || std::abs(twice_m2) > twice_j) {
        throw InvalidArgument("SpinLabel: projections must satisfy |m| <= j with matching parity");
    }
}

SU2Element operator*(const SU2Element& a, const SU2Element& b) noexcept {
    return {{a.u[0] * b.u[0] + a.u[1] * b.u[2], a.u[0] * b.u[1] + a.u[1] * b.u[3],
             a.u[2] * b.u[0] + a.u[3] * b.u[2], a.u[2] * b.u[1] + a.u[3] * b.u[3]}};
}

SU2Element SU2Element::adjoint() const noexcept {
    return {{std::conj(u[0]), std::conj(u[2]), std::conj(u[1]), std::conj(u[3])}};
}

SU2Element su2_from_sphere(const SpherePoint4& pi) {
    const auto& v = pi.pi_vec();
    const double w = pi.pi4();
    // π₄ + i(π₁σ¹ + π₂σ² + π₃σ³)
    return {{Complex{w, v[2]}, Complex{v[1], v[0]}, Complex{-v[1], v[0]}, Complex{w, -v[2]}}};
}

double clebsch_gordan(int tj1, int tm1, int tj2, int tm2, int tl, int tm) {
    check_projection(tj1, tm1, "(j1, m1)");
    check_projection(tj2, tm2, "(j2, m2)");
    check_projection(tl, tm, "(L, M)");

    if (tm != tm1 + tm2) return 0.0;
    if (tl < std::abs(tj1 - tj2) || tl > tj1 + tj2 || !same_parity(tl, tj1 + tj2)) return 0.0;

    const auto& lf = log_factorial();
    // Integer (undoubled) combinations.
    const int a = (tj1 + tj2 - tl) / 2;
    const int b = (tj1 - tj2 + tl) / 2;
    const int c = (-tj1 + tj2 + tl) / 2;
    const int d = (tj1 + tj2 + tl) / 2 + 1;
    const int j1p = (tj1 + tm1) / 2, j1m = (tj1 - tm1) / 2;
    const int j2p = (tj2 + tm2) / 2, j2m = (tj2 - tm2) / 2;
    const int lp = (tl + tm) / 2, lm = (tl - tm) / 2;

    const double log_pre = 0.5 * (std::log(tl + 1.0) + lf(a) + lf(b) + lf(c) - lf(d) + lf(j1p) + lf(j1m) +
                                  lf(j2p) + lf(j2m) + lf(lp) + lf(lm));

    // Denominator factorials (k, a−k, j1−m1−k, j2+m2−k, L−j2+m1+k, L−j1−m2+k).
    const int e = (tl - tj2 + tm1) / 2;
    const int f = (tl - tj1 - tm2) / 2;
    const int k_min = std::max({0, -e, -f});
    const int k_max = std::min({a, j1m, j2p});

    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double log_term = log_pre - (lf(k) + lf(a - k) + lf(j1m - k) + lf(j2p - k) + lf(e + k) + lf(f + k));
        const double term = std::exp(log_term);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

std::vector<Complex> wigner_D_matrix(int twice_j, const SU2Element& u, int max_twice_j) {
    if (twice_j < 0) throw InvalidArgument("wigner_D: negative spin");
    if (twice_j > max_twice_j) throw InvalidArgument("wigner_D: spin exceeds configured maximum");

    const auto& lf = log_factorial();
    const int dim = twice_j + 1;
    // Action on homogeneous polynomials: x^{j+m} y^{j−m} ↦ (u11 x + u21 y)^{j+m}
    // (u12 x + u22 y)^{j−m}, in the basis normalized by √((j+m)!(j−m)!).
    const Complex u11 = u(0, 0), u12 = u(0, 1), u21 = u(1, 0), u22 = u(1, 1);
    std::vector<Complex> d(static_cast<std::size_t>(dim * dim));
    for (int row = 0; row < dim; ++row) {
        const int rp = row;               // j + m'
        const int rm = twice_j - row;     // j − m'
        for (int col = 0; col < dim; ++col) {
            const int cp = col;           // j + m
            const int cm = twice_j - col; // j − m
            const double log_norm = 0.5 * (lf(rp) + lf(rm) + lf(cp) + lf(cm));
            // k counts powers of u11; m + m' = rp + cp − 2j.
            const int mm = rp + cp - twice_j;
            const int k_min = std::max(0, mm);
            const int k_max = std::min(cp, rp);
            Complex sum{};
            for (int k = k_min; k <= k_max; ++k) {
                const double coeff = std::exp(log_norm - (lf(k) + lf(cp - k) + lf(rp - k) + lf(k - mm)));
                sum += coeff * int_pow(u11, k) * int_pow(u21, cp - k) * int_pow(u12, rp - k) * int_pow(u22, k - mm);
            }
            d[static_cast<std::size_t>(row * dim + col)] = sum;
        }
    }
    return d;
}

Complex wigner_D(const SpinLabel& label, const SU2Element& u, int max_twice_j) {
    const int tj = label.twice_j();
    if (tj > max_twice_j) throw InvalidArgument("wigner_D: spin exceeds configured maximum");
    const auto& lf = log_factorial();
    const int rp = (tj + label.twice_m1()) / 2, rm = (tj - label.twice_m1()) / 2;
    const int cp = (tj + label.twice_m2()) / 2, cm = (tj - label.twice_m2()) / 2;
    const double log_norm = 0.5 * (lf(rp) + lf(rm) + lf(cp) + lf(cm));
    const int mm = rp + cp - tj;
    Complex sum{};
    for (int k = std::max(0, mm); k <= std::min(cp, rp); ++k) {
        const double coeff = std::exp(log_norm - (lf(k) + lf(cp - k) + lf(rp - k) + lf(k - mm)));
        sum += coeff * int_pow(u(0, 0), k) * int_pow(u(1, 0), cp - k) * int_pow(u(0, 1), rp - k) *
               int_pow(u(1, 1), k - mm);
    }
    return sum;
}

std::vector<Complex> hyperspherical_Y_level(int n, const SpherePoint4& pi) {
    if (n < 1) throw InvalidArgument("hyperspherical_Y: n must be >= 1");
    const int tj = n - 1;
    const int dim = n;
    const auto d = wigner_D_matrix(tj, su2_from_sphere(pi));
    const double norm = std::sqrt(n / kTwoPiSquared);

    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n * n));
    for (int l = 0; l < n; ++l) {
        for (int m = -l; m <= l; ++m) {
            Complex sum{};
            for (int row = 0; row < dim; ++row) {
                const int tm1 = 2 * row - tj;
                const int tm2 = 2 * m - tm1;
                if (std::abs(tm2) > tj) continue;
                const int col = (tm2 + tj) / 2;
                sum += clebsch_gordan(tj, tm1, tj, tm2, 2 * l, 2 * m) * d[static_cast<std::size_t>(row * dim + col)];
            }
            out.push_back(norm * sum);
        }
    }
    return out;
}

Complex hyperspherical_Y(const QuantumNumbers& q, const SpherePoint4& pi) {
    const int tj = q.twice_j();
    const int dim = tj + 1;
    const auto d = wigner_D_matrix(tj, su2_from_sphere(pi));
    Complex sum{};
    for (int row = 0; row < dim; ++row) {
        const int tm1 = 2 * row - tj;
        const int tm2 = 2 * q.m() - tm1;
        if (std::abs(tm2) > tj) continue;
        const int col = (tm2 + tj) / 2;
        sum += clebsch_gordan(tj, tm1, tj, tm2, 2 * q.l(), 2 * q.m()) * d[static_cast<std::size_t>(row * dim + col)];
    }
    return std::sqrt(q.n() / kTwoPiSquared) * sum;
}

double legendre4(int n, double cos_theta) {
    if (n < 1) throw InvalidArgument("legendre4: n must be >= 1");
    if (!(cos_theta >= -1.0 && cos_theta <= 1.0)) throw InvalidArgument("legendre4: cos_theta outside [-1, 1]");
    const double sin_theta = std::sqrt((1.0 - cos_theta) * (1.0 + cos_theta));
    if (sin_theta < 1e-6) {
        // Chebyshev U_{n−1}(x) = sin nϑ / sin ϑ, stable at the poles.
        double u_prev = 1.0;
        double u = 2.0 * cos_theta;
        if (n == 1) return 1.0;
        for (int k = 2; k < n; ++k) {
            const double next = 2.0 * cos_theta * u - u_prev;
            u_prev = u;
            u = next;
        }
        return u / n;
    }
    const double theta = std::atan2(sin_theta, cos_theta);
    return std::sin(n * theta) / (n * sin_theta);
}

double character(int n, double theta) {
    if (n < 1) throw InvalidArgument("character: n must be >= 1");
    const double s = std::sin(theta);
    if (std::abs(s) < 1e-6) return n * legendre4(n, std::cos(theta));
    return std::sin(n * theta) / s;
}

double addition_theorem_residual(int n, const SpherePoint4& pi_b, const SpherePoint4& pi_a) {
    const auto yb = hyperspherical_Y_level(n, pi_b);
    const auto ya = hyperspherical_Y_level(n, pi_a);
    Complex sum{};
    for (std::size_t i = 0; i < yb.size(); ++i) sum += std::conj(yb[i]) * ya[i];
    const double expected = n * n / kTwoPiSquared * legendre4(n, std::clamp(dot(pi_b, pi_a), -1.0, 1.0));
    return std::abs(sum - expected);
}

S3Grid::S3Grid(int resolution) : resolution_(resolution) {
    if (resolution < kMinResolution) throw InvalidArgument("S3Grid: resolution below minimum");
    const auto chi_rule = gauss_legendre(resolution, 0.0, std::numbers::pi);
    const auto cb_rule = gauss_legendre(resolution);
    const double dgamma = 2.0 * std::numbers::pi / resolution;

    points_.reserve(static_cast<std::size_t>(resolution) * resolution * resolution);
    weights_.reserve(points_.capacity());
    for (std::size_t i = 0; i < chi_rule.size(); ++i) {
        const double chi = chi_rule.nodes[i];
        const double s = std::sin(chi);
        const double w_chi = chi_rule.weights[i] * s * s;
        for (std::size_t k = 0; k < cb_rule.size(); ++k) {
            const double beta = std::acos(cb_rule.nodes[k]);
            const double w = w_chi * cb_rule.weights[k] * dgamma;
            for (int g = 0; g < resolution; ++g) {
                points_.push_back(SpherePoint4::from_angles(chi, beta, g * dgamma));
                weights_.push_back(w);
            }
        }
    }
}

namespace {

double integrate(int resolution, const std::function<double(const SpherePoint4&)>& f) {
    const auto chi_rule = gauss_legendre(resolution, 0.0, std::numbers::pi);
    const auto cb_rule = gauss_legendre(resolution);
    const double dgamma = 2.0 * std::numbers::pi / resolution;
    double sum = 0.0;
    for (std::size_t i = 0; i < chi_rule.size(); ++i) {
        const double s = std::sin(chi_rule.nodes[i]);
        double inner = 0.0;
        for (std::size_t k = 0; k < cb_rule.size(); ++k) {
            const double beta = std::acos(cb_rule.nodes[k]);
            double ring = 0.0;
            for (int g = 0; g < resolution; ++g) ring += f(SpherePoint4::from_angles(chi_rule.nodes[i], beta, g * dgamma));
            inner += cb_rule.weights[k] * ring;
        }
        sum += chi_rule.weights[i] * s * s * inner;
    }
    return sum * dgamma;
}

}  // namespace

QuadratureResult s3_quadrature(const std::function<double(const SpherePoint4&)>& f, int resolution) {
    if (resolution < S3Grid::kMinResolution) throw InvalidArgument("s3_quadrature: resolution below minimum");
    const double coarse = integrate(resolution, f);
    const double fine = integrate(2 * resolution, f);
    return {fine, std::abs(fine - coarse)};
}

double orthonormality_error(int n_max, int resolution) {
    if (n_max < 1) throw InvalidArgument("orthonormality_error: n_max must be >= 1");
    const S3Grid grid(resolution);
    std::size_t count = 0;
    for (int n = 1; n <= n_max; ++n) count += static_cast<std::size_t>(n * n);
    std::vector<Complex> gram(count * count);
    std::vector<Complex> y;
    y.reserve(count);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        y.clear();
        for (int n = 1; n <= n_max; ++n) {
            const auto level = hyperspherical_Y_level(n, grid.points()[p]);
            y.insert(y.end(), level.begin(), level.end());
        }
        const double w = grid.weights()[p];
        for (std::size_t i = 0; i < count; ++i) {
            const Complex wi = w * std::conj(y[i]);
            for (std::size_t j = 0; j < count; ++j) gram[i * count + j] += wi * y[j];
        }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            worst = std::max(worst, std::abs(gram[i * count + j] - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace coulomb
