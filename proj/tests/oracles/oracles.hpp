#pragma once

// Reference implementations used only by the tests. None of them share code
// paths with the library routines they check.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Clebsch–Gordan table for fixed (j1, j2), built in the product basis by
// applying J− = J1− + J2− to each highest-weight state and orthogonalizing
// the next highest weight against the multiplets already found. Phase:
// ⟨j1 j1; j2 (J − j1) | J J⟩ > 0. All labels doubled.
class ClebschGordanTable {
public:
    ClebschGordanTable(int tj1, int tj2) : tj1_(tj1), tj2_(tj2) {
        const int dim = (tj1 + 1) * (tj2 + 1);
        for (int tJ = tj1 + tj2; tJ >= std::abs(tj1 - tj2); tJ -= 2) {
            // highest weight: orthogonal complement of the larger multiplets at M = J
            std::vector<double> top;
            for (int a = 0; a <= tj1 && top.empty(); ++a) {
                const int tm1 = tj1 - 2 * a;
                const int tm2 = tJ - tm1;
                if (std::abs(tm2) > tj2 || (tj2 - tm2) % 2) continue;
                std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
                v[index(tm1, tm2)] = 1.0;
                for (const auto& [key, w] : states_) {
                    if (key.second != tJ) continue;
                    double proj = 0.0;
                    for (int i = 0; i < dim; ++i) proj += w[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
                    for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= proj * w[static_cast<std::size_t>(i)];
                }
                double norm = 0.0;
                for (double x : v) norm += x * x;
                if (norm < 1e-20) continue;
                norm = std::sqrt(norm);
                for (double& x : v) x /= norm;
                top = std::move(v);
            }
            if (top.empty()) throw std::logic_error("oracle: no highest-weight state");
            // Condon–Shortley phase on the m1 = j1 component
            const int tm2_top = tJ - tj1;
            if (std::abs(tm2_top) <= tj2 && top[index(tj1, tm2_top)] < 0.0) {
                for (double& x : top) x = -x;
            }
            std::vector<double> cur = top;
            for (int tM = tJ;; tM -= 2) {
                states_[{tJ, tM}] = cur;
                if (tM == -tJ) break;
                cur = lower(cur);
                const double c = std::sqrt((tJ * (tJ + 2) - tM * (tM - 2)) / 4.0);
                for (double& x : cur) x /= c;
            }
        }
    }

    double operator()(int tm1, int tm2, int tJ, int tM) const {
        if (tm1 + tm2 != tM) return 0.0;
        const auto it = states_.find({tJ, tM});
        if (it == states_.end()) return 0.0;
        return it->second[index(tm1, tm2)];
    }

private:
    std::size_t index(int tm1, int tm2) const {
        const int a = (tj1_ - tm1) / 2;
        const int b = (tj2_ - tm2) / 2;
        return static_cast<std::size_t>(a * (tj2_ + 1) + b);
    }

    static double lowering(int tj, int tm) { return std::sqrt((tj * (tj + 2) - tm * (tm - 2)) / 4.0); }

    std::vector<double> lower(const std::vector<double>& v) const {
        std::vector<double> out(v.size(), 0.0);
        for (int tm1 = -tj1_; tm1 <= tj1_; tm1 += 2) {
            for (int tm2 = -tj2_; tm2 <= tj2_; tm2 += 2) {
                const double c = v[index(tm1, tm2)];
                if (c == 0.0) continue;
                if (tm1 > -tj1_) out[index(tm1 - 2, tm2)] += lowering(tj1_, tm1) * c;
                if (tm2 > -tj2_) out[index(tm1, tm2 - 2)] += lowering(tj2_, tm2) * c;
            }
        }
        return out;
    }

    int tj1_, tj2_;
    std::map<std::pair<int, int>, std::vector<double>> states_;
};

// Σ_{n≥1} n sin(nϑ) / (n² − ν²) in closed form for 0 < ϑ < 2π (Fourier series
// of sin ν(π − ϑ)); ν² may be negative.
inline double sine_series(double theta, double nu2) {
    if (nu2 > 0.0) {
        const double nu = std::sqrt(nu2);
        return kPi * std::sin(nu * (kPi - theta)) / (2.0 * std::sin(nu * kPi));
    }
    if (nu2 < 0.0) {
        const double k = std::sqrt(-nu2);
        return kPi * std::sinh(k * (kPi - theta)) / (2.0 * std::sinh(k * kPi));
    }
    return 0.5 * (kPi - theta);
}

// −(2π)^{3/2} p_E³/π² Σ n² P_n(cos ϑ) / (2E(n² + 3c) + α²), summed exactly.
inline double fixed_energy_amplitude(double theta, double energy, double alpha, double c) {
    const double pe2 = -2.0 * energy;
    const double pe = std::sqrt(pe2);
    const double nu2 = alpha * alpha / pe2 - 3.0 * c;
    const double sum = sine_series(theta, nu2) / (2.0 * energy * std::sin(theta));
    return -std::pow(2.0 * kPi, 1.5) * pe * pe2 / (kPi * kPi) * sum;
}

// (2π)^{3/2} p_E³ Σ (n²/2π²) P_n exp((−p_E² n² + α²) S/2), in long double
// until the terms underflow.
inline double pseudotime_kernel(double theta, double s, double pe, double alpha) {
    const long double pe2 = static_cast<long double>(pe) * pe;
    long double sum = 0.0L;
    for (int n = 1; n < 100000; ++n) {
        const long double weight = std::exp((-pe2 * n * n + alpha * alpha) * s / 2.0L);
        if (weight < 1e-40L) break;
        long double pn;
        const long double st = std::sin(static_cast<long double>(theta));
        if (std::fabs(st) < 1e-9L) {
            pn = (theta < 1.0 ? 1.0L : ((n % 2) ? 1.0L : -1.0L));
        } else {
            pn = std::sin(static_cast<long double>(n) * theta) / (n * st);
        }
        sum += static_cast<long double>(n) * n / (2.0L * kPi * kPi) * pn * weight;
    }
    return static_cast<double>(std::pow(2.0L * kPi, 1.5L) * pe2 * pe * sum);
}

// Hodograph of a Kepler orbit started at periapsis on +x moving along +y:
// p(φ) = (α/L)(−sin φ, e + cos φ).
struct Hodograph {
    double center_y;
    double radius;
};

inline Hodograph kepler_hodograph(double energy, double l, double alpha) {
    const double e = std::sqrt(std::max(0.0, 1.0 + 2.0 * energy * l * l / (alpha * alpha)));
    return {alpha * e / l, alpha / l};
}

// ∫_{S³} K1(angle(a, x)) K2(angle(x, b)) dΩ(x) for zonal kernels, with a at
// the north pole and b at angle θ. Composite Simpson in χ and β.
inline double zonal_convolution(const std::function<double(double)>& k1, const std::function<double(double)>& k2,
                                double theta, int panels = 800) {
    const double h = kPi / panels;
    auto simpson_weight = [&](int i) { return (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double total = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double chi = i * h;
        const double s = std::sin(chi);
        if (s == 0.0) continue;
        const double outer = k1(chi) * s * s;
        double inner = 0.0;
        for (int k = 0; k <= panels; ++k) {
            const double beta = k * h;
            const double c = std::cos(chi) * std::cos(theta) + s * std::cos(beta) * std::sin(theta);
            inner += simpson_weight(k) * k2(std::acos(std::clamp(c, -1.0, 1.0))) * std::sin(beta);
        }
        total += simpson_weight(i) * outer * inner * h / 3.0;
    }
    return 2.0 * kPi * total * h / 3.0;
}

}  // namespace oracle
