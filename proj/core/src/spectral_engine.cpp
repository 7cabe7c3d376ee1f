#include "coulomb/spectral_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "coulomb/errors.hpp"
#include "coulomb/so4_harmonics.hpp"

namespace coulomb {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPiSquared = 2.0 * kPi * kPi;
constexpr int kMaxTerms = 50'000'000;

// (2π)^{3/2} p_E³, the normalization carried by every amplitude.
double amplitude_norm(double p_e) { return std::pow(2.0 * kPi, 1.5) * p_e * p_e * p_e; }

// y / sin y, accurate for small y.
double y_over_sin(double y) {
    if (std::abs(y) < 1e-4) {
        const double y2 = y * y;
        return 1.0 + y2 / 6.0 + 7.0 * y2 * y2 / 360.0;
    }
    return y / std::sin(y);
}

// Iterates χ_n(ϑ) = sin nϑ / sin ϑ for n = 1, 2, … in O(1) per step.
// Away from the poles it rotates e^{inϑ} (re-synchronised periodically);
// near them it runs the Chebyshev U recurrence.
class CharacterSequence {
public:
    explicit CharacterSequence(double theta)
        : theta_(theta), sin_theta_(std::sin(theta)), cos_theta_(std::cos(theta)),
          use_rotation_(std::abs(std::sin(theta)) >= 1e-6), step_(std::polar(1.0, theta)), phase_(step_) {}

    double next() {
        ++n_;
        if (use_rotation_) {
            if (n_ > 1) {
                phase_ = (n_ % 64 == 0) ? std::polar(1.0, n_ * theta_) : phase_ * step_;
            }
            return phase_.imag() / sin_theta_;
        }
        if (n_ == 1) {
            u_prev_ = 0.0;
            u_ = 1.0;
            return u_;
        }
        const double next = 2.0 * cos_theta_ * u_ - u_prev_;
        u_prev_ = u_;
        u_ = next;
        return u_;
    }

private:
    double theta_;
    double sin_theta_;
    double cos_theta_;
    bool use_rotation_;
    std::complex<double> step_;
    std::complex<double> phase_;
    int n_ = 0;
    double u_prev_ = 0.0;
    double u_ = 0.0;
};

// Σ_{n>N} n² e^{−a n²}, valid once n² e^{−a n²} is decreasing past N+1.
double gaussian_tail(int n, double a) {
    const double x = n + 1.0;
    const double head = x * x * std::exp(-a * x * x);
    const double integral =
        x * std::exp(-a * x * x) / (2.0 * a) + std::sqrt(kPi) / (4.0 * std::pow(a, 1.5)) * std::erfc(std::sqrt(a) * x);
    return head + integral;
}

void check_theta(double theta) {
    if (!std::isfinite(theta) || theta < 0.0 || theta > kPi + 1e-12) {
        throw InvalidArgument("angle must lie in [0, pi]");
    }
}

void check_bound_energy(double energy, double alpha) {
    if (!std::isfinite(energy) || !(energy < 0.0)) {
        throw InvalidArgument("fixed-energy amplitude requires a finite negative energy");
    }
    if (!std::isfinite(alpha) || !(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
}

double level_energy(int n, double shift, double alpha) { return -alpha * alpha / (2.0 * (n * static_cast<double>(n) + shift)); }

void check_not_pole(double energy, double alpha, const RTermVariant& variant) {
    const double kappa = alpha * alpha / (-2.0 * energy) - variant.shift();
    const int guess = kappa > 1.0 ? static_cast<int>(std::lround(std::sqrt(kappa))) : 1;
    for (int n = std::max(1, guess - 1); n <= guess + 1; ++n) {
        const double pole = level_energy(n, variant.shift(), alpha);
        if (std::abs(energy - pole) < 1e-12) {
            throw PoleProximity(n, pole, "energy " + std::to_string(energy) + " lies on the pole of level n=" +
                                             std::to_string(n));
        }
    }
}

}  // namespace

RTermVariant::RTermVariant(double c) : c_(c) {
    if (!std::isfinite(c) || c <= -1.0 / 3.0) throw InvalidArgument("RTermVariant: c must be finite and > -1/3");
}

SeriesResult pseudotime_kernel(double theta, double pseudotime, const EnergyContext& ctx, double tol) {
    check_theta(theta);
    if (!std::isfinite(pseudotime) || !(pseudotime > 0.0)) {
        throw InvalidArgument("pseudotime amplitude requires S > 0 (the series diverges otherwise)");
    }
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");

    const double a = ctx.p_e_squared() * pseudotime / 2.0;
    const double prefactor =
        amplitude_norm(ctx.p_e()) / kTwoPiSquared * std::exp(ctx.alpha() * ctx.alpha() * pseudotime / 2.0);
    const double monotone_from = 1.0 / std::sqrt(a);

    CharacterSequence chi(theta);
    SeriesResult out;
    double sum = 0.0;
    for (int n = 1; n <= kMaxTerms; ++n) {
        // n² P_n = n χ_n
        sum += n * chi.next() * std::exp(-a * n * static_cast<double>(n));
        if (n + 1.0 >= monotone_from) {
            const double bound = prefactor * gaussian_tail(n, a);
            if (bound < tol) {
                out.value = prefactor * sum;
                out.tail_bound = bound;
                out.terms = n;
                return out;
            }
        }
    }
    throw NonConvergence(prefactor * gaussian_tail(kMaxTerms, a), "pseudotime kernel: tail bound not reached");
}

SeriesResult pseudotime_amplitude(const SpherePoint4& pi_b, const SpherePoint4& pi_a, double pseudotime,
                                  const EnergyContext& ctx, double tol) {
    return pseudotime_kernel(sphere_angle(pi_b, pi_a), pseudotime, ctx, tol);
}

double legendre4_series_sum(double theta) {
    check_theta(theta);
    if (theta <= 0.0) throw CoincidentPoints("sum of P_n diverges at theta = 0");
    return 0.5 * y_over_sin(kPi - theta);
}

double legendre4_cesaro_sum(double theta, int n_terms) {
    check_theta(theta);
    if (n_terms < 1) throw InvalidArgument("Cesaro sum needs at least one term");
    CharacterSequence chi(theta);
    double sum = 0.0;
    const double denom = n_terms + 1.0;
    for (int n = 1; n <= n_terms; ++n) sum += (1.0 - n / denom) * chi.next() / n;
    return sum;
}

SeriesResult fixed_energy_amplitude(double theta, double energy, double alpha, const RTermVariant& variant,
                                    double tol) {
    check_theta(theta);
    check_bound_energy(energy, alpha);
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (theta <= 0.0) throw CoincidentPoints("fixed-energy amplitude is singular at coincident points");
    check_not_pole(energy, alpha, variant);

    // n²/(An² + B) = 1/A − B/(A² n²) + B²/(A² n² (An² + B))
    const double a = 2.0 * energy;
    const double b = 2.0 * energy * variant.shift() + alpha * alpha;
    const double y = kPi - theta;
    const double sin_theta = std::sin(theta);
    const double ratio = y_over_sin(y);
    const double sum_p = 0.5 * ratio;                             // Σ P_n
    const double sum_p_over_n2 = theta * (2.0 * kPi - theta) / 12.0 * ratio;  // Σ P_n / n²

    const double norm = amplitude_norm(std::sqrt(-2.0 * energy)) / (kPi * kPi);
    const double remainder_scale = norm * b * b / (a * a);
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    const double start_bounding = std::sqrt(2.0 * abs_b / abs_a);

    CharacterSequence chi(theta);
    double remainder = 0.0;
    for (int n = 1; n <= kMaxTerms; ++n) {
        const double nn = n * static_cast<double>(n);
        remainder += chi.next() / (nn * n * (a * nn + b));
        if (n >= start_bounding) {
            const double n4 = nn * nn;
            double bound = 2.0 / (3.0 * abs_a * n4 / n);
            if (sin_theta > 0.0) bound = std::min(bound, 1.0 / (2.0 * sin_theta * abs_a * n4));
            bound *= std::abs(remainder_scale);
            if (bound < tol || b == 0.0) {
                SeriesResult out;
                const double series = sum_p / a - b / (a * a) * sum_p_over_n2 + b * b / (a * a) * remainder;
                out.value = -norm * series;
                out.tail_bound = b == 0.0 ? 0.0 : bound;
                out.terms = n;
                return out;
            }
        }
    }
    throw NonConvergence(std::numeric_limits<double>::infinity(), "fixed-energy amplitude: tail bound not reached");
}

SeriesResult fixed_energy_amplitude(const SpherePoint4& pi_b, const SpherePoint4& pi_a, double energy, double alpha,
                                    const RTermVariant& variant, double tol) {
    return fixed_energy_amplitude(sphere_angle(pi_b, pi_a), energy, alpha, variant, tol);
}

SeriesResult fixed_energy_amplitude_cesaro(double theta, double energy, double alpha, const RTermVariant& variant,
                                           int n_terms) {
    check_theta(theta);
    check_bound_energy(energy, alpha);
    if (theta <= 0.0) throw CoincidentPoints("fixed-energy amplitude is singular at coincident points");
    if (n_terms < 1) throw InvalidArgument("Cesaro sum needs at least one term");
    check_not_pole(energy, alpha, variant);

    const double a = 2.0 * energy;
    const double b = 2.0 * energy * variant.shift() + alpha * alpha;
    const double sin_theta = std::sin(theta);
    const double denom = n_terms + 1.0;

    CharacterSequence chi(theta);
    double sum = 0.0;
    double damping_bound = 0.0;  // Σ (n/(N+1)) |ρ_n|, ρ_n = t_n − P_n/A
    for (int n = 1; n <= n_terms; ++n) {
        const double nn = n * static_cast<double>(n);
        const double weight = 1.0 - n / denom;
        const double chi_n = chi.next();
        sum += weight * n * chi_n / (a * nn + b);
        const double p_bound = sin_theta > 0.0 ? std::min(1.0, 1.0 / (n * sin_theta)) : 1.0;
        damping_bound += (n / denom) * std::abs(b / a) * p_bound / std::abs(a * nn + b);
    }

    // Sawtooth part: |σ_N − Σ| ≤ 2 / ((N+1)|sin(ϑ/2)|), then divided by sin ϑ.
    const double half_sin = std::abs(std::sin(theta / 2.0));
    double bound = std::numeric_limits<double>::infinity();
    if (sin_theta > 0.0 && half_sin > 0.0) {
        const double sawtooth = 2.0 / (denom * half_sin * sin_theta) / std::abs(a);
        const double nn = n_terms * static_cast<double>(n_terms);
        if (std::abs(a) * nn >= 2.0 * std::abs(b)) {
            const double rho_tail = std::abs(b) / (a * a * sin_theta * nn);
            bound = sawtooth + damping_bound + rho_tail;
        }
    }

    const double norm = amplitude_norm(std::sqrt(-2.0 * energy)) / (kPi * kPi);
    SeriesResult out;
    out.value = -norm * sum;
    out.tail_bound = norm * bound;
    out.terms = n_terms;
    return out;
}

std::vector<SpectrumEntry> spectrum(int n_max, const RTermVariant& variant, double alpha, double energy_unit_ev) {
    if (n_max < 1) throw InvalidArgument("spectrum: n_max must be >= 1");
    if (!(alpha > 0.0)) throw InvalidArgument("spectrum: alpha must be positive");
    std::vector<SpectrumEntry> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double e = level_energy(n, variant.shift(), alpha);
        out.push_back({n, e, e * energy_unit_ev});
    }
    return out;
}

namespace {

struct ProbeEval {
    double reciprocal;
    bool on_pole;
};

ProbeEval reciprocal_amplitude(double theta, double energy, const PoleScanConfig& cfg) {
    try {
        const auto amp = fixed_energy_amplitude(theta, energy, cfg.alpha, cfg.variant, cfg.series_tol);
        return {1.0 / amp.value, false};
    } catch (const PoleProximity&) {
        return {0.0, true};
    }
}

}  // namespace

std::vector<LocatedPole> find_poles(const PoleScanConfig& cfg) {
    if (!(cfg.energy_min < cfg.energy_max) || !(cfg.energy_max < 0.0) || !std::isfinite(cfg.energy_min)) {
        throw InvalidArgument("find_poles: need energy_min < energy_max < 0");
    }
    if (cfg.n_expect < 1) throw InvalidArgument("find_poles: n_expect must be >= 1");
    if (cfg.scan_points < 2) throw InvalidArgument("find_poles: scan needs at least two points");
    if (cfg.probe_angles.empty()) throw InvalidArgument("find_poles: no probe angles");
    for (double t : cfg.probe_angles) {
        if (!(t > 0.0 && t <= kPi)) throw InvalidArgument("find_poles: probe angles must lie in (0, pi]");
    }
    const double ground = level_energy(1, cfg.variant.shift(), cfg.alpha);
    if (!(cfg.energy_min < ground)) {
        throw InvalidArgument("find_poles: scan must start below the ground level for the n labels to hold");
    }

    // Scan variable u = 1/√(−E); levels are roughly evenly spaced in u.
    const double u_min = 1.0 / std::sqrt(-cfg.energy_min);
    const double u_max = 1.0 / std::sqrt(-cfg.energy_max);
    const int cells = cfg.scan_points - 1;
    const double du = (u_max - u_min) / cells;
    auto energy_at = [&](int i) { return i == cells ? cfg.energy_max : -1.0 / std::pow(u_min + i * du, 2); };

    // Adjacent levels must land in different cells or their sign changes cancel.
    {
        int prev_cell = -1;
        for (int n = 1;; ++n) {
            const double e = level_energy(n, cfg.variant.shift(), cfg.alpha);
            if (e >= cfg.energy_max) break;
            if (e <= cfg.energy_min) continue;
            const int cell = static_cast<int>(std::floor((1.0 / std::sqrt(-e) - u_min) / du));
            if (cell == prev_cell) {
                throw ResolutionError("find_poles: scan too coarse to separate levels n=" + std::to_string(n - 1) +
                                      " and n=" + std::to_string(n));
            }
            prev_cell = cell;
        }
    }

    std::vector<LocatedPole> found;
    for (double theta : cfg.probe_angles) {
        std::vector<ProbeEval> grid(static_cast<std::size_t>(cfg.scan_points));
        for (int i = 0; i <= cells; ++i) grid[static_cast<std::size_t>(i)] = reciprocal_amplitude(theta, energy_at(i), cfg);

        for (int i = 0; i < cells; ++i) {
            const auto& left = grid[static_cast<std::size_t>(i)];
            const auto& right = grid[static_cast<std::size_t>(i + 1)];
            if (left.on_pole) {
                found.push_back({0, energy_at(i), theta});
                continue;
            }
            if (right.on_pole || !(left.reciprocal * right.reciprocal < 0.0)) continue;

            double lo = energy_at(i), hi = energy_at(i + 1);
            double g_lo = left.reciprocal, g_hi = right.reciprocal;
            bool exact = false;
            for (int iter = 0; iter < 200 && hi - lo > cfg.energy_tol; ++iter) {
                const double mid = 0.5 * (lo + hi);
                const auto g = reciprocal_amplitude(theta, mid, cfg);
                if (g.on_pole) {
                    lo = hi = mid;
                    exact = true;
                    break;
                }
                if ((g.reciprocal < 0.0) == (g_lo < 0.0)) {
                    lo = mid;
                    g_lo = g.reciprocal;
                } else {
                    hi = mid;
                    g_hi = g.reciprocal;
                }
            }
            // A pole drives the reciprocal to zero; a zero of the amplitude
            // drives it to infinity and is discarded.
            const bool is_pole =
                exact || std::abs(g_lo) + std::abs(g_hi) < std::abs(left.reciprocal) + std::abs(right.reciprocal);
            if (is_pole) found.push_back({0, 0.5 * (lo + hi), theta});
        }
    }

    std::sort(found.begin(), found.end(), [](const LocatedPole& x, const LocatedPole& y) { return x.energy < y.energy; });
    std::vector<LocatedPole> merged;
    for (const auto& p : found) {
        if (!merged.empty() && std::abs(p.energy - merged.back().energy) < 1e-8) continue;
        merged.push_back(p);
    }
    if (static_cast<int>(merged.size()) < cfg.n_expect) {
        throw ResolutionError("find_poles: located " + std::to_string(merged.size()) + " poles, expected " +
                              std::to_string(cfg.n_expect));
    }
    merged.resize(static_cast<std::size_t>(cfg.n_expect));
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i].n = static_cast<int>(i) + 1;
    return merged;
}

LaurentFit laurent_fit(const std::vector<double>& energies, const std::vector<double>& amplitudes, double pole_energy) {
    if (energies.size() != amplitudes.size() || energies.size() < 2) {
        throw InvalidArgument("laurent_fit: need at least two matched samples");
    }
    // Linear least squares in x = 1/(E − E_pole).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double x = 1.0 / (energies[i] - pole_energy);
        sx += x;
        sy += amplitudes[i];
        sxx += x * x;
        sxy += x * amplitudes[i];
    }
    const double det = count * sxx - sx * sx;
    if (det == 0.0) throw InvalidArgument("laurent_fit: degenerate sample energies");
    LaurentFit fit;
    fit.residue = (count * sxy - sx * sy) / det;
    fit.constant = (sy - fit.residue * sx) / count;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double model = fit.residue / (energies[i] - pole_energy) + fit.constant;
        fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(model - amplitudes[i]) / std::abs(amplitudes[i]));
    }
    return fit;
}

LevelSpacingReport level_spacing_report(const std::vector<RTermVariant>& variants, int n_max, double alpha,
                                        double energy_unit_ev, double exclusion_threshold) {
    if (variants.empty()) throw InvalidArgument("level_spacing_report: no variants given");
    if (n_max < 1) throw InvalidArgument("level_spacing_report: n_max must be >= 1");
    if (!(alpha > 0.0)) throw InvalidArgument("level_spacing_report: alpha must be positive");

    LevelSpacingReport report;
    report.exclusion_threshold = exclusion_threshold;
    for (const auto& v : variants) {
        VariantVerdict verdict;
        verdict.c = v.c();
        for (int n = 1; n <= n_max; ++n) {
            const double e = level_energy(n, v.shift(), alpha);
            const double e_next = level_energy(n + 1, v.shift(), alpha);
            const double ref = level_energy(n, 0.0, alpha);
            const double ref_spacing = level_energy(n + 1, 0.0, alpha) - ref;

            LevelRow row;
            row.c = v.c();
            row.n = n;
            row.energy = e;
            row.energy_ev = e * energy_unit_ev;
            row.spacing = e_next - e;
            row.spacing_ev = row.spacing * energy_unit_ev;
            row.deviation = (e - ref) / std::abs(ref);
            row.spacing_deviation = (row.spacing - ref_spacing) / std::abs(ref_spacing);
            verdict.max_abs_deviation =
                std::max({verdict.max_abs_deviation, std::abs(row.deviation), std::abs(row.spacing_deviation)});
            report.rows.push_back(row);
        }
        verdict.excluded = verdict.max_abs_deviation > exclusion_threshold;
        report.verdicts.push_back(verdict);
    }
    return report;
}

std::vector<NoMeasureEntry> no_measure_factor_spectrum(int n_max, double alpha, double energy_unit_ev) {
    if (n_max < 2) throw InvalidArgument("no_measure_factor_spectrum: n_max must be >= 2");
    std::vector<NoMeasureEntry> out;
    out.reserve(static_cast<std::size_t>(n_max));
    out.push_back({1, true, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
    for (int n = 2; n <= n_max; ++n) {
        const double e = -alpha * alpha / (2.0 * (n * static_cast<double>(n) - 1.0));
        out.push_back({n, false, e, e * energy_unit_ev});
    }
    return out;
}

}  // namespace coulomb
