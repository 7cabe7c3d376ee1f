#include "coulomb/sliced_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "coulomb/errors.hpp"
#include "coulomb/so4_harmonics.hpp"
#include "coulomb/spectral_engine.hpp"

namespace coulomb {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPiSquared = 2.0 * kPi * kPi;
constexpr int kNormalizationNodes = 1024;

double flat_gaussian(double theta, double width2) { return std::exp(-theta * theta / (2.0 * width2)); }

}  // namespace

void SliceConfig::validate() const {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw InvalidArgument("SliceConfig: epsilon must be > 0");
    if (num_slices < 1) throw InvalidArgument("SliceConfig: num_slices must be >= 1");
    if (n_modes < 1) throw InvalidArgument("SliceConfig: n_modes must be >= 1");
    if (grid_points < 4 * n_modes) throw InvalidArgument("SliceConfig: grid_points must be >= 4 * n_modes");
    if (!std::isfinite(c)) throw InvalidArgument("SliceConfig: c must be finite");
}

double measure_factor_shift() { return kUnitS3Curvature / 6.0; }

double curvature_term_shift(double c) { return c * kUnitS3Curvature / 2.0; }

double slice_multiplier(const SliceConfig& cfg, const EnergyContext& ctx) {
    double shift = curvature_term_shift(cfg.c);
    if (cfg.with_measure_factor) shift += measure_factor_shift();
    return std::exp(-cfg.epsilon * ctx.p_e_squared() * shift / 2.0);
}

ShortTimeKernel::ShortTimeKernel(const SliceConfig& cfg, const EnergyContext& ctx)
    : width2_(ctx.p_e_squared() * cfg.epsilon), inv_norm_(0.0), multiplier_(slice_multiplier(cfg, ctx)) {
    cfg.validate();
    const auto rule = gauss_legendre(kNormalizationNodes, 0.0, kPi);
    double z = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double s = std::sin(rule.nodes[i]);
        z += rule.weights[i] * 4.0 * kPi * s * s * flat_gaussian(rule.nodes[i], width2_);
    }
    inv_norm_ = 1.0 / z;
}

double ShortTimeKernel::operator()(double theta) const {
    return multiplier_ * inv_norm_ * flat_gaussian(theta, width2_);
}

double short_time_kernel(double theta, const SliceConfig& cfg, const EnergyContext& ctx) {
    if (!(theta >= 0.0 && theta <= kPi)) throw InvalidArgument("short_time_kernel: angle outside [0, pi]");
    return ShortTimeKernel(cfg, ctx)(theta);
}

GaussLegendreRule theta_grid(int grid_points) { return gauss_legendre(grid_points, 0.0, kPi); }

ModeCoefficients::ModeCoefficients(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("ModeCoefficients: no modes");
    log_abs_.reserve(values.size());
    negative_.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("ModeCoefficients: non-finite coefficient");
        log_abs_.push_back(std::log(std::abs(v)));
        negative_.push_back(v < 0.0);
    }
}

double ModeCoefficients::log_abs(int n) const {
    if (n < 1 || n > n_modes()) throw InvalidArgument("ModeCoefficients: mode index out of range");
    return log_abs_[static_cast<std::size_t>(n - 1)] * static_cast<double>(power_);
}

double ModeCoefficients::value(int n) const {
    const double magnitude = std::exp(log_abs(n));
    const bool negative = negative_[static_cast<std::size_t>(n - 1)] && (power_ % 2 != 0);
    return negative ? -magnitude : magnitude;
}

std::vector<double> ModeCoefficients::values() const {
    std::vector<double> out(log_abs_.size());
    for (int n = 1; n <= n_modes(); ++n) out[static_cast<std::size_t>(n - 1)] = value(n);
    return out;
}

ModeCoefficients ModeCoefficients::composed(std::int64_t slices) const {
    if (slices < 1) throw InvalidArgument("compose_slices: slice count must be >= 1");
    if (power_ > std::numeric_limits<std::int64_t>::max() / slices) {
        throw InvalidArgument("compose_slices: slice count overflows");
    }
    ModeCoefficients out = *this;
    out.power_ = power_ * slices;
    return out;
}

ModeCoefficients kernel_to_modes(const std::vector<double>& samples, const SliceConfig& cfg, KernelMeasure measure,
                                 const EnergyContext* ctx) {
    cfg.validate();
    const auto grid = theta_grid(cfg.grid_points);
    if (samples.size() != grid.size()) throw InvalidArgument("kernel_to_modes: sample count does not match grid");

    double weight = 1.0;
    if (measure == KernelMeasure::amplitude) {
        if (ctx == nullptr) throw InvalidArgument("kernel_to_modes: amplitude measure needs an energy context");
        weight = std::pow(2.0 * kPi, 1.5) * std::pow(ctx->p_e(), 3);
    }

    std::vector<double> k(static_cast<std::size_t>(cfg.n_modes), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double theta = grid.nodes[i];
        const double s = std::sin(theta);
        // χ_n sin²ϑ = sin nϑ · sin ϑ
        const double base = grid.weights[i] * samples[i] * s;
        for (int n = 1; n <= cfg.n_modes; ++n) k[static_cast<std::size_t>(n - 1)] += base * std::sin(n * theta);
    }
    for (int n = 1; n <= cfg.n_modes; ++n) k[static_cast<std::size_t>(n - 1)] *= 4.0 * kPi / (n * weight);

    if (std::abs(k.back()) > 0.1 * std::abs(k.front())) {
        throw ResolutionError("kernel_to_modes: mode " + std::to_string(cfg.n_modes) +
                              " still carries more than 10% of mode 1; raise n_modes");
    }
    return ModeCoefficients(std::move(k));
}

ModeCoefficients compose_slices(const ModeCoefficients& modes, std::int64_t num_slices) {
    return modes.composed(num_slices);
}

double modes_to_kernel(const ModeCoefficients& modes, double theta) {
    double sum = 0.0;
    for (int n = 1; n <= modes.n_modes(); ++n) sum += modes.value(n) * n / kTwoPiSquared * character(n, theta);
    return sum;
}

double calibration_error(double epsilon, const EnergyContext& ctx, int n_modes, int grid_points) {
    SliceConfig cfg;
    cfg.epsilon = epsilon;
    cfg.n_modes = n_modes;
    cfg.grid_points = grid_points;
    // α = 0 is modelled by dividing out the e^{α²ε/2} factor of the kernel.
    const double alpha_factor = std::exp(ctx.alpha() * ctx.alpha() * epsilon / 2.0);
    const auto samples = sample_kernel(
        [&](double theta) { return pseudotime_kernel(theta, epsilon, ctx, 1e-18).value / alpha_factor; },
        grid_points);
    const auto modes = kernel_to_modes(samples, cfg, KernelMeasure::amplitude, &ctx);
    double worst = 0.0;
    for (int n = 1; n <= n_modes; ++n) {
        const double expected = std::exp(-ctx.p_e_squared() * n * n * epsilon / 2.0);
        worst = std::max(worst, std::abs(modes.value(n) / expected - 1.0));
    }
    return worst;
}

double analytic_kappa(int n, bool with_measure_factor, double c) {
    double kappa = n * static_cast<double>(n) - 1.0 + curvature_term_shift(c);
    if (with_measure_factor) kappa += measure_factor_shift();
    return kappa;
}

namespace {

// Value at ε = 0 of the polynomial through (ε_i, λ_i) (Neville).
double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values) {
    std::vector<double> p = values;
    const std::size_t m = eps.size();
    for (std::size_t level = 1; level < m; ++level) {
        for (std::size_t i = 0; i + level < m; ++i) {
            const double x0 = eps[i], x1 = eps[i + level];
            p[i] = (x0 * p[i + 1] - x1 * p[i]) / (x0 - x1);
        }
    }
    return p[0];
}

}  // namespace

std::vector<LevelEstimate> extract_spectrum(const SpectrumSweep& sweep) {
    if (sweep.epsilons.size() < 3) throw InvalidArgument("extract_spectrum: need at least three step sizes");
    if (!(sweep.total_pseudotime > 0.0)) throw InvalidArgument("extract_spectrum: total pseudotime must be > 0");
    if (sweep.n_levels < 1 || sweep.n_levels > sweep.n_modes) {
        throw InvalidArgument("extract_spectrum: n_levels must lie in [1, n_modes]");
    }
    if (!(sweep.alpha > 0.0)) throw InvalidArgument("extract_spectrum: alpha must be positive");

    std::vector<double> eps = sweep.epsilons;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    // two Richardson levels use the three finest steps
    eps.erase(eps.begin(), eps.end() - 3);

    const EnergyContext unit = EnergyContext::from_momentum_scale(1.0, sweep.alpha);
    std::vector<std::vector<double>> rates(static_cast<std::size_t>(sweep.n_levels));
    for (double e : eps) {
        const double slices_real = sweep.total_pseudotime / e;
        const auto slices = static_cast<std::int64_t>(std::llround(slices_real));
        if (slices < 1 || std::abs(slices_real - static_cast<double>(slices)) > 1e-9 * slices_real) {
            throw InvalidArgument("extract_spectrum: total pseudotime must be a whole number of slices");
        }
        SliceConfig cfg;
        cfg.epsilon = e;
        cfg.num_slices = static_cast<int>(slices);
        cfg.grid_points = sweep.grid_points;
        cfg.with_measure_factor = sweep.with_measure_factor;
        cfg.c = sweep.c;
        cfg.n_modes = sweep.n_modes;

        const ShortTimeKernel kernel(cfg, unit);
        const auto modes = compose_slices(kernel_to_modes(sample_kernel(kernel, cfg.grid_points), cfg), slices);
        for (int n = 1; n <= sweep.n_levels; ++n) {
            rates[static_cast<std::size_t>(n - 1)].push_back(-modes.log_abs(n) / sweep.total_pseudotime);
        }
    }

    std::vector<LevelEstimate> out;
    for (int n = 1; n <= sweep.n_levels; ++n) {
        const auto& r = rates[static_cast<std::size_t>(n - 1)];
        const double d0 = std::abs(r[0] - r[1]);
        const double d1 = std::abs(r[1] - r[2]);
        if (d0 > 1e-12 && !(d1 < d0)) {
            throw NonConvergence(d1, "extract_spectrum: decay rate of level n=" + std::to_string(n) +
                                         " does not converge monotonically in epsilon");
        }
        LevelEstimate est;
        est.n = n;
        est.decay_rates = r;
        est.extrapolated_rate = extrapolate_to_zero(eps, r);
        est.kappa = 2.0 * est.extrapolated_rate / unit.p_e_squared();
        // κ at roundoff level means the mode does not decay: no pole in E.
        est.bound = est.kappa > 1e-6;
        est.energy = est.bound ? -sweep.alpha * sweep.alpha / (2.0 * est.kappa)
                               : std::numeric_limits<double>::quiet_NaN();
        const double target = analytic_kappa(n, sweep.with_measure_factor, sweep.c);
        est.analytic_energy =
            target > 0.0 ? -sweep.alpha * sweep.alpha / (2.0 * target) : std::numeric_limits<double>::quiet_NaN();
        out.push_back(est);
    }
    return out;
}

DiscriminationReport discrimination_report(const SpectrumSweep& base, const std::vector<double>& c_values,
                                           bool include_measure_off, double tolerance) {
    struct Variant {
        double c;
        bool measure;
    };
    std::vector<Variant> variants;
    for (double c : c_values) variants.push_back({c, true});
    if (include_measure_off) variants.push_back({0.0, false});

    DiscriminationReport report;
    for (const auto& v : variants) {
        SpectrumSweep sweep = base;
        sweep.c = v.c;
        sweep.with_measure_factor = v.measure;
        const auto levels = extract_spectrum(sweep);

        DiscriminationVerdict verdict;
        verdict.c = v.c;
        verdict.with_measure_factor = v.measure;
        for (const auto& lv : levels) {
            DiscriminationRow row;
            row.c = v.c;
            row.with_measure_factor = v.measure;
            row.n = lv.n;
            row.bound = lv.bound;
            row.extracted_energy = lv.energy;
            row.analytic_energy = lv.analytic_energy;
            row.physical_energy = -base.alpha * base.alpha / (2.0 * lv.n * lv.n);
            row.deviation_percent = lv.bound ? 100.0 * std::abs(lv.energy - row.physical_energy) /
                                                   std::abs(row.physical_energy)
                                             : std::numeric_limits<double>::quiet_NaN();
            report.rows.push_back(row);
            if (lv.n == 1) {
                verdict.has_ground_state = lv.bound;
                verdict.ground_deviation_percent = row.deviation_percent;
                verdict.excluded = !lv.bound || std::abs(lv.energy - row.physical_energy) > tolerance;
            }
        }
        report.verdicts.push_back(verdict);
    }
    return report;
}

}  // namespace coulomb
