#pragma once

#include <cstdint>
#include <vector>

#include "coulomb/gauss_legendre.hpp"
#include "coulomb/sphere_geometry.hpp"

namespace coulomb {

/// Scalar curvature (D−1)(D−2)/r² of a D-dimensional sphere of radius r.
constexpr double scalar_curvature(int dimension, double radius) {
    return (dimension - 1.0) * (dimension - 2.0) / (radius * radius);
}

/// R̄ of the unit S³ embedded in four dimensions.
inline constexpr double kUnitS3Curvature = scalar_curvature(4, 1.0);

/// One time slice of the sphere path integral and the knobs under test.
struct SliceConfig {
    double epsilon = 0.01;
    int num_slices = 1;
    int grid_points = 256;
    bool with_measure_factor = true;
    double c = 0.0;
    int n_modes = 32;

    double total_pseudotime() const noexcept { return epsilon * num_slices; }

    /// Throws InvalidArgument for ε ≤ 0, num_slices < 1, n_modes < 1 or
    /// grid_points < 4·n_modes.
    void validate() const;
};

/// Shift of n² (in units of p_E²/2 per unit pseudotime) contributed by the
/// curvature measure factor: R̄/6, i.e. n² − 1 → n².
double measure_factor_shift();

/// Shift of n² contributed by an extra c·R̄/2 Hamiltonian term: 3c on S³.
double curvature_term_shift(double c);

/// Common per-slice multiplier exp(−ε p_E² Δ/2) from the measure factor
/// (when enabled) and the c-term.
double slice_multiplier(const SliceConfig& cfg, const EnergyContext& ctx);

/// Short-time transfer kernel on S³ as a function of the separation angle.
///
/// Flat Gaussian exp(−ϑ²/(2 p_E² ε)) normalized to unit integral over S³
/// (the free Laplace–Beltrami evolution to first order in ε); the measure
/// factor and the c-term enter only through slice_multiplier.
class ShortTimeKernel {
public:
    ShortTimeKernel(const SliceConfig& cfg, const EnergyContext& ctx);

    double operator()(double theta) const;

    double width_squared() const noexcept { return width2_; }
    double multiplier() const noexcept { return multiplier_; }

private:
    double width2_;
    double inv_norm_;
    double multiplier_;
};

double short_time_kernel(double theta, const SliceConfig& cfg, const EnergyContext& ctx);

/// Gauss–Legendre nodes on [0, π] used to sample zonal kernels.
GaussLegendreRule theta_grid(int grid_points);

/// Samples kernel(ϑ) on theta_grid(cfg.grid_points).
template <typename Kernel>
std::vector<double> sample_kernel(const Kernel& kernel, int grid_points) {
    const auto grid = theta_grid(grid_points);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = kernel(grid.nodes[i]);
    return out;
}

/// Integration measure a zonal kernel is normalized against.
enum class KernelMeasure {
    unit_sphere,  ///< plain dΩ₃ (transfer kernels)
    amplitude,    ///< dΩ₃ / ((2π)^{3/2} p_E³), under which the spectral amplitudes compose
};

/// Per-mode eigenvalues k_n (n = 1..n_modes) of a rotation-invariant kernel
/// in the character basis χ_n(ϑ) = sin nϑ / sin ϑ. Stored in log space with
/// an integer slice power, so compositions are exact.
class ModeCoefficients {
public:
    ModeCoefficients(std::vector<double> values);

    int n_modes() const noexcept { return static_cast<int>(log_abs_.size()); }
    std::int64_t power() const noexcept { return power_; }

    /// log|k_n| of the composed kernel (n is 1-based).
    double log_abs(int n) const;
    /// Composed k_n.
    double value(int n) const;
    std::vector<double> values() const;

    /// Same base kernel composed `slices` more times.
    ModeCoefficients composed(std::int64_t slices) const;

private:
    std::vector<double> log_abs_;
    std::vector<bool> negative_;
    std::int64_t power_ = 1;
};

/// Projects kernel samples (on theta_grid(cfg.grid_points)) onto characters:
/// k_n = 4π / (n w) ∫₀^π K(ϑ) χ_n(ϑ) sin²ϑ dϑ, where w is 1 for the unit
/// sphere measure and (2π)^{3/2} p_E³ for the amplitude measure.
///
/// Throws ResolutionError when |k_{n_modes}| > 0.1·|k_1| (the retained modes
/// do not capture the kernel).
ModeCoefficients kernel_to_modes(const std::vector<double>& samples, const SliceConfig& cfg,
                                 KernelMeasure measure = KernelMeasure::unit_sphere,
                                 const EnergyContext* ctx = nullptr);

/// k_n → k_n^num_slices.
ModeCoefficients compose_slices(const ModeCoefficients& modes, std::int64_t num_slices);

/// Reconstructs the zonal kernel Σ_n k_n (n / 2π²) χ_n(ϑ) (unit sphere measure).
double modes_to_kernel(const ModeCoefficients& modes, double theta);

/// max_n |k_n / e^{−p_E² n² ε/2} − 1| from projecting the α = 0 spectral
/// kernel: closes the loop between the projection and the exact amplitude.
double calibration_error(double epsilon, const EnergyContext& ctx, int n_modes, int grid_points);

/// ε-sweep at fixed total pseudotime, in units where p_E = 1.
struct SpectrumSweep {
    std::vector<double> epsilons{0.04, 0.02, 0.01};
    double total_pseudotime = 0.4;
    bool with_measure_factor = true;
    double c = 0.0;
    int n_levels = 4;
    int n_modes = 32;
    int grid_points = 256;
    double alpha = 1.0;
};

struct LevelEstimate {
    int n = 0;
    std::vector<double> decay_rates;  ///< λ_n(ε) per sweep entry
    double extrapolated_rate = 0.0;   ///< λ_n at ε → 0
    double kappa = 0.0;               ///< 2λ_n / p_E², the effective n²
    bool bound = false;               ///< false when κ_n ≤ 0: non-normalizable, no pole
    double energy = 0.0;              ///< −α²/(2κ_n); NaN when not bound
    double analytic_energy = 0.0;     ///< closed-form target; NaN when singular
};

/// Decay rates λ_n(ε) = −ln k_n(composed)/S, extrapolated to ε → 0 by
/// two-level Richardson (polynomial through the three finest points), then
/// the bound-state condition p_E² κ_n = α² solved for E_n.
///
/// Throws NonConvergence when the successive rate differences do not shrink
/// (the step sizes are outside the asymptotic regime).
std::vector<LevelEstimate> extract_spectrum(const SpectrumSweep& sweep);

/// Closed-form κ_n for a configuration: n² + 3c, minus 1 without the measure factor.
double analytic_kappa(int n, bool with_measure_factor, double c);

struct DiscriminationRow {
    double c = 0.0;
    bool with_measure_factor = true;
    int n = 0;
    bool bound = false;
    double extracted_energy = 0.0;
    double analytic_energy = 0.0;
    double physical_energy = 0.0;  ///< −α²/(2n²)
    double deviation_percent = 0.0;  ///< |extracted − physical| / |physical| · 100
};

struct DiscriminationVerdict {
    double c = 0.0;
    bool with_measure_factor = true;
    bool has_ground_state = true;
    double ground_deviation_percent = 0.0;
    bool excluded = false;
};

struct DiscriminationReport {
    std::vector<DiscriminationRow> rows;
    std::vector<DiscriminationVerdict> verdicts;
};

/// Side-by-side extracted spectra for each c with the measure factor on,
/// plus c = 0 with it off, against the analytic targets and the physical
/// levels. A variant is excluded when its extracted levels miss the physical
/// spectrum by more than the extraction tolerance.
DiscriminationReport discrimination_report(const SpectrumSweep& base, const std::vector<double>& c_values,
                                           bool include_measure_off = true, double tolerance = 5e-3);

}  // namespace coulomb
