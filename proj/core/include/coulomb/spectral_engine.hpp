#pragma once

#include <numbers>
#include <vector>

#include "coulomb/sphere_geometry.hpp"

namespace coulomb {

/// Truncated series value together with a rigorous bound on what was dropped.
struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms = 0;
};

/// Hypothetical extra curvature term c·R̄/2 in the sphere Hamiltonian; on the
/// unit S³ (R̄ = 6) it adds the constant 3c to n² in every level.
class RTermVariant {
public:
    RTermVariant() = default;
    /// Rejects non-finite c and c ≤ −1/3 (which would make the ground level
    /// non-normalizable).
    explicit RTermVariant(double c);

    double c() const noexcept { return c_; }
    double shift() const noexcept { return 3.0 * c_; }

private:
    double c_ = 0.0;
};

/// Spectrum entry in natural units, with the eV value alongside.
struct SpectrumEntry {
    int n = 0;
    double energy = 0.0;
    double energy_ev = 0.0;
};

/// Pseudotime kernel on S³ as a function of the separation angle:
/// (2π)^{3/2} p_E³ Σ_n (n²/2π²) P_n(cos ϑ) exp{(−p_E² n² + α²) S/2}.
/// Terms are added until the analytic Gaussian tail bound drops below `tol`.
/// Throws InvalidArgument for S ≤ 0.
SeriesResult pseudotime_kernel(double theta, double pseudotime, const EnergyContext& ctx, double tol = 1e-14);

SeriesResult pseudotime_amplitude(const SpherePoint4& pi_b, const SpherePoint4& pi_a, double pseudotime,
                                  const EnergyContext& ctx, double tol = 1e-14);

/// Closed form of the (Abel/Cesàro-summed) series Σ_{n≥1} P_n(cos ϑ) =
/// (π − ϑ) / (2 sin ϑ), valid for ϑ ∈ (0, π].
double legendre4_series_sum(double theta);

/// Cesàro mean Σ_{n≤N} (1 − n/(N+1)) P_n(cos ϑ) of the same series.
double legendre4_cesaro_sum(double theta, int n_terms);

/// Fixed-energy amplitude at zero pseudoenergy as a function of the
/// separation angle:
///   −(2π)^{3/2} p_E³ Σ_n (n²/2π²) P_n(cos ϑ) · 2 / (2E(n² + 3c) + α²),
/// with p_E = √(−2E). The conditionally convergent sum is split so that its
/// slowly decaying pieces are summed in closed form; the remainder decays
/// like n⁻⁵ and is truncated once its bound is below `tol`.
///
/// Throws InvalidArgument for E ≥ 0, CoincidentPoints for ϑ = 0, and
/// PoleProximity when E is within 1e-12 of a level of the variant.
SeriesResult fixed_energy_amplitude(double theta, double energy, double alpha = 1.0,
                                    const RTermVariant& variant = RTermVariant{}, double tol = 1e-10);

SeriesResult fixed_energy_amplitude(const SpherePoint4& pi_b, const SpherePoint4& pi_a, double energy,
                                    double alpha = 1.0, const RTermVariant& variant = RTermVariant{},
                                    double tol = 1e-10);

/// Direct Cesàro-averaged summation of the same series over N terms, kept
/// as an independent cross-check. `tail_bound` bounds |Cesàro mean − sum|.
SeriesResult fixed_energy_amplitude_cesaro(double theta, double energy, double alpha = 1.0,
                                           const RTermVariant& variant = RTermVariant{}, int n_terms = 100000);

/// E_n = −α² / (2(n² + 3c)), n = 1..n_max.
std::vector<SpectrumEntry> spectrum(int n_max, const RTermVariant& variant = RTermVariant{}, double alpha = 1.0,
                                    double energy_unit_ev = kHartreeEv);

/// Pole-scan configuration for find_poles.
struct PoleScanConfig {
    double energy_min = -0.6;
    double energy_max = -0.012;
    int n_expect = 6;
    RTermVariant variant{};
    double alpha = 1.0;
    /// Residues vanish where P_n(cos ϑ) = 0, so every probe angle is scanned
    /// and the results merged.
    std::vector<double> probe_angles{std::numbers::pi / 2.0, 2.0};
    int scan_points = 2000;
    double energy_tol = 1e-10;
    double series_tol = 1e-9;
};

struct LocatedPole {
    int n = 0;
    double energy = 0.0;
    double probe_angle = 0.0;  ///< angle at which the pole was bracketed first
};

/// Locates poles of the fixed-energy amplitude by sign changes of its
/// reciprocal on a scan uniform in 1/√(−E), refined by bisection. Brackets
/// where the reciprocal blows up (zeros of the amplitude) are discarded.
/// Poles are returned most-bound first and labelled n = 1, 2, …; the scan
/// must therefore start below the ground level.
///
/// Throws ResolutionError if two levels of the variant fall into one scan
/// cell (naming the pair) or fewer than n_expect poles are found.
std::vector<LocatedPole> find_poles(const PoleScanConfig& config);

/// Result of fitting amp(E) ≈ residue/(E − E_pole) + constant.
struct LaurentFit {
    double residue = 0.0;
    double constant = 0.0;
    double max_relative_residual = 0.0;
};

/// Least-squares Laurent fit around a known pole position.
LaurentFit laurent_fit(const std::vector<double>& energies, const std::vector<double>& amplitudes, double pole_energy);

struct LevelRow {
    double c = 0.0;
    int n = 0;
    double energy = 0.0;
    double energy_ev = 0.0;
    double spacing = 0.0;  ///< E_{n+1} − E_n
    double spacing_ev = 0.0;
    double deviation = 0.0;          ///< (E_n(c) − E_n(0)) / |E_n(0)|
    double spacing_deviation = 0.0;  ///< relative change of the spacing
};

struct VariantVerdict {
    double c = 0.0;
    double max_abs_deviation = 0.0;
    bool excluded = false;  ///< distortion exceeds the spectroscopic threshold
};

struct LevelSpacingReport {
    std::vector<LevelRow> rows;
    std::vector<VariantVerdict> verdicts;
    double exclusion_threshold = 0.0;
};

/// Hydrogen spectroscopy resolves level energies far below this relative
/// distortion, so anything larger is flagged as experimentally excluded.
inline constexpr double kSpectroscopicThreshold = 1e-6;

/// Levels, spacings and deviations from the c = 0 spectrum for each variant.
/// Throws InvalidArgument for an empty variant list or n_max < 1.
LevelSpacingReport level_spacing_report(const std::vector<RTermVariant>& variants, int n_max, double alpha = 1.0,
                                        double energy_unit_ev = kHartreeEv,
                                        double exclusion_threshold = kSpectroscopicThreshold);

struct NoMeasureEntry {
    int n = 0;
    bool singular = false;
    double energy = 0.0;  ///< NaN when singular
    double energy_ev = 0.0;
};

/// Levels obtained without the curvature measure factor,
/// E_n = −α² / (2(n² − 1)); the n = 1 entry is flagged singular.
/// Throws InvalidArgument for n_max < 2.
std::vector<NoMeasureEntry> no_measure_factor_spectrum(int n_max, double alpha = 1.0,
                                                       double energy_unit_ev = kHartreeEv);

}  // namespace coulomb
