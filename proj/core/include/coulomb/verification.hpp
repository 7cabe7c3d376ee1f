#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coulomb {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   ///< worst observed error (or the quantity under test)
    double threshold = 0.0;  ///< pass limit for `measured`
    std::string detail;
    double seconds = 0.0;
};

struct VerificationOptions {
    std::uint64_t seed = 20240601;
    int harmonics_resolution = 32;
    int random_pairs = 100;
};

/// Runs the invariant suite behind `coulomb verify-all`: spectrum poles,
/// measure-factor discrimination, R-term distortion, harmonic orthonormality
/// and addition theorem, measure integral, semigroup, eikonal geodesics,
/// Kepler correspondence and series acceleration.
std::vector<CheckResult> run_verification_suite(const VerificationOptions& options = {});

}  // namespace coulomb
