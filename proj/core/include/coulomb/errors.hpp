#pragma once

#include <stdexcept>
#include <string>

namespace coulomb {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates an operation's precondition (bad label, non-finite value,
/// non-negative energy, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The north pole of S³ corresponds to infinite momentum.
class PointAtInfinity : public Error {
public:
    using Error::Error;
};

/// Fixed-energy amplitude requested at coincident sphere points (ϑ = 0).
class CoincidentPoints : public Error {
public:
    using Error::Error;
};

/// Energy sits on (or within tolerance of) a pole of the fixed-energy amplitude.
class PoleProximity : public Error {
public:
    PoleProximity(int nearest_n, double pole_energy, const std::string& what);

    int nearest_n() const noexcept { return nearest_n_; }
    double pole_energy() const noexcept { return pole_energy_; }

private:
    int nearest_n_;
    double pole_energy_;
};

/// A grid or scan is too coarse for the requested computation.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure stopped before reaching its tolerance.
class NonConvergence : public Error {
public:
    NonConvergence(double residual, const std::string& what);

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace coulomb
