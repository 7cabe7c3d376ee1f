#include "coulomb/errors.hpp"

namespace coulomb {

PoleProximity::PoleProximity(int nearest_n, double pole_energy, const std::string& what)
    : Error(what), nearest_n_(nearest_n), pole_energy_(pole_energy) {}

NonConvergence::NonConvergence(double residual, const std::string& what)
    : Error(what), residual_(residual) {}

}  // namespace coulomb
