#pragma once

#include <vector>

namespace coulomb {

/// Nodes and weights of an n-point Gauss–Legendre rule.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point rule on [-1, 1]; Newton iteration on P_n from Chebyshev guesses.
GaussLegendreRule gauss_legendre(int n);

/// n-point rule mapped affinely onto [a, b].
GaussLegendreRule gauss_legendre(int n, double a, double b);

}  // namespace coulomb
