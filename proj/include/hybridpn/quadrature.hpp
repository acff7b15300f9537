#pragma once

#include <functional>
#include <vector>

namespace hybridpn {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;  // sum to 2
};

GaussRule gauss_legendre(int n);

// Nodes and weights mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Chebyshev-Lobatto points on [a, b], ascending, n >= 2.
std::vector<double> chebyshev_lobatto(int n, double a, double b);

// Composite Gauss-Legendre on panels that shrink geometrically toward b.
// `width` is the scale of a boundary layer at b; with width >= b - a a
// single panel is used.
double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        double width, int order = 16);

}  // namespace hybridpn
