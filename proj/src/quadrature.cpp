#include "hybridpn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hybridpn {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
    GaussRule rule = gauss_legendre(n);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

std::vector<double> chebyshev_lobatto(int n, double a, double b) {
    if (n < 2) throw std::invalid_argument("chebyshev_lobatto: n must be >= 2");
    std::vector<double> pts(n);
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(std::numbers::pi * i / (n - 1));
        pts[i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    }
    pts.front() = a;
    pts.back() = b;
    return pts;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        double width, int order) {
    if (!(b > a)) return 0.0;
    const GaussRule ref = gauss_legendre(order);
    auto panel = [&](double lo, double hi) {
        double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo), sum = 0.0;
        for (int i = 0; i < order; ++i) sum += ref.weights[i] * f(mid + half * ref.nodes[i]);
        return half * sum;
    };
    if (!(width > 0.0) || width >= b - a) return panel(a, b);
    double total = 0.0;
    double hi = b, span = width;
    while (hi - span > a) {
        total += panel(hi - span, hi);
        hi -= span;
        span *= 2.0;
    }
    total += panel(a, hi);
    return total;
}

}  // namespace hybridpn
