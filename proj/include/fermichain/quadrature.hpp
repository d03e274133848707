// quadrature.hpp — Gauss-Legendre rules and composite-panel integration
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fermichain {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
inline QuadratureRule gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // evaluate P_n and P_{n-1} by upward recurrence
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Composite rule: `panels` equal subintervals of [a, b], `points_per_panel`
// Gauss-Legendre nodes each.
inline QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                               std::size_t points_per_panel) {
    if (!(a < b)) throw std::invalid_argument("composite_gauss_legendre: empty interval");
    const QuadratureRule base = gauss_legendre(points_per_panel);
    QuadratureRule rule;
    rule.nodes.reserve(panels * points_per_panel);
    rule.weights.reserve(panels * points_per_panel);
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        for (std::size_t j = 0; j < points_per_panel; ++j) {
            rule.nodes.push_back(lo + 0.5 * h * (base.nodes[j] + 1.0));
            rule.weights.push_back(0.5 * h * base.weights[j]);
        }
    }
    return rule;
}

template <typename F>
auto integrate(const QuadratureRule& rule, F&& f) -> decltype(f(0.0)) {
    decltype(f(0.0)) acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
    return acc;
}

template <typename F>
auto integrate_panels(double a, double b, std::size_t panels, std::size_t points, F&& f)
    -> decltype(f(0.0)) {
    return integrate(composite_gauss_legendre(a, b, panels, points), f);
}

} // namespace fermichain
