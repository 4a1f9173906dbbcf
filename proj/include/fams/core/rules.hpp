#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/geometry.hpp>

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

namespace fams {

/// One-dimensional rule on [0, 1].
struct LineRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// Rule on the reference triangle with barycentric nodes; weights sum to one.
struct TriangleRule {
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline LineRule compute_gauss_legendre(int n) {
    LineRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace detail

inline constexpr int max_rule_order = 32;

/// Gauss-Legendre rule with n points on [0, 1].
inline const LineRule& gauss_legendre(int n) {
    if (n < 1 || n > max_rule_order) throw SetupError("Gauss-Legendre order must lie in [1, 32]");
    static const std::vector<LineRule> table = [] {
        std::vector<LineRule> t(max_rule_order + 1);
        t[1] = LineRule{{0.5}, {1.0}};
        for (int k = 2; k <= max_rule_order; ++k) t[k] = detail::compute_gauss_legendre(k);
        return t;
    }();
    return table[n];
}

/// Triangle rule of the given order: 1 point, 3 points (degree 2), 7 points (degree 5), or an n x n collapsed Gauss product (degree 2n - 2).
inline TriangleRule triangle_rule(int order) {
    TriangleRule r;
    if (order <= 1) {
        r.nodes = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
        r.weights = {1.0};
    } else if (order == 2) {
        r.nodes = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
        r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    } else if (order == 3) {
        const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
        const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
        r.nodes = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                   {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
        r.weights = {0.225, w1, w1, w1, w2, w2, w2};
    } else {
        const LineRule& g = gauss_legendre(order);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double u = g.nodes[i];
                const double v = g.nodes[j] * (1.0 - u);
                r.nodes.push_back({1.0 - u - v, u, v});
                r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
            }
    }
    return r;
}

} // namespace fams
