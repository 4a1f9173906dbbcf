#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/geometry.hpp>
#include <fams/core/rules.hpp>
#include <fams/nonlocal/setup.hpp>
#include <fams/spaces/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace fams {

/// One node of the double-integral rule: ∫∫_Q F(x, y) dμ ≈ Σ weight · F(points[x], points[y]).
/// The weight already contains the measure density |x - y|^{-N}.
struct PairEntry {
    std::int32_t x;
    std::int32_t y;
    double weight;
    double dist;
};

/// Precomputed rule for ∫∫_Q F(x, y) |x - y|^{-N} dx dy over Q = R^{2N} \ (CΩ × CΩ) truncated at |x - y| <= R.
/// Symmetric pairs are folded together: off-diagonal cell pairs and the exterior part carry a factor two.
/// Entries [0, interior_count()) cover Ω × Ω; the rest cover Ω × (B_R(x) \ Ω).
class PairQuadrature {
public:
    PairQuadrature(const Mesh& mesh, const QuadratureConfig& qc) : mesh_(mesh), qc_(qc) {
        qc.validate();
        radius_ = qc.radius(mesh.box());
        build_interior();
        interior_count_ = entries_.size();
        build_exterior();
    }

    const std::vector<QuadPoint>& points() const { return points_; }
    const std::vector<PairEntry>& entries() const { return entries_; }
    std::size_t interior_count() const { return interior_count_; }
    double radius() const { return radius_; }

private:
    using RadialNodes = std::vector<std::pair<double, double>>;

    struct CellRule {
        std::vector<int> points;
        std::vector<double> weights;
    };

    int add_point(const QuadPoint& p) {
        points_.push_back(p);
        return static_cast<int>(points_.size()) - 1;
    }

    /// Points of the order-o rule of cell c, created on first use.
    const CellRule& rule(int c, int order) {
        auto& table = rules_[order];
        if (table.empty()) table.resize(mesh_.cell_count());
        CellRule& r = table[c];
        if (r.points.empty())
            for (const auto& [x, w] : mesh_.cell_rule(c, order)) {
                r.points.push_back(add_point(mesh_.make_point(c, x)));
                r.weights.push_back(w);
            }
        return r;
    }

    /// Gauss nodes on [lo, hi].
    void segment(double lo, double hi, RadialNodes& out) const {
        const LineRule& g = gauss_legendre(qc_.polar_order);
        for (std::size_t i = 0; i < g.size(); ++i) out.push_back({lo + (hi - lo) * g.nodes[i], (hi - lo) * g.weights[i]});
    }

    /// Radial nodes on [a, b]: dyadic refinement toward zero with a graded innermost cell when a = 0,
    /// otherwise segments in log ρ whose end ratio does not exceed max_ratio.
    RadialNodes radial(double a, double b, double max_ratio) const {
        RadialNodes out;
        if (!(b > a)) return out;
        if (a <= 0.0) {
            double top = b;
            for (int k = 0; k < qc_.near_levels; ++k) {
                segment(0.5 * top, top, out);
                top *= 0.5;
            }
            const LineRule& g = gauss_legendre(qc_.polar_order);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double t = g.nodes[i];
                out.push_back({top * t * t, 2.0 * top * t * g.weights[i]});
            }
            return out;
        }
        const double span = std::log(b / a);
        const int m = std::max(1, static_cast<int>(std::ceil(span / std::log(max_ratio) - 1e-12)));
        RadialNodes logs;
        for (int k = 0; k < m; ++k) segment(std::log(a) + span * k / m, std::log(a) + span * (k + 1) / m, logs);
        for (const auto& [tau, w] : logs) {
            const double rho = std::exp(tau);
            out.push_back({rho, rho * w});
        }
        return out;
    }

    /// Sectors [θa, θb] of directions from x that meet the triangle c, split at vertex directions.
    std::vector<std::pair<double, double>> sectors(int c, const Point& x, bool inside) const {
        std::array<double, 3> ang{};
        if (inside) {
            for (int k = 0; k < 3; ++k) {
                const Point d = mesh_.vertex(c, k) - x;
                ang[k] = std::atan2(d[1], d[0]);
            }
            std::sort(ang.begin(), ang.end());
            return {{ang[0], ang[1]}, {ang[1], ang[2]}, {ang[2], ang[0] + 2.0 * std::numbers::pi}};
        }
        Point centroid{0.0, 0.0};
        for (int k = 0; k < 3; ++k) centroid = centroid + (1.0 / 3.0) * mesh_.vertex(c, k);
        const Point dc = centroid - x;
        const double ref = std::atan2(dc[1], dc[0]);
        for (int k = 0; k < 3; ++k) {
            const Point d = mesh_.vertex(c, k) - x;
            ang[k] = std::remainder(std::atan2(d[1], d[0]) - ref, 2.0 * std::numbers::pi);
        }
        std::sort(ang.begin(), ang.end());
        return {{ref + ang[0], ref + ang[1]}, {ref + ang[1], ref + ang[2]}};
    }

    /// Parameter interval of the ray x + ρ d (ρ >= 0) inside triangle c.
    std::pair<double, double> clip(int c, const Point& x, const Point& d) const {
        Point v[3] = {mesh_.vertex(c, 0), mesh_.vertex(c, 1), mesh_.vertex(c, 2)};
        const double orient = cross(v[1] - v[0], v[2] - v[0]) > 0.0 ? 1.0 : -1.0;
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            const Point e = v[(k + 1) % 3] - v[k];
            const Point n{orient * e[1], -orient * e[0]};
            const double num = -dot(n, x - v[k]);
            const double den = dot(n, d);
            if (den > 0.0) hi = std::min(hi, num / den);
            else if (den < 0.0) lo = std::max(lo, num / den);
            else if (num < 0.0) return {0.0, 0.0};
        }
        return {lo, hi};
    }

    /// Polar integration around the source point over cell cy.
    void near_field(int xp, double wx, int cx, int cy, double factor) {
        const Point x = points_[xp].coords;
        const bool self = cx == cy;
        if (mesh_.dim() == 1) {
            const double c = mesh_.vertex(cy, 0)[0], d = mesh_.vertex(cy, 1)[0];
            std::vector<std::tuple<double, double, double>> rays;
            if (self) rays = {{1.0, 0.0, d - x[0]}, {-1.0, 0.0, x[0] - c}};
            else if (x[0] <= c) rays = {{1.0, c - x[0], d - x[0]}};
            else rays = {{-1.0, x[0] - d, x[0] - c}};
            for (const auto& [sign, a, b] : rays)
                for (const auto& [rho, w] : radial(a, b, 2.0)) {
                    const int yp = add_point(mesh_.make_point(cy, {x[0] + sign * rho, 0.0}));
                    entries_.push_back({xp, yp, factor * wx * w / rho, rho});
                }
            return;
        }
        const LineRule& g = gauss_legendre(qc_.polar_order);
        for (const auto& [ta, tb] : sectors(cy, x, self)) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double theta = ta + (tb - ta) * g.nodes[i];
                const double wt = (tb - ta) * g.weights[i];
                const Point dir{std::cos(theta), std::sin(theta)};
                auto [a, b] = clip(cy, x, dir);
                if (self) a = 0.0;
                if (!(b > a)) continue;
                for (const auto& [rho, w] : radial(a, b, 2.0)) {
                    const int yp = add_point(mesh_.make_point(cy, x + rho * dir));
                    entries_.push_back({xp, yp, factor * wx * wt * w / rho, rho});
                }
            }
        }
    }

    void build_interior() {
        const int n = static_cast<int>(mesh_.cell_count());
        const int N = mesh_.dim();
        for (int a = 0; a < n; ++a) {
            const CellRule& xr = rule(a, qc_.gauss_order);
            const auto& touch = mesh_.touching(a);
            for (int b = a; b < n; ++b) {
                const bool near = std::binary_search(touch.begin(), touch.end(), b);
                const double factor = a == b ? 1.0 : 2.0;
                if (near) {
                    const CellRule xr_copy = xr;
                    for (std::size_t i = 0; i < xr_copy.points.size(); ++i)
                        near_field(xr_copy.points[i], xr_copy.weights[i], a, b, factor);
                    continue;
                }
                const double eta = mesh_.cell_distance(a, b) / std::max(mesh_.cell_diameter(a), mesh_.cell_diameter(b));
                const int order = eta < 1.0 ? qc_.gauss_order : (eta < qc_.far_ratio ? std::max(1, qc_.gauss_order - 1) : 1);
                const CellRule ra = rule(a, order);
                const CellRule& rb = rule(b, order);
                for (std::size_t i = 0; i < ra.points.size(); ++i)
                    for (std::size_t j = 0; j < rb.points.size(); ++j) {
                        const double r = distance(points_[ra.points[i]].coords, points_[rb.points[j]].coords);
                        entries_.push_back({ra.points[i], rb.points[j], factor * ra.weights[i] * rb.weights[j] / std::pow(r, N), r});
                    }
            }
        }
    }

    int exterior_point(const Point& y) {
        QuadPoint q;
        q.coords = mesh_.box().clamp(y);
        return add_point(q);
    }

    void build_exterior() {
        const Box& box = mesh_.box();
        const int n = static_cast<int>(mesh_.cell_count());
        const LineRule& g = gauss_legendre(qc_.polar_order);
        for (int c = 0; c < n; ++c) {
            bool touches_boundary = false;
            for (int k = 0; k < mesh_.cells()[c].size; ++k) touches_boundary |= mesh_.is_boundary(mesh_.cells()[c].vertices[k]);
            const int order = touches_boundary ? qc_.gauss_order : std::max(1, qc_.gauss_order - 1);
            const CellRule xr = rule(c, order);
            for (std::size_t i = 0; i < xr.points.size(); ++i) {
                const int xp = xr.points[i];
                const double wx = xr.weights[i];
                const Point x = points_[xp].coords;
                if (mesh_.dim() == 1) {
                    for (double sign : {1.0, -1.0}) {
                        const double a = sign > 0 ? box.hi[0] - x[0] : x[0] - box.lo[0];
                        for (const auto& [rho, w] : radial(a, radius_, 4.0)) {
                            const int yp = exterior_point({x[0] + sign * rho, 0.0});
                            entries_.push_back({xp, yp, 2.0 * wx * w / rho, rho});
                        }
                    }
                    continue;
                }
                std::array<double, 4> ang{};
                const Point corners[4] = {box.lo, {box.hi[0], box.lo[1]}, box.hi, {box.lo[0], box.hi[1]}};
                for (int k = 0; k < 4; ++k) {
                    const Point d = corners[k] - x;
                    ang[k] = std::atan2(d[1], d[0]);
                }
                std::sort(ang.begin(), ang.end());
                for (int k = 0; k < 4; ++k) {
                    const double ta = ang[k];
                    const double tb = k == 3 ? ang[0] + 2.0 * std::numbers::pi : ang[k + 1];
                    for (std::size_t j = 0; j < g.size(); ++j) {
                        const double theta = ta + (tb - ta) * g.nodes[j];
                        const double wt = (tb - ta) * g.weights[j];
                        const Point dir{std::cos(theta), std::sin(theta)};
                        const double a = box.exit_distance(x, dir);
                        for (const auto& [rho, w] : radial(a, radius_, 4.0)) {
                            const int yp = exterior_point(x + rho * dir);
                            entries_.push_back({xp, yp, 2.0 * wx * wt * w / rho, rho});
                        }
                    }
                }
            }
        }
    }

    const Mesh& mesh_;
    QuadratureConfig qc_;
    double radius_ = 0.0;
    std::vector<QuadPoint> points_;
    std::vector<PairEntry> entries_;
    std::size_t interior_count_ = 0;
    std::vector<std::vector<CellRule>> rules_ = std::vector<std::vector<CellRule>>(max_rule_order + 1);
};

} // namespace fams
