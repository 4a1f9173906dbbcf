#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/geometry.hpp>
#include <fams/core/rules.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace fams {

/// Interval (two vertices) or triangle (three vertices). Unused slots hold -1.
struct Cell {
    std::array<int, 3> vertices{-1, -1, -1};
    int size = 2;
};

/// Point carrying the P1 interpolation data needed to evaluate a function there.
struct QuadPoint {
    Point coords{0.0, 0.0};
    std::array<int, 3> dofs{-1, -1, -1};
    std::array<double, 3> shape{0.0, 0.0, 0.0};

    template <class Coeffs>
    double interpolate(const Coeffs& c) const {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
            if (dofs[k] >= 0) v += shape[k] * c[dofs[k]];
        return v;
    }
};

/// Weighted points covering Ω.
struct VolumeRule {
    std::vector<QuadPoint> points;
    std::vector<double> weights;
};

/// Uniform P1 mesh of a box: intervals in 1D, squares split into two triangles in 2D.
class Mesh {
public:
    static Mesh uniform(const Box& box, std::array<int, 2> cells, int volume_order = 3) {
        box.validate();
        Mesh m;
        m.box_ = box;
        m.n_ = cells;
        if (box.dim == 1) m.n_[1] = 1;
        if (m.n_[0] < 1 || m.n_[1] < 1) throw SetupError("mesh needs at least one cell in every direction");
        if (box.dim == 2 && (cells[0] < 2 || cells[1] < 2))
            throw SetupError("a 2D mesh needs at least two cells per direction to have interior vertices");
        if (box.dim == 1 && cells[0] < 2) throw SetupError("a 1D mesh needs at least two cells");
        if (volume_order < 1 || volume_order > max_rule_order) throw SetupError("volume quadrature order must lie in [1, 32]");
        m.build(volume_order);
        return m;
    }

    int dim() const { return box_.dim; }
    const Box& box() const { return box_; }
    std::array<int, 2> cells_per_direction() const { return n_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t cell_count() const { return cells_.size(); }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    bool is_boundary(int v) const { return boundary_[v]; }
    const std::vector<int>& free_vertices() const { return free_; }
    double cell_measure(int c) const { return measure_[c]; }
    double cell_diameter(int c) const { return diameter_[c]; }
    double max_cell_diameter() const { return max_diameter_; }
    const VolumeRule& volume_rule() const { return volume_; }
    int volume_order() const { return volume_order_; }

    Point vertex(int c, int k) const { return vertices_[cells_[c].vertices[k]]; }

    /// Barycentric coordinates of x relative to cell c.
    std::array<double, 3> barycentric(int c, const Point& x) const {
        if (dim() == 1) {
            const double a = vertex(c, 0)[0], b = vertex(c, 1)[0];
            const double l = (x[0] - a) / (b - a);
            return {1.0 - l, l, 0.0};
        }
        const Point a = vertex(c, 0), b = vertex(c, 1), d = vertex(c, 2);
        const double det = cross(b - a, d - a);
        const double l1 = cross(x - a, d - a) / det;
        const double l2 = cross(b - a, x - a) / det;
        return {1.0 - l1 - l2, l1, l2};
    }

    /// Point of cell c with the given barycentric coordinates.
    Point from_barycentric(int c, const std::array<double, 3>& l) const {
        Point p{0.0, 0.0};
        for (int k = 0; k < cells_[c].size; ++k) p = p + l[k] * vertex(c, k);
        return p;
    }

    /// Interpolation record for a point known to lie in cell c.
    QuadPoint make_point(int c, const Point& x) const {
        QuadPoint q;
        q.coords = x;
        const auto l = barycentric(c, x);
        for (int k = 0; k < cells_[c].size; ++k) {
            q.dofs[k] = cells_[c].vertices[k];
            q.shape[k] = l[k];
        }
        return q;
    }

    /// Cell containing x, or nothing when x lies outside the closed box.
    std::optional<int> locate(const Point& x) const {
        if (!box_.contains(x, 1e-14 * box_.diameter())) return std::nullopt;
        auto index = [&](int k) {
            const double h = box_.extent(k) / n_[k];
            int i = static_cast<int>(std::floor((x[k] - box_.lo[k]) / h));
            return std::clamp(i, 0, n_[k] - 1);
        };
        const int i = index(0);
        if (dim() == 1) return i;
        const int j = index(1);
        const int base = 2 * (j * n_[0] + i);
        const auto l = barycentric(base, x);
        return (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) ? base : base + 1;
    }

    /// Cells that share at least one vertex with cell c (including c).
    const std::vector<int>& touching(int c) const { return touching_[c]; }

    /// Euclidean distance between two cells (zero when they touch).
    double cell_distance(int a, int b) const {
        if (dim() == 1) {
            const double a0 = vertex(a, 0)[0], a1 = vertex(a, 1)[0];
            const double b0 = vertex(b, 0)[0], b1 = vertex(b, 1)[0];
            return std::max({0.0, b0 - a1, a0 - b1});
        }
        double d = std::numeric_limits<double>::infinity();
        for (int pass = 0; pass < 2; ++pass) {
            const int s = pass == 0 ? a : b, t = pass == 0 ? b : a;
            for (int k = 0; k < 3; ++k)
                for (int e = 0; e < 3; ++e)
                    d = std::min(d, point_segment_distance(vertex(s, k), vertex(t, e), vertex(t, (e + 1) % 3)));
        }
        return d;
    }

    static double point_segment_distance(const Point& p, const Point& a, const Point& b) {
        const Point ab = b - a;
        const double l2 = dot(ab, ab);
        const double t = l2 > 0.0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
        return distance(p, a + t * ab);
    }

    /// Nodes and weights of the cell rule of the given order, mapped to cell c.
    std::vector<std::pair<Point, double>> cell_rule(int c, int order) const {
        std::vector<std::pair<Point, double>> out;
        if (dim() == 1) {
            const LineRule& g = gauss_legendre(order);
            const double a = vertex(c, 0)[0], b = vertex(c, 1)[0];
            for (std::size_t i = 0; i < g.size(); ++i) out.push_back({{a + (b - a) * g.nodes[i], 0.0}, (b - a) * g.weights[i]});
        } else {
            const TriangleRule r = triangle_rule(order);
            for (std::size_t i = 0; i < r.size(); ++i) out.push_back({from_barycentric(c, r.nodes[i]), measure_[c] * r.weights[i]});
        }
        return out;
    }

private:
    void build(int volume_order) {
        volume_order_ = volume_order;
        const int nx = n_[0], ny = n_[1];
        if (dim() == 1) {
            const double h = box_.extent(0) / nx;
            for (int i = 0; i <= nx; ++i) vertices_.push_back({box_.lo[0] + i * h, 0.0});
            for (int i = 0; i < nx; ++i) cells_.push_back(Cell{{i, i + 1, -1}, 2});
            boundary_.assign(vertices_.size(), false);
            boundary_.front() = boundary_.back() = true;
        } else {
            const double hx = box_.extent(0) / nx, hy = box_.extent(1) / ny;
            for (int j = 0; j <= ny; ++j)
                for (int i = 0; i <= nx; ++i) vertices_.push_back({box_.lo[0] + i * hx, box_.lo[1] + j * hy});
            auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    cells_.push_back(Cell{{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, 3});
                    cells_.push_back(Cell{{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, 3});
                }
            boundary_.assign(vertices_.size(), false);
            for (int j = 0; j <= ny; ++j)
                for (int i = 0; i <= nx; ++i)
                    if (i == 0 || j == 0 || i == nx || j == ny) boundary_[id(i, j)] = true;
        }
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            if (!boundary_[v]) free_.push_back(static_cast<int>(v));

        for (std::size_t c = 0; c < cells_.size(); ++c) {
            const int ci = static_cast<int>(c);
            double diam = 0.0;
            for (int a = 0; a < cells_[c].size; ++a)
                for (int b = a + 1; b < cells_[c].size; ++b) diam = std::max(diam, distance(vertex(ci, a), vertex(ci, b)));
            diameter_.push_back(diam);
            max_diameter_ = std::max(max_diameter_, diam);
            if (dim() == 1) measure_.push_back(diam);
            else measure_.push_back(0.5 * std::abs(cross(vertex(ci, 1) - vertex(ci, 0), vertex(ci, 2) - vertex(ci, 0))));
        }

        std::vector<std::vector<int>> vertex_cells(vertices_.size());
        for (std::size_t c = 0; c < cells_.size(); ++c)
            for (int k = 0; k < cells_[c].size; ++k) vertex_cells[cells_[c].vertices[k]].push_back(static_cast<int>(c));
        touching_.resize(cells_.size());
        for (std::size_t c = 0; c < cells_.size(); ++c) {
            auto& t = touching_[c];
            for (int k = 0; k < cells_[c].size; ++k)
                for (int o : vertex_cells[cells_[c].vertices[k]]) t.push_back(o);
            std::sort(t.begin(), t.end());
            t.erase(std::unique(t.begin(), t.end()), t.end());
        }

        for (std::size_t c = 0; c < cells_.size(); ++c)
            for (const auto& [x, w] : cell_rule(static_cast<int>(c), volume_order)) {
                volume_.points.push_back(make_point(static_cast<int>(c), x));
                volume_.weights.push_back(w);
            }
    }

    Box box_;
    std::array<int, 2> n_{1, 1};
    int volume_order_ = 3;
    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<bool> boundary_;
    std::vector<int> free_;
    std::vector<double> measure_;
    std::vector<double> diameter_;
    double max_diameter_ = 0.0;
    std::vector<std::vector<int>> touching_;
    VolumeRule volume_;
};

} // namespace fams
