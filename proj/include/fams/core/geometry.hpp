#pragma once

#include <fams/core/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace fams {

/// A point of R^1 or R^2. In one dimension the second coordinate is zero.
using Point = std::array<double, 2>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double cross(const Point& a, const Point& b) { return a[0] * b[1] - a[1] * b[0]; }
inline double norm(const Point& a) { return std::hypot(a[0], a[1]); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

/// Axis-aligned box [lo, hi] in dimension 1 or 2.
struct Box {
    int dim = 1;
    Point lo{0.0, 0.0};
    Point hi{1.0, 0.0};

    static Box interval(double a, double b) { return Box{1, {a, 0.0}, {b, 0.0}}; }
    static Box rectangle(double a0, double b0, double a1, double b1) { return Box{2, {a0, a1}, {b0, b1}}; }

    void validate() const {
        if (dim != 1 && dim != 2) throw SetupError("box dimension must be 1 or 2");
        for (int k = 0; k < dim; ++k)
            if (!(hi[k] > lo[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k]))
                throw SetupError("box must have positive, finite extent in every direction");
    }

    double extent(int k) const { return hi[k] - lo[k]; }
    double diameter() const { return dim == 1 ? extent(0) : std::hypot(extent(0), extent(1)); }
    double measure() const { return dim == 1 ? extent(0) : extent(0) * extent(1); }
    Point center() const { return dim == 1 ? Point{0.5 * (lo[0] + hi[0]), 0.0} : 0.5 * (lo + hi); }

    bool contains(const Point& x, double eps = 0.0) const {
        for (int k = 0; k < dim; ++k)
            if (x[k] < lo[k] - eps || x[k] > hi[k] + eps) return false;
        return true;
    }

    Point clamp(const Point& x) const {
        Point r{0.0, 0.0};
        for (int k = 0; k < dim; ++k) r[k] = std::clamp(x[k], lo[k], hi[k]);
        return r;
    }

    /// Distance from an interior point to the boundary along a unit direction.
    double exit_distance(const Point& x, const Point& dir) const {
        double t = std::numeric_limits<double>::infinity();
        for (int k = 0; k < dim; ++k) {
            if (dir[k] > 0.0) t = std::min(t, (hi[k] - x[k]) / dir[k]);
            else if (dir[k] < 0.0) t = std::min(t, (lo[k] - x[k]) / dir[k]);
        }
        return std::max(t, 0.0);
    }

    /// Distance from a point to the boundary of the box (zero outside).
    double boundary_distance(const Point& x) const {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < dim; ++k) d = std::min({d, x[k] - lo[k], hi[k] - x[k]});
        return std::max(d, 0.0);
    }
};

/// Surface measure of the unit sphere in R^N.
inline double unit_sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

} // namespace fams
