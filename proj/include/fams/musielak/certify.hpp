#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/geometry.hpp>
#include <fams/musielak/family.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace fams {

/// Radical inverse in the given prime base (Halton sequence component).
inline double radical_inverse(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// Deterministic sample set: spatial points of the closed box and log-spaced magnitudes.
struct SampleGrid {
    std::vector<Point> points;
    std::vector<double> magnitudes;

    /// n_points low-discrepancy points of the box (corners and center first) and n_t magnitudes in [t_min, t_max].
    static SampleGrid make(const Box& box, int n_points = 64, int n_t = 64, double t_min = 1e-6, double t_max = 1e6) {
        SampleGrid g;
        std::vector<Point> fixed;
        if (box.dim == 1) fixed = {box.lo, box.hi, box.center()};
        else fixed = {box.lo, box.hi, {box.lo[0], box.hi[1]}, {box.hi[0], box.lo[1]}, box.center()};
        for (const auto& p : fixed)
            if (static_cast<int>(g.points.size()) < n_points) g.points.push_back(p);
        for (std::size_t i = 1; static_cast<int>(g.points.size()) < n_points; ++i) {
            Point p{0.0, 0.0};
            p[0] = box.lo[0] + box.extent(0) * radical_inverse(i, 2);
            if (box.dim == 2) p[1] = box.lo[1] + box.extent(1) * radical_inverse(i, 3);
            g.points.push_back(p);
        }
        for (int k = 0; k < n_t; ++k) {
            const double s = n_t == 1 ? 0.5 : static_cast<double>(k) / (n_t - 1);
            g.magnitudes.push_back(t_min * std::pow(t_max / t_min, s));
        }
        return g;
    }

    /// Visits (x, y, t) over the full product.
    template <class F>
    void for_each(F&& f) const {
        for (const auto& x : points)
            for (const auto& y : points)
                for (double t : magnitudes) f(x, y, t);
    }
};

/// Growth indices observed on a grid together with the points attaining them.
struct IndexEstimate {
    double lower = std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    Point lower_x{}, lower_y{}, upper_x{}, upper_y{};
    double lower_t = 0.0, upper_t = 0.0;
};

/// Infimum and supremum of t φ(x,y,t) / Φ(x,y,t) over the grid.
/// Throws CertificationError naming a witness when they leave the declared indices by more than slack.
inline IndexEstimate estimate_indices(const MusielakFamily& family, const SampleGrid& grid, double slack = 1e-9) {
    IndexEstimate est;
    grid.for_each([&](const Point& x, const Point& y, double t) {
        const double p = family.local_exponent(x, y);
        const double Phi = family.Phi_local(p, x, y, t);
        const double ratio = t * family.phi_local(p, x, y, t) / Phi;
        if (!std::isfinite(ratio)) return;
        if (ratio < est.lower) {
            est.lower = ratio;
            est.lower_x = x;
            est.lower_y = y;
            est.lower_t = t;
        }
        if (ratio > est.upper) {
            est.upper = ratio;
            est.upper_x = x;
            est.upper_y = y;
            est.upper_t = t;
        }
    });
    const auto& d = family.declared_indices();
    auto witness = [](const char* which, double value, const Point& x, const Point& y, double t) {
        std::ostringstream os;
        os << "observed " << which << " index " << value << " at x = (" << x[0] << ", " << x[1] << "), y = (" << y[0]
           << ", " << y[1] << "), t = " << t;
        return os.str();
    };
    if (est.lower < d.lower - slack * std::max(1.0, d.lower))
        throw CertificationError(witness("lower", est.lower, est.lower_x, est.lower_y, est.lower_t) +
                                 " is below the declared lower index");
    if (est.upper > d.upper + slack * std::max(1.0, d.upper))
        throw CertificationError(witness("upper", est.upper, est.upper_x, est.upper_y, est.upper_t) +
                                 " is above the declared upper index");
    return est;
}

struct HypothesisReport {
    bool convex_sqrt = true;     ///< t ↦ Φ(x, y, √t) convex on the grid
    double worst_convexity = 0.0; ///< most negative relative slope decrease
    bool bounded_at_one = true;  ///< sup Φ(x, y, 1) finite
    double sup_at_one = 0.0;
    bool doubling = true;        ///< Φ(2t) <= 2^{φ⁺} Φ(t)
    double max_doubling_ratio = 0.0;
    bool all() const { return convex_sqrt && bounded_at_one && doubling; }
};

/// Checks convexity of Φ(√t), boundedness of Φ(·, ·, 1) and the doubling condition on the grid.
inline HypothesisReport certify_hypotheses(const MusielakFamily& family, const SampleGrid& grid, double tol = 1e-9) {
    HypothesisReport r;
    const double doubling_bound = std::pow(2.0, family.declared_indices().upper);
    std::vector<double> ts;
    for (double t : grid.magnitudes) ts.push_back(t * t);
    std::sort(ts.begin(), ts.end());
    for (const auto& x : grid.points)
        for (const auto& y : grid.points) {
            const double p = family.local_exponent(x, y);
            const double at_one = family.Phi_local(p, x, y, 1.0);
            if (!std::isfinite(at_one)) r.bounded_at_one = false;
            else r.sup_at_one = std::max(r.sup_at_one, at_one);

            double prev_slope = std::numeric_limits<double>::quiet_NaN();
            double prev_s = 0.0, prev_g = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const double s = ts[k];
                const double g = family.Phi_local(p, x, y, std::sqrt(s));
                if (k > 0) {
                    const double slope = (g - prev_g) / (s - prev_s);
                    if (!std::isnan(prev_slope)) {
                        const double scale = std::max(std::abs(slope), std::abs(prev_slope));
                        const double defect = scale > 0.0 ? (slope - prev_slope) / scale : 0.0;
                        r.worst_convexity = std::min(r.worst_convexity, defect);
                        if (defect < -tol) r.convex_sqrt = false;
                    }
                    prev_slope = slope;
                }
                prev_s = s;
                prev_g = g;
            }
            for (double t : grid.magnitudes) {
                const double base = family.Phi_local(p, x, y, t);
                if (base <= 0.0) continue;
                const double ratio = family.Phi_local(p, x, y, 2.0 * t) / base;
                r.max_doubling_ratio = std::max(r.max_doubling_ratio, ratio);
                if (ratio > doubling_bound * (1.0 + tol)) r.doubling = false;
            }
        }
    return r;
}

/// Scaling bounds for Φ(σ t): value lies in [lower, upper].
struct ScalingBounds {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;
};

/// For σ > 1: σ^{φ⁻} Φ(t) <= Φ(σt) <= σ^{φ⁺} Φ(t). For σ < 1 the exponents swap.
inline ScalingBounds lemma22_bounds(const MusielakFamily& family, const Point& x, const Point& y, double t, double sigma) {
    detail::require_finite_nonnegative(t, "lemma22_bounds");
    if (!std::isfinite(sigma) || !(sigma > 0.0)) throw DomainError("lemma22_bounds: σ must be positive and finite");
    if (sigma == 1.0) throw DomainError("lemma22_bounds: σ = 1 is excluded");
    const auto& d = family.declared_indices();
    const double base = family.Phi(x, y, t);
    const double a = std::pow(sigma, d.lower) * base;
    const double b = std::pow(sigma, d.upper) * base;
    return ScalingBounds{std::min(a, b), std::max(a, b), family.Phi(x, y, sigma * t)};
}

} // namespace fams
