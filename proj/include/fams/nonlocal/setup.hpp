#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/summation.hpp>
#include <fams/musielak/family.hpp>
#include <fams/nonlocal/kirchhoff.hpp>
#include <fams/spaces/exponent_field.hpp>
#include <fams/spaces/mesh.hpp>

#include <algorithm>
#include <memory>
#include <vector>

namespace fams {

/// One anisotropic direction: a family and its fractional order.
struct Direction {
    MusielakFamily family;
    double order = 0.5;
};

/// Everything that defines the discrete problem.
struct AnisotropicSetup {
    std::shared_ptr<const Mesh> mesh;
    std::vector<Direction> directions;
    ExponentField exponent = ExponentField::constant(2.0);
    Kirchhoff kirchhoff = Kirchhoff::constant(1.0);

    void validate() const {
        if (!mesh) throw SetupError("setup requires a mesh");
        if (directions.empty()) throw SetupError("setup requires at least one direction");
        if (static_cast<int>(directions.size()) != mesh->dim())
            throw ConsistencyError("the number of directions must equal the dimension of the mesh");
        for (const auto& d : directions)
            if (!(d.order > 0.0 && d.order < 1.0)) throw SetupError("fractional orders must lie in (0, 1)");
    }

    double upper_index_max() const {
        double v = 0.0;
        for (const auto& d : directions) v = std::max(v, d.family.declared_indices().upper);
        return v;
    }
    double lower_index_min() const {
        double v = directions.front().family.declared_indices().lower;
        for (const auto& d : directions) v = std::min(v, d.family.declared_indices().lower);
        return v;
    }
};

/// Quadrature settings for the double integral over Q = R^{2N} \ (CΩ × CΩ).
struct QuadratureConfig {
    int gauss_order = 3;               ///< cell rule order for well-separated pairs and source points
    int near_levels = 4;               ///< dyadic radial levels toward the singular point
    double tail_radius_factor = 256.0; ///< exterior integration stops at R = factor · diam(Ω)
    Summation summation = Summation::Compensated;
    double far_ratio = 6.0;            ///< separation / diameter above which pairs use one point per cell
    int polar_order = 3;               ///< Gauss points per angular sector and per radial segment

    void validate() const {
        if (gauss_order < 1 || gauss_order > 8) throw SetupError("gauss_order must lie in [1, 8]");
        if (near_levels < 2) throw SetupError("near_levels must be at least 2");
        if (!(tail_radius_factor >= 2.0)) throw SetupError("tail radius must be at least 2 · diam(Ω)");
        if (!(far_ratio >= 1.0)) throw SetupError("far_ratio must be at least 1");
        if (polar_order < 1 || polar_order > 16) throw SetupError("polar_order must lie in [1, 16]");
    }

    double radius(const Box& box) const { return tail_radius_factor * box.diameter(); }

    /// Lighter defaults suited to two-dimensional meshes.
    static QuadratureConfig planar() {
        QuadratureConfig c;
        c.gauss_order = 2;
        c.near_levels = 3;
        c.far_ratio = 1.5;
        c.polar_order = 2;
        return c;
    }

    static QuadratureConfig defaults_for(int dim) { return dim == 1 ? QuadratureConfig{} : planar(); }
};

} // namespace fams
