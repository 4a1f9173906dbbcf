#pragma once

#include <fams/core/errors.hpp>
#include <fams/spaces/mesh.hpp>

#include <algorithm>
#include <array>
#include <memory>
#include <vector>

namespace fams {

/// Continuous exponent q(x) on the closed box with 1 < q⁻ <= q⁺ < ∞.
class ExponentField {
public:
    enum class Kind { Constant, Affine, Nodal };

    static ExponentField constant(double q) {
        ExponentField f;
        f.kind_ = Kind::Constant;
        f.base_ = q;
        f.finish(q, q);
        return f;
    }

    /// q(x) = base + slope · (x - center of the box).
    static ExponentField affine(const Box& box, double base, std::array<double, 2> slope) {
        ExponentField f;
        f.kind_ = Kind::Affine;
        f.base_ = base;
        f.slope_ = slope;
        f.center_ = box.center();
        double lo = base, hi = base;
        for (int k = 0; k < box.dim; ++k) {
            const double half = 0.5 * std::abs(slope[k]) * box.extent(k);
            lo -= half;
            hi += half;
        }
        f.finish(lo, hi);
        return f;
    }

    /// Nodal values at the mesh vertices, interpolated linearly.
    static ExponentField nodal(std::shared_ptr<const Mesh> mesh, std::vector<double> values) {
        if (values.size() != mesh->vertex_count()) throw SetupError("exponent table size does not match the mesh vertices");
        ExponentField f;
        f.kind_ = Kind::Nodal;
        f.mesh_ = std::move(mesh);
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double qlo = *lo, qhi = *hi;
        f.values_ = std::move(values);
        f.finish(qlo, qhi);
        return f;
    }

    Kind kind() const { return kind_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool is_constant() const { return lower_ == upper_; }

    double operator()(const Point& x) const {
        switch (kind_) {
        case Kind::Constant: return base_;
        case Kind::Affine: return base_ + slope_[0] * (x[0] - center_[0]) + slope_[1] * (x[1] - center_[1]);
        case Kind::Nodal: {
            const auto cell = mesh_->locate(x);
            if (!cell) throw DomainError("exponent queried outside the mesh");
            return mesh_->make_point(*cell, x).interpolate(values_);
        }
        }
        return base_;
    }

private:
    void finish(double lo, double hi) {
        lower_ = lo;
        upper_ = hi;
        if (!(lower_ > 1.0)) throw SetupError("exponent field must satisfy 1 < q⁻");
        if (!std::isfinite(upper_)) throw SetupError("exponent field must be bounded");
    }

    Kind kind_ = Kind::Constant;
    double base_ = 2.0;
    std::array<double, 2> slope_{0.0, 0.0};
    Point center_{0.0, 0.0};
    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> values_;
    double lower_ = 2.0;
    double upper_ = 2.0;
};

} // namespace fams
