#pragma once

#include <fams/core/errors.hpp>
#include <fams/spaces/mesh.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

namespace fams {

/// Continuous piecewise-linear function on a mesh, zero on the boundary and extended by zero outside Ω.
class DiscreteFunction {
public:
    DiscreteFunction() = default;

    explicit DiscreteFunction(std::shared_ptr<const Mesh> mesh)
        : mesh_(std::move(mesh)), coeffs_(mesh_ ? mesh_->vertex_count() : 0, 0.0) {
        if (!mesh_) throw SetupError("discrete function requires a mesh");
    }

    DiscreteFunction(std::shared_ptr<const Mesh> mesh, std::vector<double> coeffs)
        : mesh_(std::move(mesh)), coeffs_(std::move(coeffs)) {
        if (!mesh_) throw SetupError("discrete function requires a mesh");
        if (coeffs_.size() != mesh_->vertex_count()) throw SetupError("coefficient vector does not match the mesh");
        pin_boundary();
    }

    static DiscreteFunction zero(std::shared_ptr<const Mesh> mesh) { return DiscreteFunction(std::move(mesh)); }

    /// Nodal interpolant of f with boundary values set to zero.
    static DiscreteFunction interpolate(std::shared_ptr<const Mesh> mesh, const std::function<double(const Point&)>& f) {
        DiscreteFunction u(mesh);
        for (int v : mesh->free_vertices()) u.coeffs_[v] = f(mesh->vertices()[v]);
        return u;
    }

    /// Product of sines sin(π ξ_k) over the axes; positive inside Ω with peak value one at the center.
    static DiscreteFunction bump(std::shared_ptr<const Mesh> mesh) { return sine_mode(std::move(mesh), {1, 1}); }

    /// Product of sin(k π ξ) over the axes with the given mode numbers.
    static DiscreteFunction sine_mode(std::shared_ptr<const Mesh> mesh, std::array<int, 2> modes) {
        const Box box = mesh->box();
        return interpolate(mesh, [box, modes](const Point& x) {
            double v = 1.0;
            for (int k = 0; k < box.dim; ++k) v *= std::sin(modes[k] * std::numbers::pi * (x[k] - box.lo[k]) / box.extent(k));
            return v;
        });
    }

    /// Pyramid with peak one at the center of Ω, vanishing on the boundary.
    static DiscreteFunction hat(std::shared_ptr<const Mesh> mesh) {
        const Box box = mesh->box();
        return interpolate(mesh, [box](const Point& x) {
            double v = 1.0;
            for (int k = 0; k < box.dim; ++k) v = std::min(v, 1.0 - std::abs(2.0 * (x[k] - box.lo[k]) / box.extent(k) - 1.0));
            return v;
        });
    }

    /// Nodal basis function of vertex v.
    static DiscreteFunction basis(std::shared_ptr<const Mesh> mesh, int v) {
        DiscreteFunction u(mesh);
        if (v < 0 || v >= static_cast<int>(mesh->vertex_count()) || mesh->is_boundary(v))
            throw PreconditionError("basis function index must name an interior vertex");
        u.coeffs_[v] = 1.0;
        return u;
    }

    /// Interior coefficients drawn uniformly from [-1, 1].
    static DiscreteFunction random(std::shared_ptr<const Mesh> mesh, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        DiscreteFunction u(mesh);
        for (int v : mesh->free_vertices()) u.coeffs_[v] = dist(rng);
        return u;
    }

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double coefficient(int v) const { return coeffs_[v]; }

    /// Replaces the coefficients; boundary entries are forced to zero.
    void set_coefficients(std::vector<double> c) {
        if (c.size() != coeffs_.size()) throw SetupError("coefficient vector does not match the mesh");
        coeffs_ = std::move(c);
        pin_boundary();
    }

    bool is_zero() const {
        for (double c : coeffs_)
            if (c != 0.0) return false;
        return true;
    }

    /// Value at an arbitrary point; zero outside Ω.
    double operator()(const Point& x) const {
        const auto cell = mesh_->locate(x);
        if (!cell) return 0.0;
        return mesh_->make_point(*cell, x).interpolate(coeffs_);
    }

    /// Largest gradient norm over the cells.
    double lipschitz_constant() const {
        double best = 0.0;
        for (std::size_t c = 0; c < mesh_->cell_count(); ++c) {
            const int ci = static_cast<int>(c);
            const auto& cell = mesh_->cells()[c];
            if (mesh_->dim() == 1) {
                const double h = mesh_->vertex(ci, 1)[0] - mesh_->vertex(ci, 0)[0];
                best = std::max(best, std::abs(coeffs_[cell.vertices[1]] - coeffs_[cell.vertices[0]]) / h);
            } else {
                const Point a = mesh_->vertex(ci, 0), b = mesh_->vertex(ci, 1), d = mesh_->vertex(ci, 2);
                const double det = cross(b - a, d - a);
                const double du1 = coeffs_[cell.vertices[1]] - coeffs_[cell.vertices[0]];
                const double du2 = coeffs_[cell.vertices[2]] - coeffs_[cell.vertices[0]];
                const Point e1 = b - a, e2 = d - a;
                const Point g{(du1 * e2[1] - du2 * e1[1]) / det, (du2 * e1[0] - du1 * e2[0]) / det};
                best = std::max(best, norm(g));
            }
        }
        return best;
    }

    DiscreteFunction& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        return *this;
    }
    DiscreteFunction& operator+=(const DiscreteFunction& o) {
        check_same_mesh(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    DiscreteFunction& operator-=(const DiscreteFunction& o) {
        check_same_mesh(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    friend DiscreteFunction operator*(double s, DiscreteFunction u) { return u *= s; }
    friend DiscreteFunction operator+(DiscreteFunction u, const DiscreteFunction& v) { return u += v; }
    friend DiscreteFunction operator-(DiscreteFunction u, const DiscreteFunction& v) { return u -= v; }

private:
    void pin_boundary() {
        for (std::size_t v = 0; v < coeffs_.size(); ++v)
            if (mesh_->is_boundary(static_cast<int>(v))) coeffs_[v] = 0.0;
    }
    void check_same_mesh(const DiscreteFunction& o) const {
        if (o.mesh_.get() != mesh_.get() && o.coeffs_.size() != coeffs_.size())
            throw ConsistencyError("functions live on different meshes");
    }

    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> coeffs_;
};

} // namespace fams
