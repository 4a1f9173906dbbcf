#pragma once

#include <fams/fams.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <vector>

namespace fams::testing {

inline std::shared_ptr<const Mesh> interval_mesh(int cells, double a = 0.0, double b = 1.0) {
    return std::make_shared<const Mesh>(Mesh::uniform(Box::interval(a, b), {cells, 1}));
}

inline std::shared_ptr<const Mesh> square_mesh(int cells) {
    return std::make_shared<const Mesh>(Mesh::uniform(Box::rectangle(0.0, 1.0, 0.0, 1.0), {cells, cells}));
}

/// One direction with Φ(t) = t^p / p on [0, 1], exponent q ≡ q and M ≡ 1.
inline AnisotropicSetup power_setup(int cells, double p, double s, double q) {
    AnisotropicSetup setup;
    setup.mesh = interval_mesh(cells);
    setup.directions = {Direction{MusielakFamily::constant_power(p), s}};
    setup.exponent = ExponentField::constant(q);
    return setup;
}

/// Two directions on the unit square: Φ(t) = t² / 2 with s = 0.5 and a log-perturbed power 2.5 with s = 0.4.
inline AnisotropicSetup planar_setup(int cells, double q = 4.0) {
    AnisotropicSetup setup;
    setup.mesh = square_mesh(cells);
    setup.directions = {Direction{MusielakFamily::constant_power(2.0), 0.5}, Direction{MusielakFamily::log_perturbed(2.5), 0.4}};
    setup.exponent = ExponentField::constant(q);
    return setup;
}

/// Ψ(u) = ½ ∫∫_Q |u(x) - u(y)|² / |x - y|^{1 + 2s} for u on [0, 1] by a midpoint double sum over Ω × Ω
/// (diagonal skipped) plus the exterior part in closed form ∫_Ω u(x)² (x^{-2s} + (1 - x)^{-2s} - 2 R^{-2s}) / (2s) dx,
/// where R truncates |x - y| as the quadrature does.
inline double power2_psi_oracle(const DiscreteFunction& u, double s, int samples,
                                double radius = std::numeric_limits<double>::infinity()) {
    const double h = 1.0 / samples;
    std::vector<double> x(samples), v(samples);
    for (int i = 0; i < samples; ++i) {
        x[i] = (i + 0.5) * h;
        v[i] = u({x[i], 0.0});
    }
    double inner = 0.0;
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j)
            if (i != j) inner += h * h * 0.5 * (v[i] - v[j]) * (v[i] - v[j]) / std::pow(std::abs(x[i] - x[j]), 1.0 + 2.0 * s);
    double outer = 0.0;
    for (int i = 0; i < samples; ++i)
        outer += h * v[i] * v[i] * (std::pow(x[i], -2.0 * s) + std::pow(1.0 - x[i], -2.0 * s) - 2.0 * std::pow(radius, -2.0 * s)) / (2.0 * s);
    return inner + outer;
}

/// Restriction of a full coefficient vector to the free vertices.
inline Eigen::VectorXd free_part(const Mesh& mesh, const std::vector<double>& c) {
    const auto& free = mesh.free_vertices();
    Eigen::VectorXd r(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) r[k] = c[free[k]];
    return r;
}

inline DiscreteFunction from_free(const std::shared_ptr<const Mesh>& mesh, const Eigen::VectorXd& r) {
    std::vector<double> c(mesh->vertex_count(), 0.0);
    const auto& free = mesh->free_vertices();
    for (std::size_t k = 0; k < free.size(); ++k) c[free[k]] = r[k];
    return DiscreteFunction(mesh, c);
}

/// Columns are the Ψ-gradients of the free nodal basis functions.
inline Eigen::MatrixXd gradient_matrix(const NonlocalOperator& op) {
    const auto& mesh = op.mesh_ptr();
    const auto& free = mesh->free_vertices();
    Eigen::MatrixXd A(free.size(), free.size());
    for (std::size_t k = 0; k < free.size(); ++k) A.col(k) = free_part(*mesh, op.psi_gradient(DiscreteFunction::basis(mesh, free[k])));
    return A;
}

/// P1 mass matrix restricted to the free vertices, from the exact per-cell formula.
inline Eigen::MatrixXd mass_matrix(const Mesh& mesh) {
    const auto& free = mesh.free_vertices();
    std::vector<int> index(mesh.vertex_count(), -1);
    for (std::size_t k = 0; k < free.size(); ++k) index[free[k]] = static_cast<int>(k);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(free.size(), free.size());
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
        const auto& cell = mesh.cells()[c];
        const double m = mesh.cell_measure(static_cast<int>(c));
        const double diag = cell.size == 2 ? m / 3.0 : m / 6.0;
        const double off = cell.size == 2 ? m / 6.0 : m / 12.0;
        for (int a = 0; a < cell.size; ++a)
            for (int b = 0; b < cell.size; ++b) {
                const int i = index[cell.vertices[a]], j = index[cell.vertices[b]];
                if (i >= 0 && j >= 0) B(i, j) += a == b ? diag : off;
            }
    }
    return B;
}

/// Exact ∫ |u|^k over the mesh for a P1 function and an even integer k.
inline double exact_even_power_integral(const DiscreteFunction& u, int k) {
    const Mesh& mesh = u.mesh();
    double total = 0.0;
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
        const auto& cell = mesh.cells()[c];
        const double m = mesh.cell_measure(static_cast<int>(c));
        std::array<double, 3> v{0.0, 0.0, 0.0};
        for (int a = 0; a < cell.size; ++a) v[a] = u.coefficient(cell.vertices[a]);
        // Average of a homogeneous degree-k polynomial in barycentrics: Σ over multi-indices of
        // v^α · α! · (d)! / (k + d)! · k! / α!, with d the simplex dimension.
        const int d = cell.size - 1;
        double sum = 0.0;
        for (int a = 0; a <= k; ++a)
            for (int b = 0; a + b <= k; ++b) {
                const int r = k - a - b;
                if (d == 1 && r > 0) continue;
                sum += std::pow(v[0], a) * std::pow(v[1], b) * (d == 2 ? std::pow(v[2], r) : 1.0);
            }
        total += m * sum * std::tgamma(k + 1.0) * std::tgamma(d + 1.0) / std::tgamma(k + d + 1.0);
    }
    return total;
}

} // namespace fams::testing
