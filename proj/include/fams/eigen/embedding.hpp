#pragma once

#include <fams/core/errors.hpp>
#include <fams/nonlocal/operator.hpp>
#include <fams/spaces/modulars.hpp>

#include <algorithm>
#include <random>

namespace fams {

/// ‖u‖_Φ→ = Σ_i [u]_i.
inline double vector_norm(const NonlocalOperator& op, const DiscreteFunction& u) {
    double s = 0.0;
    for (int i = 0; i < op.direction_count(); ++i) s += op.seminorm(u, i);
    return s;
}

/// Largest observed ratio ‖u‖_{q(x)} / ‖u‖_Φ→ over random P1 functions, every nodal basis function,
/// and low sine modes. Its reciprocal estimates the embedding constant c1.
inline double embedding_constant(const NonlocalOperator& op, int samples, std::uint64_t seed = 0) {
    if (samples < 32) throw PreconditionError("embedding_constant: at least 32 samples are required");
    const auto& mesh = op.mesh_ptr();
    const auto& q = op.setup().exponent;
    double best = 0.0;
    auto consider = [&](const DiscreteFunction& u) {
        if (u.is_zero()) return;
        best = std::max(best, lebesgue_norm(u, q) / vector_norm(op, u));
    };
    std::mt19937_64 rng(seed);
    for (int k = 0; k < samples; ++k) consider(DiscreteFunction::random(mesh, rng));
    for (int v : mesh->free_vertices()) consider(DiscreteFunction::basis(mesh, v));
    const int modes = mesh->dim() == 1 ? 3 : 2;
    for (int a = 1; a <= modes; ++a)
        for (int b = 1; b <= (mesh->dim() == 1 ? 1 : modes); ++b) consider(DiscreteFunction::sine_mode(mesh, {a, b}));
    return best;
}

} // namespace fams
