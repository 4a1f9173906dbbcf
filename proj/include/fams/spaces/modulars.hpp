#pragma once

#include <fams/core/summation.hpp>
#include <fams/musielak/family.hpp>
#include <fams/spaces/discrete_function.hpp>
#include <fams/spaces/exponent_field.hpp>
#include <fams/spaces/luxemburg.hpp>

#include <cmath>
#include <vector>

namespace fams {

/// Values of u and of a per-point scalar at the volume quadrature points of its mesh.
struct VolumeSamples {
    std::vector<double> values;
    std::vector<double> weights;
    std::vector<Point> coords;

    static VolumeSamples of(const DiscreteFunction& u) {
        const auto& rule = u.mesh().volume_rule();
        VolumeSamples s;
        s.values.reserve(rule.points.size());
        for (const auto& p : rule.points) {
            s.values.push_back(p.interpolate(u.coefficients()));
            s.coords.push_back(p.coords);
        }
        s.weights = rule.weights;
        return s;
    }
};

/// ρ_q(u) = ∫_Ω |u|^{q(x)} dx.
inline double lebesgue_modular(const DiscreteFunction& u, const ExponentField& q) {
    const auto s = VolumeSamples::of(u);
    return deterministic_sum(s.values.size(), [&](std::size_t i) { return s.weights[i] * std::pow(std::abs(s.values[i]), q(s.coords[i])); });
}

/// Luxemburg norm in L^{q(x)}(Ω).
inline double lebesgue_norm(const DiscreteFunction& u, const ExponentField& q, LuxemburgOptions opts = {}) {
    const auto s = VolumeSamples::of(u);
    std::vector<double> qs(s.values.size());
    for (std::size_t i = 0; i < qs.size(); ++i) qs[i] = q(s.coords[i]);
    return luxemburg_norm(
        [&](double lambda) {
            return deterministic_sum(s.values.size(), [&](std::size_t i) {
                return s.weights[i] * std::pow(std::abs(s.values[i]) / lambda, qs[i]);
            });
        },
        opts);
}

/// ∫_Ω Φ̂_x(|u(x)|) dx.
inline double musielak_modular(const DiscreteFunction& u, const MusielakFamily& family) {
    const auto s = VolumeSamples::of(u);
    return deterministic_sum(s.values.size(), [&](std::size_t i) {
        return s.weights[i] * family.Phi_hat(s.coords[i], std::abs(s.values[i]));
    });
}

/// Luxemburg norm in L^{Φ̂}(Ω).
inline double musielak_norm(const DiscreteFunction& u, const MusielakFamily& family, LuxemburgOptions opts = {}) {
    const auto s = VolumeSamples::of(u);
    std::vector<double> ps(s.values.size());
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i] = family.local_exponent(s.coords[i], s.coords[i]);
    return luxemburg_norm(
        [&](double lambda) {
            return deterministic_sum(s.values.size(), [&](std::size_t i) {
                return s.weights[i] * family.Phi_local(ps[i], s.coords[i], s.coords[i], std::abs(s.values[i]) / lambda);
            });
        },
        opts);
}

/// Luxemburg norm with respect to the complementary function of Φ̂.
inline double conjugate_musielak_norm(const DiscreteFunction& v, const MusielakFamily& family, LuxemburgOptions opts = {}) {
    const auto s = VolumeSamples::of(v);
    return luxemburg_norm(
        [&](double lambda) {
            return deterministic_sum(s.values.size(), [&](std::size_t i) {
                return s.weights[i] * family.conjugate_Phi(s.coords[i], s.coords[i], std::abs(s.values[i]) / lambda);
            });
        },
        opts);
}

struct HolderCheck {
    double pairing = 0.0; ///< |∫ u v|
    double bound = 0.0;   ///< 2 ‖u‖_Φ̂ ‖v‖_Φ̄
    bool holds() const { return pairing <= bound * (1.0 + 1e-9); }
};

/// Hölder inequality |∫ u v| <= 2 ‖u‖_Φ̂ ‖v‖_Φ̄ on the discrete pair.
inline HolderCheck holder_pairing_check(const DiscreteFunction& u, const DiscreteFunction& v, const MusielakFamily& family) {
    const auto su = VolumeSamples::of(u);
    const auto sv = VolumeSamples::of(v);
    HolderCheck h;
    h.pairing = std::abs(deterministic_sum(su.values.size(), [&](std::size_t i) { return su.weights[i] * su.values[i] * sv.values[i]; }));
    h.bound = 2.0 * musielak_norm(u, family) * conjugate_musielak_norm(v, family, LuxemburgOptions{1e-8, 200});
    return h;
}

} // namespace fams
