#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/summation.hpp>
#include <fams/musielak/certify.hpp>
#include <fams/nonlocal/pair_quadrature.hpp>
#include <fams/nonlocal/setup.hpp>
#include <fams/spaces/discrete_function.hpp>
#include <fams/spaces/luxemburg.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace fams {

/// Part of Q an integral is taken over.
enum class Region { Q, OmegaOmega };

struct PsiReport {
    double value = 0.0;
    double tail_bound = 0.0;
    bool accuracy_warning = false; ///< tail bound exceeds 1% of the value
};

struct AnisotropicNorms {
    std::vector<double> seminorms; ///< Luxemburg seminorm of every direction
    double sum = 0.0;              ///< Σ_i [u]_i
    double max = 0.0;              ///< max_i [u]_i
    double luxemburg = 0.0;        ///< joint Luxemburg norm of Ψ
};

struct PairTerms {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// |u(x) - u(y)| / |x - y|^s with u extended by zero outside Ω.
inline double holder_quotient(const DiscreteFunction& u, const Point& x, const Point& y, double s) {
    const double r = distance(x, y);
    if (r == 0.0) throw DomainError("holder_quotient: points must be distinct");
    return std::abs(u(x) - u(y)) / std::pow(r, s);
}

/// Discrete anisotropic Kirchhoff operator: the modular Ψ, its gradient, the associated norms and the energy.
class NonlocalOperator {
public:
    explicit NonlocalOperator(AnisotropicSetup setup, std::optional<QuadratureConfig> qc = std::nullopt)
        : setup_(std::move(setup)), qc_(qc.value_or(QuadratureConfig::defaults_for(setup_.mesh ? setup_.mesh->dim() : 1))) {
        setup_.validate();
        quad_ = std::make_shared<PairQuadrature>(*setup_.mesh, qc_);
        const auto& entries = quad_->entries();
        const auto& pts = quad_->points();
        const SampleGrid grid = SampleGrid::make(setup_.mesh->box(), 16, 1);
        for (const auto& dir : setup_.directions) {
            DirectionData d{dir.family, dir.order, {}, {}, 0.0};
            d.inv_rs.resize(entries.size());
            for (std::size_t e = 0; e < entries.size(); ++e) d.inv_rs[e] = std::pow(entries[e].dist, -dir.order);
            if (dir.family.kind() == FamilyKind::VariableExponent) {
                d.local_p.resize(entries.size());
                for (std::size_t e = 0; e < entries.size(); ++e)
                    d.local_p[e] = dir.family.local_exponent(pts[entries[e].x].coords, pts[entries[e].y].coords);
            }
            for (const auto& x : grid.points)
                for (const auto& y : grid.points) d.sup_at_one = std::max(d.sup_at_one, dir.family.Phi(x, y, 1.0));
            directions_.push_back(std::move(d));
        }
    }

    const AnisotropicSetup& setup() const { return setup_; }
    const Mesh& mesh() const { return *setup_.mesh; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return setup_.mesh; }
    const QuadratureConfig& config() const { return qc_; }
    const PairQuadrature& quadrature() const { return *quad_; }
    int direction_count() const { return static_cast<int>(directions_.size()); }
    std::size_t free_dimension() const { return mesh().free_vertices().size(); }

    /// Values of u at every quadrature point.
    std::vector<double> point_values(const DiscreteFunction& u) const {
        check(u);
        const auto& pts = quad_->points();
        std::vector<double> v(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) v[i] = pts[i].interpolate(u.coefficients());
        return v;
    }

    /// Modular of direction i over the chosen region.
    double psi_direction(const DiscreteFunction& u, int i, Region region = Region::Q) const {
        const auto v = point_values(u);
        return direction_sum(i, region, [&](std::size_t e) { return increment(v, i, e); }, 1.0);
    }

    /// Ψ(u) = Σ_i ∫_Q Φ_i(|D^{s_i} u|) dμ.
    double psi(const DiscreteFunction& u, Region region = Region::Q) const {
        const auto v = point_values(u);
        double total = 0.0;
        for (int i = 0; i < direction_count(); ++i)
            total += direction_sum(i, region, [&](std::size_t e) { return increment(v, i, e); }, 1.0);
        return total;
    }

    PsiReport psi_report(const DiscreteFunction& u) const {
        PsiReport r;
        r.value = psi(u);
        r.tail_bound = tail_bound(u);
        r.accuracy_warning = r.tail_bound > 0.01 * r.value;
        return r;
    }

    /// Upper bound for the part of Ψ(u) with |x - y| > R omitted by the quadrature.
    double tail_bound(const DiscreteFunction& u, std::optional<double> radius = std::nullopt) const {
        check(u);
        const double R = radius.value_or(quad_->radius());
        if (!(R >= 2.0 * mesh().box().diameter())) throw PreconditionError("tail_bound: R must be at least 2 · diam(Ω)");
        const auto& rule = mesh().volume_rule();
        double total = 0.0;
        for (const auto& d : directions_) {
            const auto& g = d.family.declared_indices();
            const double volume = deterministic_sum(rule.points.size(), [&](std::size_t k) {
                const double a = std::abs(rule.points[k].interpolate(u.coefficients()));
                return rule.weights[k] * std::max(std::pow(a, g.lower), std::pow(a, g.upper));
            });
            const double sl = d.order * g.lower, su = d.order * g.upper;
            const double radial = R >= 1.0 ? std::pow(R, -sl) / sl : (std::pow(R, -su) - 1.0) / su + 1.0 / sl;
            total += 2.0 * d.sup_at_one * volume * unit_sphere_measure(mesh().dim()) * radial;
        }
        return total;
    }

    /// Gradient of Ψ with respect to the vertex coefficients (zero at boundary vertices).
    std::vector<double> psi_gradient(const DiscreteFunction& u) const {
        const auto v = point_values(u);
        const auto& entries = quad_->entries();
        std::vector<double> coef(entries.size(), 0.0);
        for (int i = 0; i < direction_count(); ++i) {
            const auto& d = directions_[i];
            const auto& pts = quad_->points();
            parallel_for((entries.size() + reduction_chunk - 1) / reduction_chunk, [&](std::size_t c) {
                const std::size_t end = std::min(entries.size(), (c + 1) * reduction_chunk);
                for (std::size_t e = c * reduction_chunk; e < end; ++e) {
                    const auto& en = entries[e];
                    const double D = (v[en.x] - v[en.y]) * d.inv_rs[e];
                    coef[e] += en.weight * d.family.phi_local(exponent(d, e), pts[en.x].coords, pts[en.y].coords, D) * d.inv_rs[e];
                }
            });
        }
        return scatter(coef);
    }

    /// Luxemburg seminorm of direction i (relative tolerance 1e-8).
    double seminorm(const DiscreteFunction& u, int i, Region region = Region::Q) const {
        const auto t = magnitudes(u, i);
        return luxemburg_norm([&](double lambda) { return profile(i, t, lambda, region); }, gagliardo_tolerance());
    }

    /// Joint Luxemburg norm inf{λ : Ψ(u / λ) <= 1}.
    double luxemburg(const DiscreteFunction& u) const {
        std::vector<std::vector<double>> t;
        for (int i = 0; i < direction_count(); ++i) t.push_back(magnitudes(u, i));
        return luxemburg_norm(
            [&](double lambda) {
                double s = 0.0;
                for (int i = 0; i < direction_count(); ++i) s += profile(i, t[i], lambda, Region::Q);
                return s;
            },
            gagliardo_tolerance());
    }

    AnisotropicNorms norms(const DiscreteFunction& u) const {
        AnisotropicNorms n;
        for (int i = 0; i < direction_count(); ++i) {
            n.seminorms.push_back(seminorm(u, i));
            n.sum += n.seminorms.back();
            n.max = std::max(n.max, n.seminorms.back());
        }
        n.luxemburg = luxemburg(u);
        const double N = direction_count();
        auto fails = [](double lhs, double rhs) { return lhs > rhs + 1e-7 * std::max(1.0, std::abs(rhs)); };
        if (fails(n.max, n.sum) || fails(n.sum, N * n.max) || fails(n.sum, N * n.luxemburg) || fails(n.luxemburg, N * n.sum))
            throw ConsistencyError("anisotropic norm equivalence chain violated");
        return n;
    }

    /// I(u) = ∫_Ω |u|^{q(x)} / q(x) dx.
    double lebesgue_term(const DiscreteFunction& u) const {
        check(u);
        const auto& rule = mesh().volume_rule();
        return deterministic_sum(rule.points.size(), [&](std::size_t k) {
            const double a = std::abs(rule.points[k].interpolate(u.coefficients()));
            const double q = setup_.exponent(rule.points[k].coords);
            return rule.weights[k] * std::pow(a, q) / q;
        }, qc_.summation);
    }

    /// Gradient of I with respect to the vertex coefficients.
    std::vector<double> lebesgue_gradient(const DiscreteFunction& u) const {
        check(u);
        const auto& rule = mesh().volume_rule();
        std::vector<double> g(mesh().vertex_count(), 0.0);
        for (std::size_t k = 0; k < rule.points.size(); ++k) {
            const auto& p = rule.points[k];
            const double val = p.interpolate(u.coefficients());
            const double q = setup_.exponent(p.coords);
            const double f = rule.weights[k] * std::pow(std::abs(val), q - 1.0) * (val < 0.0 ? -1.0 : 1.0);
            for (int j = 0; j < 3; ++j)
                if (p.dofs[j] >= 0) g[p.dofs[j]] += f * p.shape[j];
        }
        pin(g);
        return g;
    }

    /// T_λ(u) = M̂(Ψ(u)) - λ I(u).
    double energy(const DiscreteFunction& u, double lambda) const {
        return setup_.kirchhoff.M_hat(psi(u)) - lambda * lebesgue_term(u);
    }

    /// Gradient of T_λ: M(Ψ(u)) Ψ'(u) - λ I'(u).
    std::vector<double> energy_gradient(const DiscreteFunction& u, double lambda) const {
        const double m = setup_.kirchhoff.M(psi(u));
        auto g = psi_gradient(u);
        const auto gi = lebesgue_gradient(u);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = m * g[k] - lambda * gi[k];
        return g;
    }

    /// Σ w (φ(Du) - φ(Dv))(Du - Dv) and 4 Σ w Φ(|Du - Dv| / 2) for direction i.
    PairTerms monotonicity_terms(const DiscreteFunction& u, const DiscreteFunction& w, int i) const {
        const auto vu = point_values(u), vw = point_values(w);
        const auto& d = directions_[i];
        const auto& pts = quad_->points();
        const auto& entries = quad_->entries();
        PairTerms r;
        r.lhs = direction_sum(i, Region::Q, [&](std::size_t e) -> double {
            const auto& en = entries[e];
            const double a = (vu[en.x] - vu[en.y]) * d.inv_rs[e], b = (vw[en.x] - vw[en.y]) * d.inv_rs[e];
            const double p = exponent(d, e);
            const auto& x = pts[en.x].coords;
            const auto& y = pts[en.y].coords;
            return (d.family.phi_local(p, x, y, a) - d.family.phi_local(p, x, y, b)) * (a - b);
        }, 0.0, true);
        r.rhs = 4.0 * direction_sum(i, Region::Q, [&](std::size_t e) {
            const auto& en = entries[e];
            return 0.5 * std::abs((vu[en.x] - vu[en.y]) - (vw[en.x] - vw[en.y])) * d.inv_rs[e];
        }, 1.0);
        return r;
    }

    /// ½(Ψ_i(u) + Ψ_i(w)) and Ψ_i((u + w) / 2) + Ψ_i((u - w) / 2).
    PairTerms clarkson_terms(const DiscreteFunction& u, const DiscreteFunction& w, int i) const {
        const auto vu = point_values(u), vw = point_values(w);
        const auto& entries = quad_->entries();
        auto inc = [&](const std::vector<double>& v, std::size_t e) { return std::abs(v[entries[e].x] - v[entries[e].y]) * directions_[i].inv_rs[e]; };
        PairTerms r;
        r.lhs = 0.5 * (direction_sum(i, Region::Q, [&](std::size_t e) { return inc(vu, e); }, 1.0) +
                       direction_sum(i, Region::Q, [&](std::size_t e) { return inc(vw, e); }, 1.0));
        auto half = [&](double sign) {
            return direction_sum(i, Region::Q, [&](std::size_t e) {
                const auto& en = entries[e];
                return 0.5 * std::abs((vu[en.x] - vu[en.y]) + sign * (vw[en.x] - vw[en.y])) * directions_[i].inv_rs[e];
            }, 1.0);
        };
        r.rhs = half(1.0) + half(-1.0);
        return r;
    }

    /// Zeroes the boundary components of a coefficient-space vector.
    void pin(std::vector<double>& g) const {
        for (std::size_t k = 0; k < g.size(); ++k)
            if (mesh().is_boundary(static_cast<int>(k))) g[k] = 0.0;
    }

private:
    struct DirectionData {
        MusielakFamily family;
        double order;
        std::vector<double> inv_rs;  ///< |x - y|^{-s} per entry
        std::vector<double> local_p; ///< p(x, y) per entry for variable exponents
        double sup_at_one;           ///< sup Φ(x, y, 1)
    };

    static LuxemburgOptions gagliardo_tolerance() { return LuxemburgOptions{1e-8, 200}; }

    void check(const DiscreteFunction& u) const {
        if (u.coefficients().size() != mesh().vertex_count()) throw ConsistencyError("function does not live on the operator mesh");
    }

    double exponent(const DirectionData& d, std::size_t e) const {
        return d.local_p.empty() ? d.family.base_exponent() : d.local_p[e];
    }

    double increment(const std::vector<double>& v, int i, std::size_t e) const {
        const auto& en = quad_->entries()[e];
        return std::abs(v[en.x] - v[en.y]) * directions_[i].inv_rs[e];
    }

    /// Σ_e w_e Φ_i(t_e / scale) when raw is false; Σ_e w_e term(e) when raw is true.
    template <class Magnitude>
    double direction_sum(int i, Region region, Magnitude&& t, double scale, bool raw = false) const {
        const auto& d = directions_[i];
        const auto& entries = quad_->entries();
        const auto& pts = quad_->points();
        const std::size_t n = region == Region::Q ? entries.size() : quad_->interior_count();
        return deterministic_sum(n, [&](std::size_t e) {
            const auto& en = entries[e];
            if (raw) return en.weight * t(e);
            const double m = t(e);
            if (m == 0.0) return 0.0;
            return en.weight * d.family.Phi_local(exponent(d, e), pts[en.x].coords, pts[en.y].coords, m / scale);
        }, qc_.summation);
    }

    std::vector<double> magnitudes(const DiscreteFunction& u, int i) const {
        const auto v = point_values(u);
        std::vector<double> t(quad_->entries().size());
        for (std::size_t e = 0; e < t.size(); ++e) t[e] = increment(v, i, e);
        return t;
    }

    double profile(int i, const std::vector<double>& t, double lambda, Region region) const {
        return direction_sum(i, region, [&](std::size_t e) { return t[e]; }, lambda);
    }

    /// Accumulates per-entry coefficients onto the two points and then onto the vertices.
    std::vector<double> scatter(const std::vector<double>& coef) const {
        const auto& entries = quad_->entries();
        const auto& pts = quad_->points();
        std::vector<double> acc(pts.size(), 0.0);
        for (std::size_t e = 0; e < entries.size(); ++e) {
            acc[entries[e].x] += coef[e];
            acc[entries[e].y] -= coef[e];
        }
        std::vector<double> g(mesh().vertex_count(), 0.0);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (acc[k] == 0.0) continue;
            for (int j = 0; j < 3; ++j)
                if (pts[k].dofs[j] >= 0) g[pts[k].dofs[j]] += acc[k] * pts[k].shape[j];
        }
        pin(g);
        return g;
    }

    AnisotropicSetup setup_;
    QuadratureConfig qc_;
    std::shared_ptr<const PairQuadrature> quad_;
    std::vector<DirectionData> directions_;
};

} // namespace fams
