#pragma once

#include <fams/core/errors.hpp>
#include <fams/eigen/embedding.hpp>
#include <fams/eigen/regime.hpp>
#include <fams/eigen/solution.hpp>
#include <fams/nonlocal/operator.hpp>

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace fams {

namespace detail {

/// Energy, gradient and residual bookkeeping shared by both solvers.
class EnergyView {
public:
    EnergyView(const NonlocalOperator& op, double lambda) : op_(op), lambda_(lambda) {}

    DiscreteFunction make(const std::vector<double>& c) const { return DiscreteFunction(op_.mesh_ptr(), c); }
    double energy(const std::vector<double>& c) const { return op_.energy(make(c), lambda_); }

    struct Gradient {
        std::vector<double> g;
        double residual = 0.0;
        double relative = 0.0;
    };

    Gradient gradient(const std::vector<double>& c) const {
        const auto u = make(c);
        const double m = op_.setup().kirchhoff.M(op_.psi(u));
        auto gp = op_.psi_gradient(u);
        const auto gi = op_.lebesgue_gradient(u);
        Gradient r;
        r.g.resize(gp.size());
        for (std::size_t k = 0; k < gp.size(); ++k) r.g[k] = m * gp[k] - lambda_ * gi[k];
        const double scale = m * norm2(gp) + lambda_ * norm2(gi);
        const double n = norm2(r.g);
        r.residual = n / std::sqrt(static_cast<double>(op_.free_dimension()));
        r.relative = scale > 0.0 ? n / scale : std::numeric_limits<double>::infinity();
        return r;
    }

private:
    const NonlocalOperator& op_;
    double lambda_;
};

inline void require_regime(const RegimeClassification& c, Regime wanted, bool override_regime) {
    if (c.regime == wanted || override_regime) return;
    throw RegimeError(std::string("solver requires the ") + to_string(wanted) + " regime, but the setup is " + to_string(c.regime) +
                      " (" + c.reason + ")");
}

} // namespace detail

/// Ball radius 0.9 · min(1, 1 / c1) with c1 = 1 / embedding_constant.
inline double default_ball_radius(const NonlocalOperator& op, const SolverOptions& opts) {
    return 0.9 * std::min(1.0, embedding_constant(op, opts.embedding_samples, opts.seed));
}

struct LambdaStarEstimate {
    double lambda_star = 0.0;
    double c1 = 0.0;          ///< 1 / embedding_constant
    double ball_radius = 0.0; ///< ρ used in λ* and as the ball of solve_sublinear
};

/// λ* from the estimated embedding constant; ρ is the configured ball radius or the default.
inline LambdaStarEstimate estimate_lambda_star(const NonlocalOperator& op, const SolverOptions& opts) {
    const auto regime = classify_regime(op.setup());
    const double K = embedding_constant(op, opts.embedding_samples, opts.seed);
    LambdaStarEstimate e;
    e.c1 = 1.0 / K;
    e.ball_radius = opts.ball_radius.value_or(0.9 * std::min(1.0, K));
    e.lambda_star = lambda_star(op.setup().kirchhoff.m0(), e.ball_radius, regime.upper_index_max, regime.q_minus, e.c1, op.direction_count());
    return e;
}

/// Local minimizer of T_λ in the ball ‖u‖_Φ→ <= ρ by projected gradient descent with Armijo backtracking.
inline EigenSolution solve_sublinear(const NonlocalOperator& op, double lambda, const SolverOptions& opts = {}) {
    if (!(lambda > 0.0)) throw DomainError("solve_sublinear: λ must be positive");
    EigenSolution sol;
    sol.lambda = lambda;
    sol.regime = classify_regime(op.setup());
    detail::require_regime(sol.regime, Regime::Sublinear, opts.override_regime);
    const detail::EnergyView view(op, lambda);
    const double rho = opts.ball_radius.value_or(default_ball_radius(op, opts));
    sol.ball_radius = rho;

    const bool single = op.direction_count() == 1;
    auto ball_norm = [&](const std::vector<double>& c) { return vector_norm(op, view.make(c)); };
    auto inside = [&](const std::vector<double>& c) {
        if (single) return op.psi_direction((1.0 / rho) * view.make(c), 0) <= 1.0;
        return ball_norm(c) <= rho;
    };
    auto project = [&](std::vector<double> c) {
        if (inside(c)) return c;
        const double scale = rho / ball_norm(c);
        for (double& v : c) v *= scale;
        return c;
    };

    const auto bump = DiscreteFunction::bump(op.mesh_ptr());
    std::vector<double> u;
    double t = 0.5;
    for (int k = 0; k < opts.max_halvings; ++k, t *= 0.5) {
        std::vector<double> c = bump.coefficients();
        for (double& v : c) v *= opts.seed_sign * t;
        if (view.energy(c) < 0.0) {
            u = std::move(c);
            break;
        }
    }
    if (u.empty()) throw RegimeError("solve_sublinear: no seed with negative energy after halving");
    u = project(std::move(u));

    double E = view.energy(u);
    auto G = view.gradient(u);
    double step = opts.initial_step;
    for (int it = 0;; ++it) {
        sol.trace.push_back({it, E, G.residual});
        sol.iterations = it;
        if (G.residual < opts.tol && G.relative < opts.relative_tol) {
            sol.converged = true;
            sol.message = "converged";
            break;
        }
        if (it >= opts.max_iterations) {
            sol.message = "iteration cap reached";
            break;
        }
        bool accepted = false;
        std::vector<double> trial;
        double E_trial = E;
        double alpha = step;
        for (int k = 0; k < 80; ++k, alpha *= opts.backtrack) {
            trial = project(detail::axpy(u, -alpha, G.g));
            std::vector<double> s(u.size());
            for (std::size_t j = 0; j < u.size(); ++j) s[j] = u[j] - trial[j];
            const double decrease = detail::dot(G.g, s);
            if (!(decrease > 0.0)) continue;
            E_trial = view.energy(trial);
            if (E_trial <= E - opts.armijo_c * decrease) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            sol.message = "line search failed to find a decrease";
            break;
        }
        auto G_trial = view.gradient(trial);
        std::vector<double> s(u.size()), y(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
            s[j] = trial[j] - u[j];
            y[j] = G_trial.g[j] - G.g[j];
        }
        const double sy = detail::dot(s, y);
        step = sy > 0.0 ? detail::dot(s, s) / sy : 2.0 * alpha;
        u = std::move(trial);
        E = E_trial;
        G = std::move(G_trial);
    }
    sol.u = view.make(u);
    sol.energy = E;
    sol.residual = G.residual;
    sol.relative_residual = G.relative;
    return sol;
}

/// Mountain-pass critical point by path deformation. The path is the segment from 0 to an endpoint e with
/// T_λ(e) < 0, sampled at equally spaced points. Each sweep locates the path maximizer, refines it by Brent's
/// method, moves the path direction along the gradient component orthogonal to the path with Armijo
/// backtracking on the new path maximum, and re-tensions the endpoint so that T_λ(e) stays negative.
/// When no path point has positive energy the first interior point plays the role of the maximizer.
inline EigenSolution solve_mountain_pass(const NonlocalOperator& op, double lambda, const SolverOptions& opts = {}) {
    if (!(lambda > 0.0)) throw DomainError("solve_mountain_pass: λ must be positive");
    if (opts.path_points < 3) throw PreconditionError("solve_mountain_pass: at least three path points are required");
    EigenSolution sol;
    sol.lambda = lambda;
    sol.regime = classify_regime(op.setup());
    detail::require_regime(sol.regime, Regime::Superlinear, opts.override_regime);
    const detail::EnergyView view(op, lambda);
    using Vec = std::vector<double>;
    const int P = opts.path_points;

    auto scaled = [](const Vec& w, double t) {
        Vec c(w);
        for (double& v : c) v *= t;
        return c;
    };
    auto normalized = [](Vec w) {
        const double n = detail::norm2(w);
        for (double& v : w) v /= n;
        return w;
    };

    Vec w = normalized(scaled(DiscreteFunction::bump(op.mesh_ptr()).coefficients(), opts.seed_sign));
    // Grows T until T_λ(T w) < 0.
    auto endpoint = [&](const Vec& dir, double T) -> std::optional<double> {
        for (int k = 0; k <= opts.max_doublings; ++k, T *= 2.0)
            if (view.energy(scaled(dir, T)) < 0.0) return T;
        return std::nullopt;
    };
    const auto T0 = endpoint(w, 1.0);
    if (!T0) throw RegimeError("solve_mountain_pass: no endpoint with negative energy after doubling");
    double T = *T0;

    struct Peak {
        double t = 0.0;
        double energy = 0.0;
    };
    // Maximizer of T_λ over the sampled segment [0, T w], refined between the neighbours of the best point.
    auto peak = [&](const Vec& dir, double len) {
        const double h = len / (P - 1);
        int jm = 1;
        double best = view.energy(scaled(dir, h));
        for (int j = 2; j < P - 1; ++j) {
            const double e = view.energy(scaled(dir, j * h));
            if (e > best) {
                best = e;
                jm = j;
            }
        }
        if (!(best > 0.0)) return Peak{h, best};
        std::uintmax_t evaluations = 60;
        const auto found = boost::math::tools::brent_find_minima([&](double t) { return -view.energy(scaled(dir, t)); }, (jm - 1) * h,
                                                                 (jm + 1) * h, 40, evaluations);
        return -found.second >= best ? Peak{found.first, -found.second} : Peak{jm * h, best};
    };

    Peak pk = peak(w, T);
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    double step = opts.initial_step;
    Vec prev_u, prev_g, u;
    detail::EnergyView::Gradient G;
    for (int sweep = 0;; ++sweep) {
        u = scaled(w, pk.t);
        G = view.gradient(u);
        sol.trace.push_back({sweep, pk.energy, G.residual});
        sol.iterations = sweep;
        if (G.residual < opts.tol && G.relative < opts.relative_tol) {
            sol.converged = true;
            sol.message = "converged";
            break;
        }
        if (sweep >= opts.max_iterations) {
            sol.message = "iteration cap reached";
            break;
        }
        if (pk.energy < best - 1e-14 * std::abs(best)) {
            best = pk.energy;
            since_best = 0;
        } else if (++since_best >= opts.stagnation_sweeps) {
            sol.message = "stagnation: maximizer energy did not decrease";
            break;
        }

        Vec d = G.g;
        const double gw = detail::dot(G.g, w);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = -(d[k] - gw * w[k]);
        const double slope = -detail::dot(d, d);
        if (!prev_u.empty()) {
            Vec s(u.size()), y(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) {
                s[k] = u[k] - prev_u[k];
                y[k] = G.g[k] - prev_g[k];
            }
            const double sy = detail::dot(s, y);
            if (sy > 0.0) step = detail::dot(s, s) / sy;
        }
        prev_u = u;
        prev_g = G.g;

        bool accepted = false;
        double alpha = step;
        for (int k = 0; k < 80 && !accepted; ++k, alpha *= opts.backtrack) {
            const Vec dir = normalized(detail::axpy(u, alpha, d));
            const double len = pk.energy > 0.0 ? std::max(T, 3.0 * pk.t) : T;
            const auto Tn = endpoint(dir, len);
            if (!Tn) continue;
            const Peak trial = peak(dir, *Tn);
            if (trial.energy <= pk.energy + opts.armijo_c * alpha * slope) {
                w = dir;
                T = *Tn;
                pk = trial;
                accepted = true;
            }
        }
        if (!accepted) {
            sol.message = "line search failed to lower the path maximum";
            break;
        }
    }
    sol.u = view.make(u);
    sol.energy = pk.energy;
    sol.residual = G.residual;
    sol.relative_residual = G.relative;
    return sol;
}

struct EigenVerification {
    double max_basis_defect = 0.0;
    double max_random_defect = 0.0;
    double max_defect = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Weak-form defect M(Ψ(u)) ⟨Ψ'(u), v⟩ - λ ⟨I'(u), v⟩ over every nodal basis function and 16 random v,
/// each divided by ‖v‖_Φ→.
inline EigenVerification verify_eigen(const EigenSolution& sol, const NonlocalOperator& op, double tol, std::uint64_t seed = 0) {
    if (sol.u.coefficients().empty() || sol.u.is_zero()) throw PreconditionError("verify_eigen: u must not vanish");
    const auto g = op.energy_gradient(sol.u, sol.lambda);
    EigenVerification r;
    r.tolerance = 10.0 * tol;
    const auto& mesh = op.mesh_ptr();
    for (int v : mesh->free_vertices())
        r.max_basis_defect = std::max(r.max_basis_defect, std::abs(g[v]) / vector_norm(op, DiscreteFunction::basis(mesh, v)));
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 16; ++k) {
        const auto v = DiscreteFunction::random(mesh, rng);
        r.max_random_defect = std::max(r.max_random_defect, std::abs(detail::dot(g, v.coefficients())) / vector_norm(op, v));
    }
    r.max_defect = std::max(r.max_basis_defect, r.max_random_defect);
    r.passed = r.max_defect <= r.tolerance;
    return r;
}

} // namespace fams
