#pragma once

#include <fams/eigen/regime.hpp>
#include <fams/spaces/discrete_function.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fams {

struct SolverOptions {
    double tol = 1e-6;           ///< residual tolerance (Euclidean gradient norm / √dim)
    double relative_tol = 1e-5;  ///< gradient norm relative to the size of its two parts
    int max_iterations = 20000;
    int path_points = 21;
    int stagnation_sweeps = 50;
    int max_doublings = 60;
    int max_halvings = 30;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    bool override_regime = false;
    std::optional<double> ball_radius; ///< defaults to 0.9 · min(1, 1 / c1)
    double seed_sign = 1.0;
    int embedding_samples = 32;
    std::uint64_t seed = 0;
};

struct TraceRow {
    int iteration = 0;
    double energy = 0.0;
    double residual = 0.0;
};

struct EigenSolution {
    double lambda = 0.0;
    DiscreteFunction u;
    double energy = 0.0;
    double residual = 0.0;
    double relative_residual = 0.0;
    RegimeClassification regime;
    int iterations = 0;
    std::vector<TraceRow> trace;
    bool converged = false;
    std::string message;
    double ball_radius = 0.0; ///< sublinear solves only
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> axpy(const std::vector<double>& x, double alpha, const std::vector<double>& d) {
    std::vector<double> r(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) r[k] = x[k] + alpha * d[k];
    return r;
}

} // namespace detail

} // namespace fams
