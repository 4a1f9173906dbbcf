#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fams;
using namespace fams::testing;

namespace {

AnisotropicSetup with_indices(double p_lo, double p_hi, double q, double theta = 1.0) {
    AnisotropicSetup s = power_setup(8, 2.0, 0.5, q);
    s.directions = {Direction{MusielakFamily::variable_exponent([p_lo, p_hi](const Point&, const Point&) { return 0.5 * (p_lo + p_hi); }, p_lo, p_hi), 0.5}};
    if (theta > 1.0) s.kirchhoff = Kirchhoff::linear(1.0, 0.5, theta);
    return s;
}

} // namespace

TEST(Regime, ClassificationExamples) {
    EXPECT_EQ(classify_regime(power_setup(8, 2.0, 0.5, 4.0)).regime, Regime::Superlinear);
    EXPECT_EQ(classify_regime(power_setup(8, 3.0, 0.5, 2.0)).regime, Regime::Sublinear);
    EXPECT_EQ(classify_regime(power_setup(8, 2.0, 0.5, 2.0)).regime, Regime::Indeterminate);
    EXPECT_EQ(classify_regime(with_indices(2.0, 3.0, 2.5)).regime, Regime::Indeterminate);
    EXPECT_EQ(classify_regime(with_indices(2.0, 3.0, 3.5, 2.0)).regime, Regime::Superlinear);
    const auto c = classify_regime(power_setup(8, 2.0, 0.5, 2.0));
    EXPECT_NE(c.reason.find("neither"), std::string::npos);
}

TEST(LambdaStar, FormulaValues) {
    EXPECT_DOUBLE_EQ(lambda_star(1.0, 0.5, 3.0, 2.0, 1.0, 1), 0.5);
    EXPECT_DOUBLE_EQ(lambda_star(2.0, 0.5, 3.0, 2.0, 1.0, 1), 1.0);
    EXPECT_DOUBLE_EQ(lambda_star(1.0, 0.5, 2.0, 1.5, 1.0, 1) / lambda_star(1.0, 0.5, 2.0, 1.5, 1.0, 2), 2.0);
}

TEST(LambdaStar, Preconditions) {
    EXPECT_THROW(lambda_star(1.0, 0.5, 3.0, 2.0, 2.0, 1), PreconditionError);
    EXPECT_THROW(lambda_star(1.0, 1.0, 3.0, 2.0, 0.5, 1), PreconditionError);
    EXPECT_THROW(lambda_star(1.0, 0.0, 3.0, 2.0, 0.5, 1), PreconditionError);
    EXPECT_THROW(lambda_star(0.0, 0.5, 3.0, 2.0, 0.5, 1), DomainError);
}

TEST(Embedding, MonotoneInSamplesAndConsistentWithTheDensePencil) {
    const NonlocalOperator op(power_setup(32, 2.0, 0.5, 2.0));
    EXPECT_THROW(embedding_constant(op, 16), PreconditionError);
    const double few = embedding_constant(op, 32, 4), many = embedding_constant(op, 64, 4);
    EXPECT_GT(few, 0.0);
    EXPECT_LE(few, many);
    const Eigen::MatrixXd A = gradient_matrix(op), B = mass_matrix(op.mesh());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(A, B);
    // [u]² = ½ uᵀAu and ‖u‖₂² = uᵀBu, so the optimal ratio is √(2 / μ₁).
    const double optimal = std::sqrt(2.0 / pencil.eigenvalues()[0]);
    EXPECT_LE(many, optimal * (1.0 + 1e-9));
    EXPECT_GT(many, 0.9 * optimal);
}

TEST(MountainPass, SuperlinearBenchmarkConvergesWithPositiveEnergy) {
    const NonlocalOperator op(power_setup(32, 2.0, 0.5, 4.0));
    SolverOptions opts;
    const auto sol = solve_mountain_pass(op, 1.0, opts);
    ASSERT_TRUE(sol.converged) << sol.message;
    EXPECT_LT(sol.residual, 1e-5);
    EXPECT_GT(sol.energy, 0.0);
    EXPECT_TRUE(verify_eigen(sol, op, opts.tol).passed);

    SolverOptions flipped = opts;
    flipped.seed_sign = -1.0;
    const auto mirror = solve_mountain_pass(op, 1.0, flipped);
    ASSERT_TRUE(mirror.converged);
    EXPECT_NEAR(mirror.energy, sol.energy, 1e-6 * sol.energy);

    const auto perturbed = [&] {
        EigenSolution p = sol;
        std::mt19937_64 rng(3);
        auto c = p.u.coefficients();
        std::normal_distribution<double> noise(0.0, 0.01);
        for (double& v : c) v *= 1.0 + noise(rng);
        p.u = DiscreteFunction(op.mesh_ptr(), c);
        return p;
    }();
    const auto clean = verify_eigen(sol, op, opts.tol);
    const auto noisy = verify_eigen(perturbed, op, opts.tol);
    EXPECT_FALSE(noisy.passed);
    EXPECT_GT(noisy.max_defect, 100.0 * clean.max_defect);
}

TEST(MountainPass, RefusesTheWrongRegime) {
    const NonlocalOperator sub(power_setup(16, 3.0, 0.5, 2.0));
    EXPECT_THROW(solve_mountain_pass(sub, 1.0), RegimeError);
    const NonlocalOperator flat(power_setup(16, 2.0, 0.5, 2.0));
    EXPECT_THROW(solve_mountain_pass(flat, 1.0), RegimeError);
}

TEST(MountainPass, MeshStabilityOfThePassEnergy) {
    const NonlocalOperator coarse(power_setup(32, 2.0, 0.5, 4.0)), fine(power_setup(64, 2.0, 0.5, 4.0));
    const auto a = solve_mountain_pass(coarse, 1.0), b = solve_mountain_pass(fine, 1.0);
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_LT(std::abs(a.energy - b.energy), 0.05 * b.energy);
}

TEST(Sublinear, ConvergesBelowLambdaStarWithNegativeEnergy) {
    const NonlocalOperator op(power_setup(32, 3.0, 0.5, 2.0));
    SolverOptions opts;
    opts.tol = 1e-7;
    const auto est = estimate_lambda_star(op, opts);
    EXPECT_GT(est.lambda_star, 0.0);
    EXPECT_LT(est.ball_radius, 1.0 / est.c1);
    opts.ball_radius = est.ball_radius;
    std::vector<double> energies;
    for (double f : {0.125, 0.5}) {
        const auto sol = solve_sublinear(op, f * est.lambda_star, opts);
        ASSERT_TRUE(sol.converged) << sol.message;
        EXPECT_LT(sol.energy, 0.0);
        EXPECT_LT(sol.residual, 1e-6);
        EXPECT_TRUE(verify_eigen(sol, op, opts.tol).passed);
        for (std::size_t k = 1; k < sol.trace.size(); ++k) EXPECT_LE(sol.trace[k].energy, sol.trace[k - 1].energy);
        energies.push_back(sol.energy);
    }
    EXPECT_GT(energies[0], energies[1]);
}

TEST(Sublinear, RefusesTheWrongRegime) {
    const NonlocalOperator op(power_setup(16, 2.0, 0.5, 4.0));
    EXPECT_THROW(solve_sublinear(op, 0.1), RegimeError);
    EXPECT_THROW(solve_sublinear(op, -1.0), DomainError);
}

TEST(VerifyEigen, RejectsTheZeroFunction) {
    const NonlocalOperator op(power_setup(16, 2.0, 0.5, 4.0));
    EigenSolution sol;
    sol.lambda = 1.0;
    sol.u = DiscreteFunction::zero(op.mesh_ptr());
    EXPECT_THROW(verify_eigen(sol, op, 1e-6), PreconditionError);
}
