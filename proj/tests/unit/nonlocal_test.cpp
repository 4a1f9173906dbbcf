#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fams;
using namespace fams::testing;

namespace {

NonlocalOperator power_operator(int cells, double p, double s, double q = 4.0, std::optional<QuadratureConfig> qc = std::nullopt) {
    return NonlocalOperator(power_setup(cells, p, s, q), qc);
}

double directional_fd(const std::function<double(const DiscreteFunction&)>& f, const DiscreteFunction& u, const DiscreteFunction& v,
                      double eps) {
    return (f(u + eps * v) - f(u - eps * v)) / (2.0 * eps);
}

} // namespace

TEST(HolderQuotient, HandValuesAndSymmetry) {
    const auto mesh = interval_mesh(4);
    const auto identity = DiscreteFunction::interpolate(mesh, [](const Point& x) { return x[0]; });
    // Interior nodal values of x are exact at 0.25 and 0.5.
    EXPECT_NEAR(holder_quotient(identity, {0.5, 0.0}, {0.25, 0.0}, 0.5), 0.5, 1e-15);
    EXPECT_EQ(holder_quotient(identity, {0.5, 0.0}, {0.25, 0.0}, 0.3), holder_quotient(identity, {0.25, 0.0}, {0.5, 0.0}, 0.3));
    EXPECT_EQ(holder_quotient(DiscreteFunction::zero(mesh), {0.1, 0.0}, {0.7, 0.0}, 0.5), 0.0);
    EXPECT_THROW(holder_quotient(identity, {0.3, 0.0}, {0.3, 0.0}, 0.5), DomainError);
}

TEST(Psi, ZeroFunctionHasZeroModularGradientAndNorms) {
    const auto op = power_operator(16, 2.0, 0.5);
    const auto zero = DiscreteFunction::zero(op.mesh_ptr());
    EXPECT_EQ(op.psi(zero), 0.0);
    EXPECT_EQ(op.tail_bound(zero), 0.0);
    EXPECT_EQ(op.energy(zero, 1.0), 0.0);
    for (double g : op.energy_gradient(zero, 1.0)) EXPECT_EQ(g, 0.0);
    const auto n = op.norms(zero);
    EXPECT_EQ(n.sum, 0.0);
    EXPECT_EQ(n.max, 0.0);
    EXPECT_EQ(n.luxemburg, 0.0);
}

TEST(Psi, PowerTwoMatchesBruteForceDoubleSum) {
    for (double s : {0.3, 0.5, 0.7}) {
        const auto op = power_operator(32, 2.0, s);
        const auto u = DiscreteFunction::bump(op.mesh_ptr());
        const double oracle = power2_psi_oracle(u, s, 4096, op.quadrature().radius());
        EXPECT_NEAR(op.psi(u), oracle, 0.01 * oracle) << "s = " << s;
        const double untruncated = power2_psi_oracle(u, s, 4096);
        EXPECT_LE(untruncated - op.psi(u), op.tail_bound(u) + 0.01 * oracle) << "s = " << s;
    }
}

TEST(Psi, ScalingBetweenIndexPowers) {
    AnisotropicSetup setup = planar_setup(4);
    const NonlocalOperator op(setup);
    std::mt19937_64 rng(12);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng);
    const double base = op.psi(u);
    for (double alpha : {1.5, 3.0, 10.0}) {
        const double scaled = op.psi(alpha * u);
        EXPECT_GE(scaled, std::pow(alpha, setup.lower_index_min()) * base * (1.0 - 1e-12));
        EXPECT_LE(scaled, std::pow(alpha, setup.upper_index_max()) * base * (1.0 + 1e-12));
    }
}

TEST(Psi, ReflectionInvarianceWithinQuadratureError) {
    const auto op = power_operator(24, 3.0, 0.4);
    std::mt19937_64 rng(13);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng);
    auto c = u.coefficients();
    std::reverse(c.begin(), c.end());
    const DiscreteFunction reflected(op.mesh_ptr(), c);
    EXPECT_NEAR(op.psi(reflected), op.psi(u), 5e-3 * op.psi(u));
}

TEST(Psi, BitIdenticalAcrossThreadCounts) {
    const NonlocalOperator op(planar_setup(6));
    std::mt19937_64 rng(14);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng);
    set_thread_count(1);
    const double one = op.psi(u);
    const auto g1 = op.psi_gradient(u);
    set_thread_count(4);
    const double four = op.psi(u);
    const auto g4 = op.psi_gradient(u);
    set_thread_count(0);
    EXPECT_EQ(one, four);
    EXPECT_EQ(g1, g4);
}

TEST(TailBound, DecaysWithRadiusAndCoversTruncation) {
    const auto op = power_operator(32, 2.0, 0.5);
    const auto u = DiscreteFunction::bump(op.mesh_ptr());
    const double r = op.quadrature().radius();
    // R >= 1, so the bound scales like R^{-s φ⁻}.
    EXPECT_NEAR(op.tail_bound(u, 2.0 * r) / op.tail_bound(u, r), std::pow(2.0, -0.5 * 2.0), 1e-12);
    EXPECT_THROW(op.tail_bound(u, 1.0), PreconditionError);
    QuadratureConfig wide;
    wide.tail_radius_factor = 4.0 * wide.tail_radius_factor;
    const auto far = power_operator(32, 2.0, 0.5, 4.0, wide);
    EXPECT_LE(std::abs(far.psi(u) - op.psi(u)), op.tail_bound(u));
    EXPECT_LT(op.tail_bound(u), 0.005 * op.psi(u));
}

TEST(Gradient, CentralDifferencesForModularAndEnergy) {
    std::vector<NonlocalOperator> ops;
    ops.push_back(power_operator(16, 3.0, 0.5, 2.0));
    AnisotropicSetup planar = planar_setup(4, 3.0);
    planar.kirchhoff = Kirchhoff::linear(1.0, 0.5);
    ops.emplace_back(planar);
    std::mt19937_64 rng(15);
    for (const auto& op : ops)
        for (int k = 0; k < 3; ++k) {
            const auto u = DiscreteFunction::random(op.mesh_ptr(), rng), v = DiscreteFunction::random(op.mesh_ptr(), rng);
            const double g = detail::dot(op.psi_gradient(u), v.coefficients());
            const double fd = directional_fd([&](const DiscreteFunction& w) { return op.psi(w); }, u, v, 1e-5);
            EXPECT_NEAR(g, fd, 1e-5 * std::abs(fd));
            const double ge = detail::dot(op.energy_gradient(u, 0.7), v.coefficients());
            const double fde = directional_fd([&](const DiscreteFunction& w) { return op.energy(w, 0.7); }, u, v, 1e-5);
            EXPECT_NEAR(ge, fde, 1e-5 * std::abs(fde));
        }
}

TEST(Gradient, PowerTwoIsASymmetricLinearMap) {
    const auto op = power_operator(16, 2.0, 0.5);
    const Eigen::MatrixXd A = gradient_matrix(op);
    EXPECT_LT((A - A.transpose()).norm(), 1e-12 * A.norm());
    std::mt19937_64 rng(16);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng);
    const Eigen::VectorXd ui = free_part(op.mesh(), u.coefficients());
    EXPECT_LT((A * ui - free_part(op.mesh(), op.psi_gradient(u))).norm(), 1e-12 * A.norm() * ui.norm());
    EXPECT_NEAR(0.5 * ui.dot(A * ui), op.psi(u), 1e-12 * op.psi(u));
}

TEST(Seminorm, HomogeneityAndModularConsistency) {
    const NonlocalOperator op(planar_setup(4));
    std::mt19937_64 rng(17);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng);
    for (int i = 0; i < 2; ++i) {
        const double n = op.seminorm(u, i);
        EXPECT_NEAR(op.seminorm(2.5 * u, i), 2.5 * n, 1e-7 * n);
        EXPECT_NEAR(op.psi_direction((1.0 / n) * u, i), 1.0, 1e-7);
        EXPECT_LE(op.seminorm(u, i, Region::OmegaOmega), n);
    }
}

TEST(Norms, OneDirectionCollapsesTheChain) {
    const auto op = power_operator(16, 2.5, 0.5);
    std::mt19937_64 rng(18);
    const auto n = op.norms(DiscreteFunction::random(op.mesh_ptr(), rng));
    EXPECT_EQ(n.sum, n.max);
    EXPECT_NEAR(n.luxemburg, n.sum, 1e-7 * n.sum);
}

TEST(Norms, ChainOnTheSquare) {
    const NonlocalOperator op(planar_setup(4));
    std::mt19937_64 rng(19);
    for (int k = 0; k < 5; ++k) {
        const auto n = op.norms(DiscreteFunction::random(op.mesh_ptr(), rng));
        EXPECT_LE(n.max, n.sum);
        EXPECT_LE(n.sum, 2.0 * n.max);
        EXPECT_LE(n.sum, 2.0 * n.luxemburg * (1.0 + 1e-7));
        EXPECT_LE(n.luxemburg, 2.0 * n.sum);
    }
}

TEST(Monotonicity, EqualArgumentsAndPowerTwoIdentity) {
    const auto op = power_operator(16, 2.0, 0.5);
    std::mt19937_64 rng(20);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng), v = DiscreteFunction::random(op.mesh_ptr(), rng);
    const auto same = op.monotonicity_terms(u, u, 0);
    EXPECT_EQ(same.lhs, 0.0);
    EXPECT_EQ(same.rhs, 0.0);
    const auto t = op.monotonicity_terms(u, v, 0);
    EXPECT_NEAR(t.lhs, 2.0 * t.rhs, 1e-12 * t.lhs);
    const auto c = op.clarkson_terms(u, v, 0);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-12 * c.lhs);
}

TEST(Setup, DirectionCountMustMatchTheDimension) {
    AnisotropicSetup setup = power_setup(8, 2.0, 0.5, 4.0);
    setup.directions.push_back(setup.directions.front());
    EXPECT_THROW(NonlocalOperator{setup}, ConsistencyError);
    setup.directions = {Direction{MusielakFamily::constant_power(2.0), 1.0}};
    EXPECT_THROW(NonlocalOperator{setup}, SetupError);
    QuadratureConfig qc;
    qc.near_levels = 1;
    EXPECT_THROW(NonlocalOperator(power_setup(8, 2.0, 0.5, 4.0), qc), SetupError);
    qc = QuadratureConfig{};
    qc.tail_radius_factor = 1.0;
    EXPECT_THROW(NonlocalOperator(power_setup(8, 2.0, 0.5, 4.0), qc), SetupError);
}

TEST(Kirchhoff, DefaultsSatisfyTheirInvariants) {
    const auto one = Kirchhoff::constant();
    EXPECT_EQ(one.M(5.0), 1.0);
    EXPECT_EQ(one.M_hat(5.0), 5.0);
    EXPECT_TRUE(one.growth_bound_holds());
    const auto lin = Kirchhoff::linear(1.0, 0.5);
    EXPECT_EQ(lin.theta(), 2.0);
    EXPECT_NEAR(lin.M_hat(2.0), 2.0 + 1.0, 1e-15);
    EXPECT_FALSE(lin.growth_bound_holds());
    EXPECT_THROW(Kirchhoff::linear(1.0, 0.5, 1.5), SetupError);
    EXPECT_THROW(Kirchhoff::constant(0.0), SetupError);
    EXPECT_THROW(Kirchhoff::linear(1.0, -1.0), SetupError);
}

TEST(Energy, ConstantKirchhoffReducesToModularMinusLebesgue) {
    const auto op = power_operator(16, 2.0, 0.5, 4.0);
    std::mt19937_64 rng(21);
    const auto u = DiscreteFunction::random(op.mesh_ptr(), rng);
    EXPECT_NEAR(op.energy(u, 1.3), op.psi(u) - 1.3 * op.lebesgue_term(u), 1e-14 * op.psi(u));
    EXPECT_NEAR(op.lebesgue_term(u), 0.25 * exact_even_power_integral(u, 4), 1e-14);
}

TEST(Energy, SublinearSeedHasNegativeEnergyForSmallScale) {
    const auto op = power_operator(16, 3.0, 0.5, 2.0);
    const auto bump = DiscreteFunction::bump(op.mesh_ptr());
    bool negative = false;
    for (int k = 1; k <= 20 && !negative; ++k) negative = op.energy(std::ldexp(1.0, -k) * bump, 0.1) < 0.0;
    EXPECT_TRUE(negative);
}

TEST(Quadrature, MeshDoublingChangesTheBumpModularLittle) {
    const auto coarse = power_operator(16, 2.0, 0.5);
    const auto fine = power_operator(32, 2.0, 0.5);
    const double a = coarse.psi(DiscreteFunction::bump(coarse.mesh_ptr()));
    const double b = fine.psi(DiscreteFunction::bump(fine.mesh_ptr()));
    EXPECT_LT(std::abs(a - b), 0.02 * b);
}
