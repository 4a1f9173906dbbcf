#include "fixtures.hpp"

#include <fams/harness/suites.hpp>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fams;
using namespace fams::testing;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit; ///< seconds; zero means no limit
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string suite_summary(const SuiteReport& r) {
    std::string s = r.name + " cases=" + std::to_string(r.cases) + " failures=" + std::to_string(r.failures.size());
    for (const auto& [k, v] : r.observed) s += " " + k + "=" + fmt(v);
    if (!r.failures.empty()) {
        const auto& f = r.failures.front();
        s += " first failure: case " + std::to_string(f.case_index) + " [" + f.inputs + "] " + fmt(f.lhs) + " > " + fmt(f.rhs) + " + " + fmt(f.slack);
    }
    return s;
}

// p(x, y) = 2 + (x + y) / 2 on [0, 1], symmetric with range [2, 3].
MusielakFamily affine_exponent_family() {
    return MusielakFamily::variable_exponent([](const Point& x, const Point& y) { return 2.0 + 0.5 * (x[0] + y[0]); }, 2.0, 3.0);
}

/// The planar configuration: two directions, affine exponent and a linear Kirchhoff coefficient.
AnisotropicSetup rich_planar_setup(int cells) {
    AnisotropicSetup setup = planar_setup(cells);
    setup.exponent = ExponentField::affine(setup.mesh->box(), 4.5, {0.5, 0.0});
    setup.kirchhoff = Kirchhoff::linear(1.0, 0.5, 2.0);
    return setup;
}

Outcome luxemburg_exactness() {
    std::mt19937_64 rng(101);
    const auto line = interval_mesh(32);
    const auto square = square_mesh(8);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto u = DiscreteFunction::random(k % 2 ? line : square, rng);
        for (int p : {2, 4}) {
            const double integral = exact_even_power_integral(u, p);
            const double lebesgue = std::pow(integral, 1.0 / p);
            const double musielak = std::pow(integral / p, 1.0 / p);
            worst = std::max(worst, std::abs(lebesgue_norm(u, ExponentField::constant(p)) - lebesgue) / lebesgue);
            worst = std::max(worst, std::abs(musielak_norm(u, MusielakFamily::constant_power(p)) - musielak) / musielak);
        }
    }
    return {worst < 1e-8, "100 functions, p in {2, 4}, max relative error " + fmt(worst)};
}

Outcome index_inequalities() {
    const Box unit = Box::interval(0.0, 1.0);
    bool ok = true;
    std::string detail;
    const std::vector<MusielakFamily> families = {MusielakFamily::constant_power(2.0), MusielakFamily::constant_power(3.0),
                                                  affine_exponent_family(), MusielakFamily::log_perturbed(2.0),
                                                  MusielakFamily::log_perturbed(2.5)};
    for (std::size_t k = 0; k < families.size(); ++k) {
        const auto r = lemma22_suite(families[k], unit, 200 + k, 10000, 1e-9);
        ok = ok && r.passed() && r.cases == 10000;
        if (families[k].kind() == FamilyKind::ConstantPower) ok = ok && r.observed.count("equality_gap") && r.observed.at("equality_gap") < 1e-12;
        detail += (k ? "; " : "") + suite_summary(r);
    }
    return {ok, detail};
}

const NonlocalOperator& planar16() {
    static const NonlocalOperator op(planar_setup(16));
    return op;
}

Outcome norm_chain() {
    const auto r = run_suite("norm_equiv", planar16(), 303, 100);
    return {r.passed() && r.cases == 100, "N=2, 16x16 mesh: " + suite_summary(r)};
}

Outcome modular_norm_relations() {
    const auto r = run_suite("modular_norm", planar16(), 404, 100);
    return {r.passed() && r.cases == 100, "N=2, 16x16 mesh: " + suite_summary(r)};
}

Outcome gradient_fidelity() {
    const NonlocalOperator planar(rich_planar_setup(8));
    const NonlocalOperator line(power_setup(32, 3.0, 0.5, 2.0));
    const auto a = run_suite("gradient_fd", planar, 505, 20);
    const auto b = run_suite("gradient_fd", line, 506, 20);
    return {a.passed() && b.passed() && a.cases == 20 && b.cases == 20, "planar " + suite_summary(a) + "; line " + suite_summary(b)};
}

Outcome dense_oracle() {
    const NonlocalOperator op(power_setup(32, 2.0, 0.5, 2.0));
    const auto& mesh = op.mesh_ptr();
    const Eigen::MatrixXd A = gradient_matrix(op);
    const Eigen::MatrixXd B = mass_matrix(*mesh);
    const double asym = (A - A.transpose()).norm() / A.norm();

    std::mt19937_64 rng(606);
    double linear_defect = 0.0, mass_defect = 0.0;
    for (int k = 0; k < 5; ++k) {
        const auto u = DiscreteFunction::random(mesh, rng);
        const Eigen::VectorXd c = free_part(*mesh, u.coefficients());
        linear_defect = std::max(linear_defect, (A * c - free_part(*mesh, op.psi_gradient(u))).norm() / (A * c).norm());
        mass_defect = std::max(mass_defect, (B * c - free_part(*mesh, op.lebesgue_gradient(u))).norm() / (B * c).norm());
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(A, B);
    const double mu1 = pencil.eigenvalues()[0];
    const Eigen::VectorXd v1 = pencil.eigenvectors().col(0);
    auto rayleigh = [&](const Eigen::VectorXd& c) { return c.dot(A * c) / c.dot(B * c); };
    auto angle = [&](const Eigen::VectorXd& c) {
        const double cosine = std::abs(c.dot(B * v1)) / std::sqrt(c.dot(B * c) * v1.dot(B * v1));
        return std::acos(std::min(1.0, cosine)) * 180.0 / std::numbers::pi;
    };

    // With q ≡ 2 the energy is quadratic on every ray; λ just above the Rayleigh quotient of the seed makes the whole
    // seed ray negative, and the path step then descends on the sphere toward the first mode.
    const Eigen::VectorXd seed = free_part(*mesh, DiscreteFunction::bump(mesh).coefficients());
    const double lambda = rayleigh(seed) * (1.0 + 1e-3);
    SolverOptions opts;
    opts.override_regime = true;
    opts.max_iterations = 3000;
    const auto sol = solve_mountain_pass(op, lambda, opts);
    const Eigen::VectorXd u = free_part(*mesh, sol.u.coefficients());
    const double deg = angle(u), rel = std::abs(rayleigh(u) - mu1) / mu1;

    const bool ok = asym < 1e-12 && linear_defect < 1e-12 && mass_defect < 1e-12 && deg < 5.0 && rel < 0.02;
    return {ok, "asymmetry " + fmt(asym) + ", |grad - A u| " + fmt(linear_defect) + ", |I' - B u| " + fmt(mass_defect) + ", mu1 " + fmt(mu1) +
                    ", solver angle " + fmt(deg) + " deg (seed " + fmt(angle(seed)) + " deg), Rayleigh error " + fmt(rel) + ", sweeps " +
                    std::to_string(sol.iterations) + " (" + sol.message + ")"};
}

Outcome superlinear_benchmark() {
    const NonlocalOperator op(power_setup(32, 2.0, 0.5, 4.0));
    SolverOptions opts;
    bool ok = true;
    std::string detail;
    for (double lambda : {0.5, 1.0, 2.0}) {
        const auto sol = solve_mountain_pass(op, lambda, opts);
        const auto check = verify_eigen(sol, op, opts.tol);
        ok = ok && sol.converged && sol.residual < 1e-5 && sol.energy > 0.0 && check.passed;
        detail += (detail.empty() ? "" : "; ") + std::string("λ=") + fmt(lambda) + " energy " + fmt(sol.energy) + " residual " + fmt(sol.residual) +
                  " defect " + fmt(check.max_defect) + " (" + sol.message + ")";
    }
    return {ok, detail};
}

Outcome sublinear_benchmark() {
    const NonlocalOperator op(power_setup(32, 3.0, 0.5, 2.0));
    SolverOptions opts;
    opts.tol = 1e-7;
    const auto est = estimate_lambda_star(op, opts);
    opts.ball_radius = est.ball_radius;
    bool ok = true;
    std::string detail = "λ*=" + fmt(est.lambda_star) + " c1=" + fmt(est.c1) + " ρ=" + fmt(est.ball_radius);
    for (double f : {0.125, 0.25, 0.5}) {
        const auto sol = solve_sublinear(op, f * est.lambda_star, opts);
        ok = ok && sol.converged && sol.energy < 0.0 && sol.residual < 1e-6;
        detail += "; λ*·" + fmt(f) + " energy " + fmt(sol.energy) + " residual " + fmt(sol.residual) + " (" + sol.message + ")";
    }
    return {ok, detail};
}

Outcome monotonicity_and_clarkson() {
    const NonlocalOperator planar(planar_setup(8));
    const NonlocalOperator line(power_setup(32, 3.0, 0.4, 2.0));
    bool ok = true;
    std::string detail;
    for (const auto* op : {&planar, &line})
        for (const char* name : {"monotonicity", "clarkson"}) {
            const auto r = run_suite(name, *op, 909, 100);
            ok = ok && r.passed() && r.cases == 100 && r.observed.at("certified_directions") > 0;
            detail += (detail.empty() ? "" : "; ") + std::string(op == &planar ? "planar " : "line ") + suite_summary(r);
        }
    return {ok, detail};
}

Outcome quadrature_certification() {
    const NonlocalOperator op(power_setup(32, 2.0, 0.5, 4.0));
    const auto u = DiscreteFunction::bump(op.mesh_ptr());
    const double psi = op.psi(u);
    const double oracle = power2_psi_oracle(u, 0.5, 4096, op.quadrature().radius());
    const double oracle_error = std::abs(psi - oracle) / oracle;
    const double tail = op.tail_bound(u) / psi;
    const NonlocalOperator fine(power_setup(64, 2.0, 0.5, 4.0));
    const double refined = fine.psi(DiscreteFunction::bump(fine.mesh_ptr()));
    const double change = std::abs(refined - psi) / refined;
    return {oracle_error < 0.01 && tail < 0.005 && change < 0.02, "Ψ " + fmt(psi) + " vs double sum " + fmt(oracle) + " (relative " +
                                                                       fmt(oracle_error) + "), tail bound / Ψ " + fmt(tail) +
                                                                       ", 64-cell Ψ " + fmt(refined) + " (change " + fmt(change) + ")"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Luxemburg exactness", 10.0, luxemburg_exactness},
        {2, "index scaling inequalities", 0.0, index_inequalities},
        {3, "anisotropic norm chain", 300.0, norm_chain},
        {4, "modular-norm relations", 0.0, modular_norm_relations},
        {5, "gradient fidelity", 0.0, gradient_fidelity},
        {6, "dense oracle equivalence", 120.0, dense_oracle},
        {7, "superlinear benchmark", 600.0, superlinear_benchmark},
        {8, "sublinear benchmark", 600.0, sublinear_benchmark},
        {9, "monotonicity and Clarkson suites", 0.0, monotonicity_and_clarkson},
        {10, "quadrature certification", 0.0, quadrature_certification},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.time_limit == 0.0 || seconds < c.time_limit;
        const bool passed = out.passed && in_time;
        failed += passed ? 0 : 1;
        std::printf("%s [%d] %s (%.1f s%s): %s\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                    c.time_limit > 0.0 ? (in_time ? ", within limit" : ", over time limit") : "", out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
