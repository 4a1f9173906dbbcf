#include <fams/fams.hpp>
#include <fams/io/config.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum Exit { ok = 0, suite_failure = 1, config_error = 2, regime_error = 3, not_converged = 4 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool override_regime = false;
    std::string function = "bump";
    std::uint64_t function_seed = 0;
};

fams::RunConfig load(const Options& o) {
    auto cfg = fams::load_run_config(o.config);
    if (o.seed) cfg.seed = cfg.solver.seed = *o.seed;
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.override_regime) cfg.solver.override_regime = true;
    return cfg;
}

json regime_json(const fams::RegimeClassification& c) {
    return {{"tag", fams::to_string(c.regime)},
            {"phi_plus_max", c.upper_index_max},
            {"phi_minus_min", c.lower_index_min},
            {"q_minus", c.q_minus},
            {"q_plus", c.q_plus},
            {"theta", c.theta},
            {"reason", c.reason}};
}

json suite_json(const fams::SuiteReport& r) {
    json failures = json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"case", f.case_index}, {"inputs", f.inputs}, {"lhs", f.lhs}, {"rhs", f.rhs}, {"slack", f.slack}});
    return {{"name", r.name}, {"cases", r.cases}, {"passed", r.passed()}, {"seconds", r.seconds}, {"observed", r.observed}, {"failures", failures}};
}

json tail_json(const fams::NonlocalOperator& op) {
    const auto r = op.psi_report(fams::DiscreteFunction::bump(op.mesh_ptr()));
    return {{"test_function", "bump"}, {"psi", r.value}, {"tail_bound", r.tail_bound}, {"radius", op.quadrature().radius()},
            {"accuracy_warning", r.accuracy_warning}};
}

json base_report(const std::string& command, const fams::RunConfig& cfg) {
    return {{"schema_version", fams::report_schema_version}, {"command", command}, {"config", cfg.source}, {"seed", cfg.seed}};
}

void write_report(const fams::RunConfig& cfg, const std::string& name, const json& report) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream(path) << report.dump(2) << "\n";
    std::cout << "report: " << path.string() << "\n";
}

int cmd_check(const Options& o) {
    const auto cfg = load(o);
    const fams::NonlocalOperator op(cfg.setup, cfg.quadrature);
    auto names = cfg.check.suites.empty() ? fams::suite_names() : cfg.check.suites;
    json report = base_report("check", cfg);
    report["regime"] = regime_json(fams::classify_regime(cfg.setup));
    report["suites"] = json::array();
    bool all = true;
    for (const auto& name : names) {
        const int cases = name == "lemma22" ? cfg.check.lemma22_cases : cfg.check.cases;
        const auto r = fams::run_suite(name, op, cfg.seed, cases);
        all = all && r.passed();
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases, " << r.failures.size() << " failures, "
                  << r.seconds << " s)\n";
        report["suites"].push_back(suite_json(r));
    }
    report["tail"] = tail_json(op);
    report["passed"] = all;
    write_report(cfg, "check.json", report);
    return all ? ok : suite_failure;
}

int cmd_solve(const Options& o, bool sweep) {
    const auto cfg = load(o);
    const fams::NonlocalOperator op(cfg.setup, cfg.quadrature);
    const auto regime = fams::classify_regime(cfg.setup);
    json report = base_report(sweep ? "sweep" : "solve", cfg);
    json rj = regime_json(regime);

    const bool sublinear = regime.regime == fams::Regime::Sublinear ||
                           (regime.regime == fams::Regime::Indeterminate && cfg.solver.override_regime && !cfg.lambda.star_fractions.empty());
    if (regime.regime == fams::Regime::Indeterminate && !cfg.solver.override_regime) {
        std::cerr << "regime is indeterminate; neither hypothesis holds:\n"
                  << "  superlinear requires max φ⁺ < q⁻ θ and max φ⁺ < q⁻: " << regime.upper_index_max << " < " << regime.q_minus * regime.theta
                  << " and " << regime.upper_index_max << " < " << regime.q_minus << "\n"
                  << "  sublinear requires q⁻ < min φ⁻: " << regime.q_minus << " < " << regime.lower_index_min << "\n"
                  << "pass --override-regime to solve anyway\n";
        return regime_error;
    }

    std::vector<double> lambdas = cfg.lambda.values;
    auto opts = cfg.solver;
    if (sublinear) {
        const auto est = fams::estimate_lambda_star(op, opts);
        const double c1 = est.c1, rho = est.ball_radius, star = est.lambda_star;
        opts.ball_radius = rho;
        for (double f : cfg.lambda.star_fractions) lambdas.push_back(f * star);
        rj["lambda_star"] = star;
        rj["c1_estimate"] = c1;
        rj["ball_radius"] = rho;
        std::cout << "λ* = " << star << " (estimated c1 = " << c1 << ", ρ = " << rho << ")\n"
                  << "note: c1 is estimated from sampled functions and bounds the optimal constant from one side only, "
                     "so λ* is an upper estimate\n";
    } else if (!cfg.lambda.star_fractions.empty()) {
        std::cerr << "solver.lambda_star_fractions: λ* is only defined in the sublinear regime\n";
        return config_error;
    }
    if (lambdas.empty()) {
        std::cerr << "solver.lambda: no λ given (lambda, lambdas or lambda_star_fractions)\n";
        return config_error;
    }
    if (sweep && lambdas.size() < 2) {
        std::cerr << "solver.lambdas: a sweep needs at least two values\n";
        return config_error;
    }
    report["regime"] = rj;

    fs::create_directories(cfg.output_dir);
    report["solutions"] = json::array();
    bool all = true;
    std::vector<double> energies;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const auto sol = sublinear ? fams::solve_sublinear(op, lambdas[k], opts) : fams::solve_mountain_pass(op, lambdas[k], opts);
        const auto check = sol.u.is_zero() ? fams::EigenVerification{} : fams::verify_eigen(sol, op, opts.tol, opts.seed);
        const fs::path trace = fs::path(cfg.output_dir) / ("trace_" + std::to_string(k) + ".csv");
        std::ofstream csv(trace);
        csv << "iteration,energy,residual\n";
        csv.precision(17);
        for (const auto& row : sol.trace) csv << row.iteration << "," << row.energy << "," << row.residual << "\n";
        all = all && sol.converged && check.passed;
        energies.push_back(sol.energy);
        std::cout << (sol.converged ? "converged " : "NOT CONVERGED ") << "λ = " << sol.lambda << ": energy " << sol.energy << ", residual "
                  << sol.residual << ", iterations " << sol.iterations << ", weak-form defect " << check.max_defect << " ("
                  << sol.message << ")\n";
        report["solutions"].push_back({{"lambda", sol.lambda},
                                       {"energy", sol.energy},
                                       {"residual", sol.residual},
                                       {"relative_residual", sol.relative_residual},
                                       {"iterations", sol.iterations},
                                       {"converged", sol.converged},
                                       {"message", sol.message},
                                       {"ball_radius", sol.ball_radius},
                                       {"coefficients", sol.u.coefficients()},
                                       {"verification", {{"max_defect", check.max_defect}, {"tolerance", check.tolerance}, {"passed", check.passed}}},
                                       {"trace_csv", trace.string()}});
    }
    if (sweep) {
        bool inc = true, dec = true;
        for (std::size_t k = 1; k < energies.size(); ++k) {
            inc = inc && energies[k] >= energies[k - 1];
            dec = dec && energies[k] <= energies[k - 1];
        }
        report["energies_monotone"] = inc || dec;
    }
    report["tail"] = tail_json(op);
    report["converged"] = all;
    write_report(cfg, sweep ? "sweep.json" : "solve.json", report);
    return all ? ok : not_converged;
}

int cmd_norms(const Options& o) {
    const auto cfg = load(o);
    const fams::NonlocalOperator op(cfg.setup, cfg.quadrature);
    const auto& mesh = op.mesh_ptr();
    fams::DiscreteFunction u(mesh);
    if (o.function == "bump") u = fams::DiscreteFunction::bump(mesh);
    else if (o.function == "hat") u = fams::DiscreteFunction::hat(mesh);
    else if (o.function == "random") {
        std::mt19937_64 rng(o.function_seed);
        u = fams::DiscreteFunction::random(mesh, rng);
    } else if (o.function != "zero") {
        std::cerr << "--function: expected bump, hat, random or zero\n";
        return config_error;
    }
    const auto n = op.norms(u);
    const double N = op.direction_count();
    const double slack = std::min({n.sum - n.max, N * n.max - n.sum, N * n.luxemburg - n.sum, N * n.sum - n.luxemburg});
    const auto pr = op.psi_report(u);
    std::cout.precision(12);
    std::cout << "function " << o.function << "\n";
    for (std::size_t i = 0; i < n.seminorms.size(); ++i) std::cout << "  [u]_" << i + 1 << " = " << n.seminorms[i] << "\n";
    std::cout << "  sum  = " << n.sum << "\n  max  = " << n.max << "\n  luxemburg = " << n.luxemburg << "\n  psi  = " << pr.value
              << "\n  chain slack = " << slack << "\n  tail bound = " << pr.tail_bound << "\n";
    json report = base_report("norms", cfg);
    report["function"] = {{"name", o.function}, {"seed", o.function_seed}};
    report["norms"] = {{"seminorms", n.seminorms}, {"sum", n.sum}, {"max", n.max}, {"luxemburg", n.luxemburg}, {"psi", pr.value},
                       {"chain_slack", slack}};
    report["tail"] = {{"tail_bound", pr.tail_bound}, {"radius", op.quadrature().radius()}, {"accuracy_warning", pr.accuracy_warning}};
    write_report(cfg, "norms.json", report);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic fractional Musielak-Sobolev eigenvalue toolkit"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration")->required();
        sub->add_option("--out", o.out, "output directory (overrides output.dir)");
        sub->add_option("--seed", o.seed, "random seed (overrides the config)");
        sub->add_option("--threads", o.threads, "worker threads (FAMS_THREADS caps this)")->check(CLI::NonNegativeNumber);
    };
    auto* check = app.add_subcommand("check", "run every verification suite");
    auto* solve = app.add_subcommand("solve", "classify the regime and compute eigenpairs");
    auto* sweep = app.add_subcommand("sweep", "solve over a list of λ values");
    auto* norms = app.add_subcommand("norms", "print the anisotropic norms of a test function");
    for (auto* s : {check, solve, sweep, norms}) common(s);
    for (auto* s : {solve, sweep}) s->add_flag("--override-regime", o.override_regime, "solve even when the regime does not match");
    norms->add_option("--function", o.function, "bump, hat, random or zero");
    norms->add_option("--function-seed", o.function_seed, "seed of the random test function");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }
    if (o.threads > 0) fams::set_thread_count(o.threads);

    try {
        if (*check) return cmd_check(o);
        if (*solve) return cmd_solve(o, false);
        if (*sweep) return cmd_solve(o, true);
        return cmd_norms(o);
    } catch (const fams::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const fams::RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return regime_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return suite_failure;
    }
}
