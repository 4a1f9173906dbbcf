#pragma once

#include <fams/core/errors.hpp>
#include <fams/eigen/solution.hpp>
#include <fams/nonlocal/setup.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fams {

inline constexpr int report_schema_version = 1;

/// Which λ values a solve or sweep uses: explicit values, or fractions of λ* in the sublinear regime.
struct LambdaSpec {
    std::vector<double> values;
    std::vector<double> star_fractions;
};

struct CheckSpec {
    int cases = 20;
    int lemma22_cases = 10000;
    std::vector<std::string> suites; ///< empty: every suite
};

struct RunConfig {
    nlohmann::json source;
    AnisotropicSetup setup;
    QuadratureConfig quadrature;
    SolverOptions solver;
    LambdaSpec lambda;
    CheckSpec check;
    std::string output_dir = "fams-out";
    std::uint64_t seed = 0;
};

namespace detail {

class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }
    bool has(const std::string& name) const { return j_.contains(name); }

    const nlohmann::json& raw(const std::string& name) const {
        seen_.insert(name);
        if (!j_.contains(name)) throw ConfigError(key(name), "missing required entry");
        return j_.at(name);
    }

    ConfigReader object(const std::string& name) const { return ConfigReader(raw(name), key(name)); }

    double number(const std::string& name) const {
        const auto& v = raw(name);
        if (!v.is_number()) throw ConfigError(key(name), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& name, double fallback) const { return has(name) ? number(name) : fallback; }

    int integer(const std::string& name) const {
        const auto& v = raw(name);
        if (!v.is_number_integer()) throw ConfigError(key(name), "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& name, int fallback) const { return has(name) ? integer(name) : fallback; }

    bool boolean(const std::string& name, bool fallback) const {
        if (!has(name)) return fallback;
        const auto& v = raw(name);
        if (!v.is_boolean()) throw ConfigError(key(name), "expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& name) const {
        const auto& v = raw(name);
        if (!v.is_string()) throw ConfigError(key(name), "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& name, const std::string& fallback) const { return has(name) ? text(name) : fallback; }

    std::vector<double> numbers(const std::string& name) const {
        const auto& v = raw(name);
        if (!v.is_array()) throw ConfigError(key(name), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(key(name) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    /// Rejects entries that were never read.
    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(key(k), "unknown entry");
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

template <class F>
auto at_key(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

inline MusielakFamily parse_family(const ConfigReader& r, const Box& box) {
    const std::string kind = r.text("kind");
    if (kind == "constant_power") {
        const double p = r.number("p");
        r.finish();
        return at_key(r.key("p"), [&] { return MusielakFamily::constant_power(p); });
    }
    if (kind == "log_perturbed") {
        const double p = r.number("p");
        const double shift = r.number("shift", std::numbers::e);
        r.finish();
        return at_key(r.key("p"), [&] { return MusielakFamily::log_perturbed(p, shift); });
    }
    if (kind == "variable_exponent") {
        const double lo = r.number("p_minus"), hi = r.number("p_plus");
        r.finish();
        if (!(hi >= lo)) throw ConfigError(r.key("p_plus"), "p_plus must not be below p_minus");
        const Box b = box;
        auto p = [b, lo, hi](const Point& x, const Point& y) {
            const double xi = 0.5 * ((x[0] - b.lo[0]) + (y[0] - b.lo[0])) / b.extent(0);
            return lo + (hi - lo) * std::clamp(xi, 0.0, 1.0);
        };
        return at_key(r.key("p_minus"), [&] { return MusielakFamily::variable_exponent(p, lo, hi); });
    }
    throw ConfigError(r.key("kind"), "unknown family kind '" + kind + "' (constant_power, variable_exponent, log_perturbed)");
}

} // namespace detail

/// Builds a validated RunConfig from JSON. Every failure is a ConfigError naming the offending key.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    using detail::at_key;
    RunConfig cfg;
    cfg.source = j;
    const detail::ConfigReader root(j, "");

    const int dim = root.integer("dimension");
    if (dim != 1 && dim != 2) throw ConfigError("dimension", "must be 1 or 2");

    const auto dom = root.object("domain");
    const auto lo = dom.numbers("lo"), hi = dom.numbers("hi");
    dom.finish();
    if (static_cast<int>(lo.size()) != dim) throw ConfigError("domain.lo", "needs one entry per dimension");
    if (static_cast<int>(hi.size()) != dim) throw ConfigError("domain.hi", "needs one entry per dimension");
    const Box box = at_key("domain", [&] {
        Box b = dim == 1 ? Box::interval(lo[0], hi[0]) : Box::rectangle(lo[0], hi[0], lo[1], hi[1]);
        b.validate();
        return b;
    });

    const int cells = root.integer("cells");
    if (cells < 2) throw ConfigError("cells", "at least two cells per axis are required");

    const auto& dirs = root.raw("directions");
    if (!dirs.is_array()) throw ConfigError("directions", "expected an array");
    if (static_cast<int>(dirs.size()) != dim) throw ConfigError("directions", "needs exactly one entry per dimension");
    std::vector<Direction> directions;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const std::string key = "directions[" + std::to_string(i) + "]";
        const detail::ConfigReader d(dirs[i], key);
        Direction dir{detail::parse_family(d.object("family"), box), d.number("order")};
        d.finish();
        if (!(dir.order > 0.0 && dir.order < 1.0)) throw ConfigError(key + ".order", "fractional order must lie in (0, 1)");
        directions.push_back(std::move(dir));
    }

    auto mesh = std::make_shared<const Mesh>(at_key("cells", [&] { return Mesh::uniform(box, {cells, dim == 2 ? cells : 1}); }));

    const auto ex = root.object("exponent");
    const std::string ekind = ex.text("kind");
    ExponentField q = ExponentField::constant(2.0);
    if (ekind == "constant") {
        const double v = ex.number("q");
        q = at_key("exponent.q", [&] { return ExponentField::constant(v); });
    } else if (ekind == "affine") {
        const double base = ex.number("base");
        const auto slope = ex.numbers("slope");
        if (static_cast<int>(slope.size()) != dim) throw ConfigError("exponent.slope", "needs one entry per dimension");
        q = at_key("exponent", [&] { return ExponentField::affine(box, base, {slope[0], dim == 2 ? slope[1] : 0.0}); });
    } else if (ekind == "nodal") {
        const auto values = ex.numbers("values");
        q = at_key("exponent.values", [&] { return ExponentField::nodal(mesh, values); });
    } else {
        throw ConfigError("exponent.kind", "unknown exponent kind '" + ekind + "' (constant, affine, nodal)");
    }
    ex.finish();

    Kirchhoff kirchhoff = Kirchhoff::constant(1.0);
    if (root.has("kirchhoff")) {
        const auto k = root.object("kirchhoff");
        const std::string kkind = k.text("kind");
        if (kkind == "constant") {
            const double m0 = k.number("m0", 1.0);
            kirchhoff = at_key("kirchhoff.m0", [&] { return Kirchhoff::constant(m0); });
        } else if (kkind == "linear") {
            const double m0 = k.number("m0"), b = k.number("b"), theta = k.number("theta", 2.0);
            kirchhoff = at_key("kirchhoff", [&] { return Kirchhoff::linear(m0, b, theta); });
        } else {
            throw ConfigError("kirchhoff.kind", "unknown Kirchhoff kind '" + kkind + "' (constant, linear)");
        }
        k.finish();
    }

    cfg.setup = AnisotropicSetup{mesh, std::move(directions), q, kirchhoff};
    at_key("directions", [&] { cfg.setup.validate(); return 0; });

    cfg.quadrature = QuadratureConfig::defaults_for(dim);
    if (root.has("quadrature")) {
        const auto r = root.object("quadrature");
        auto& qc = cfg.quadrature;
        qc.gauss_order = r.integer("gauss_order", qc.gauss_order);
        qc.near_levels = r.integer("near_levels", qc.near_levels);
        qc.tail_radius_factor = r.number("tail_radius_factor", qc.tail_radius_factor);
        qc.far_ratio = r.number("far_ratio", qc.far_ratio);
        qc.polar_order = r.integer("polar_order", qc.polar_order);
        const std::string sum = r.text("summation", std::string(to_string(qc.summation)));
        if (sum == "compensated") qc.summation = Summation::Compensated;
        else if (sum == "pairwise") qc.summation = Summation::Pairwise;
        else throw ConfigError("quadrature.summation", "expected 'compensated' or 'pairwise'");
        r.finish();
        at_key("quadrature", [&] { qc.validate(); return 0; });
    }

    if (root.has("solver")) {
        const auto r = root.object("solver");
        auto& s = cfg.solver;
        s.tol = r.number("tol", s.tol);
        s.relative_tol = r.number("relative_tol", s.relative_tol);
        s.max_iterations = r.integer("max_iterations", s.max_iterations);
        s.path_points = r.integer("path_points", s.path_points);
        s.stagnation_sweeps = r.integer("stagnation_sweeps", s.stagnation_sweeps);
        s.embedding_samples = r.integer("embedding_samples", s.embedding_samples);
        s.override_regime = r.boolean("override_regime", false);
        if (r.has("ball_radius")) s.ball_radius = r.number("ball_radius");
        if (r.has("lambda")) cfg.lambda.values = {r.number("lambda")};
        if (r.has("lambdas")) cfg.lambda.values = r.numbers("lambdas");
        if (r.has("lambda_star_fractions")) cfg.lambda.star_fractions = r.numbers("lambda_star_fractions");
        r.finish();
        if (!(s.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
        if (!(s.relative_tol > 0.0)) throw ConfigError("solver.relative_tol", "must be positive");
        if (s.max_iterations < 1) throw ConfigError("solver.max_iterations", "must be positive");
        if (s.path_points < 3) throw ConfigError("solver.path_points", "at least three points are required");
        if (s.embedding_samples < 32) throw ConfigError("solver.embedding_samples", "at least 32 samples are required");
        if (s.ball_radius && !(*s.ball_radius > 0.0)) throw ConfigError("solver.ball_radius", "must be positive");
        for (double l : cfg.lambda.values)
            if (!(l > 0.0)) throw ConfigError("solver.lambdas", "every λ must be positive");
        for (double f : cfg.lambda.star_fractions)
            if (!(f > 0.0)) throw ConfigError("solver.lambda_star_fractions", "every fraction must be positive");
    }

    if (root.has("check")) {
        const auto r = root.object("check");
        cfg.check.cases = r.integer("cases", cfg.check.cases);
        cfg.check.lemma22_cases = r.integer("lemma22_cases", cfg.check.lemma22_cases);
        if (r.has("suites")) {
            const auto& s = r.raw("suites");
            if (!s.is_array()) throw ConfigError("check.suites", "expected an array of suite names");
            for (const auto& v : s) {
                if (!v.is_string()) throw ConfigError("check.suites", "expected an array of suite names");
                cfg.check.suites.push_back(v.get<std::string>());
            }
        }
        r.finish();
        if (cfg.check.cases < 1) throw ConfigError("check.cases", "must be positive");
        if (cfg.check.lemma22_cases < 1) throw ConfigError("check.lemma22_cases", "must be positive");
    }

    if (root.has("output")) {
        const auto r = root.object("output");
        cfg.output_dir = r.text("dir", cfg.output_dir);
        r.finish();
    }
    if (root.has("seed")) {
        const auto& s = root.raw("seed");
        if (!s.is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    cfg.solver.seed = cfg.seed;
    root.finish();
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(j);
}

} // namespace fams
