#pragma once

#include <fams/core/errors.hpp>
#include <fams/nonlocal/setup.hpp>

#include <cmath>
#include <sstream>
#include <string>

namespace fams {

enum class Regime { Superlinear, Sublinear, Indeterminate };

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::Superlinear: return "superlinear";
    case Regime::Sublinear: return "sublinear";
    case Regime::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

struct RegimeClassification {
    Regime regime = Regime::Indeterminate;
    double upper_index_max = 0.0; ///< max_i φ_i⁺
    double lower_index_min = 0.0; ///< min_i φ_i⁻
    double q_minus = 0.0;
    double q_plus = 0.0;
    double theta = 1.0;
    std::string reason;
};

/// Superlinear when max φ⁺ < q⁻ θ and max φ⁺ < q⁻; sublinear when q⁻ < min φ⁻.
inline RegimeClassification classify_regime(const AnisotropicSetup& setup) {
    RegimeClassification c;
    c.upper_index_max = setup.upper_index_max();
    c.lower_index_min = setup.lower_index_min();
    c.q_minus = setup.exponent.lower();
    c.q_plus = setup.exponent.upper();
    c.theta = setup.kirchhoff.theta();
    std::ostringstream os;
    if (c.upper_index_max < c.q_minus * c.theta && c.upper_index_max < c.q_minus) {
        c.regime = Regime::Superlinear;
        os << "max φ⁺ = " << c.upper_index_max << " < q⁻ = " << c.q_minus;
    } else if (c.q_minus < c.lower_index_min) {
        c.regime = Regime::Sublinear;
        os << "q⁻ = " << c.q_minus << " < min φ⁻ = " << c.lower_index_min;
    } else {
        os << "neither max φ⁺ = " << c.upper_index_max << " < q⁻ = " << c.q_minus << " nor q⁻ < min φ⁻ = " << c.lower_index_min;
    }
    c.reason = os.str();
    return c;
}

/// λ* = m0 ρ^{φ⁺ - q⁻} q⁻ / (2 c1^{q⁻} N^{φ⁺ - 1}) with φ⁺ = max_i φ_i⁺ and N the number of directions.
inline double lambda_star(double m0, double rho, double upper_index_max, double q_minus, double c1, int directions) {
    if (!(m0 > 0.0) || !(c1 > 0.0) || directions < 1) throw DomainError("lambda_star: m0, c1 and N must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("lambda_star: ρ must lie in (0, 1)");
    if (!(rho < 1.0 / c1)) throw PreconditionError("lambda_star: ρ must be smaller than 1 / c1");
    return m0 * std::pow(rho, upper_index_max - q_minus) * q_minus /
           (2.0 * std::pow(c1, q_minus) * std::pow(static_cast<double>(directions), upper_index_max - 1.0));
}

} // namespace fams
