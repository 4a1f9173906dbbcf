#pragma once

#include <fams/musielak/family.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>

namespace fams {

/// Local behaviour of τ ↦ Φ̂⁻¹(τ) τ^{-1-s/N}, the integrand of the Sobolev conjugate inverse.
struct SobolevIntegrability {
    double exponent_at_zero = 0.0;     ///< local power of the integrand near τ = 0
    double exponent_at_infinity = 0.0; ///< local power of the integrand for large τ
    bool convergent_at_zero = true;
    bool divergent_at_infinity = true;
};

/// Log-log slope of the diagonal inverse between two magnitudes.
inline double inverse_log_slope(const MusielakFamily& family, const Point& x, double t1, double t2) {
    return std::log(family.Phi_inverse(x, t2) / family.Phi_inverse(x, t1)) / std::log(t2 / t1);
}

/// Integrability diagnostic: the integral must converge at zero and diverge at infinity.
inline SobolevIntegrability sobolev_integrability(const MusielakFamily& family, const Point& x, double s, int N) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("sobolev_integrability: s must lie in (0, 1)");
    if (N < 1) throw DomainError("sobolev_integrability: dimension must be positive");
    const double shift = 1.0 + s / N;
    SobolevIntegrability r;
    r.exponent_at_zero = inverse_log_slope(family, x, 1e-120, 1e-100) - shift;
    r.exponent_at_infinity = inverse_log_slope(family, x, 1e100, 1e120) - shift;
    r.convergent_at_zero = r.exponent_at_zero > -1.0;
    r.divergent_at_infinity = r.exponent_at_infinity >= -1.0;
    return r;
}

/// ∫_0^t Φ̂⁻¹(τ) τ^{-1-s/N} dτ, the inverse of the Sobolev conjugate of Φ̂_x.
/// Throws SetupError when the integral diverges at zero.
inline double sobolev_conjugate_inverse(const MusielakFamily& family, const Point& x, double t, double s, int N) {
    detail::require_finite_nonnegative(t, "sobolev_conjugate_inverse");
    const auto diag = sobolev_integrability(family, x, s, N);
    if (!diag.convergent_at_zero)
        throw SetupError("sobolev_conjugate_inverse: integrand behaves like τ^" + std::to_string(diag.exponent_at_zero) +
                         " near zero and is not integrable");
    if (t == 0.0) return 0.0;
    // Substituting τ = t e^{-w} maps (0, t] to [0, ∞).
    auto f = [&](double w) {
        const double tau = t * std::exp(-w);
        return tau > 0.0 ? family.Phi_inverse(x, tau) * std::pow(tau, -s / N) : 0.0;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    const double value = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-10, &error);
    if (!std::isfinite(value) || error > 1e-7 * std::max(1.0, std::abs(value)))
        throw NumericError("sobolev_conjugate_inverse: quadrature did not converge");
    return value;
}

} // namespace fams
