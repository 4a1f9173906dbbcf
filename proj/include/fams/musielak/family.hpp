#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/geometry.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

namespace fams {

enum class FamilyKind { ConstantPower, VariableExponent, LogPerturbed, Custom };

inline const char* to_string(FamilyKind k) {
    switch (k) {
    case FamilyKind::ConstantPower: return "constant_power";
    case FamilyKind::VariableExponent: return "variable_exponent";
    case FamilyKind::LogPerturbed: return "log_perturbed";
    case FamilyKind::Custom: return "custom";
    }
    return "unknown";
}

/// Lower and upper growth indices, 1 < lower <= upper < infinity.
struct GrowthIndices {
    double lower = 2.0;
    double upper = 2.0;

    void validate() const {
        if (!(lower > 1.0)) {
            std::ostringstream os;
            os << "growth indices must satisfy 1 < φ⁻ (got φ⁻ = " << lower << ")";
            throw SetupError(os.str());
        }
        if (!(upper >= lower) || !std::isfinite(upper))
            throw SetupError("growth indices must satisfy φ⁻ <= φ⁺ < infinity");
    }
};

using ExponentFunction = std::function<double(const Point&, const Point&)>;
using KernelFunction = std::function<double(const Point&, const Point&, double)>;

namespace detail {

inline void require_finite_nonnegative(double t, const char* what) {
    if (!std::isfinite(t)) throw DomainError(std::string(what) + ": argument must be finite");
    if (t < 0.0) throw DomainError(std::string(what) + ": argument must be nonnegative");
}

inline double power(double t, double p) {
    if (p == 2.0) return t * t;
    if (p == 3.0) return t * t * t;
    if (p == 4.0) {
        const double t2 = t * t;
        return t2 * t2;
    }
    return std::pow(t, p);
}

/// ∫_0^1 v^a / (1 + z v) dv for a > -1 and z > 0.
inline double reciprocal_moment(double a, double z) {
    // Start from a base exponent in (-1, 0] given by an incomplete beta function, then recur upward with
    // K_a = (1/a - K_{a-1}) / z.
    const int steps = static_cast<int>(std::ceil(a));
    const double b = a - steps;
    double K;
    if (b == 0.0) {
        K = std::log1p(z) / z;
    } else {
        const double x = z / (1.0 + z), y = 1.0 / (1.0 + z);
        const double incomplete = x <= 0.5 ? boost::math::beta(b + 1.0, -b, x)
                                           : boost::math::beta(b + 1.0, -b) - boost::math::beta(-b, b + 1.0, y);
        K = std::pow(z, -b - 1.0) * incomplete;
    }
    for (int k = 1; k <= steps; ++k) K = (1.0 / (b + k) - K) / z;
    return K;
}

/// ∫_0^1 v^{p-1} log(1 + z v) dv for p > 1 and z >= 0.
inline double log_moment(double p, double z) {
    if (z == 0.0) return 0.0;
    if (z <= 0.5) {
        double sum = 0.0, zk = 1.0;
        for (int k = 1; k <= 200; ++k) {
            zk *= -z;
            const double term = -zk / (k * (p + k));
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::log1p(z) - z * reciprocal_moment(p, z)) / p;
}

/// Integral of f over [0, t] with adaptive Gauss-Kronrod; throws when the error estimate stays large.
template <class F>
double integrate_to(F&& f, double t, const char* what) {
    if (t == 0.0) return 0.0;
    double error = 0.0;
    double l1 = 0.0;
    auto g = [&](double v) { return t * f(t * v); };
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, 15, 1e-13, &error, &l1);
    if (!std::isfinite(value) || error > std::max(1e-12, 1e-10 * std::abs(value))) {
        std::ostringstream os;
        os << what << ": quadrature error bound " << error << " exceeds tolerance at t = " << t;
        throw NumericError(os.str());
    }
    return value;
}

} // namespace detail

/// A generalized N-function Φ(x, y, t) generated by a kernel a(x, y, t) through φ = a t and Φ = ∫ φ.
class MusielakFamily {
public:
    /// Φ(t) = t^p / p.
    static MusielakFamily constant_power(double p) {
        MusielakFamily f(FamilyKind::ConstantPower, GrowthIndices{p, p});
        f.p_ = p;
        f.name_ = "constant_power(p=" + format(p) + ")";
        return f;
    }

    /// Φ(x, y, t) = t^{p(x,y)} / p(x,y) with p symmetric and p_minus <= p <= p_plus.
    static MusielakFamily variable_exponent(ExponentFunction p, double p_minus, double p_plus, std::string name = "") {
        if (!p) throw SetupError("variable exponent family requires an exponent function");
        MusielakFamily f(FamilyKind::VariableExponent, GrowthIndices{p_minus, p_plus});
        f.exponent_ = std::make_shared<ExponentFunction>(std::move(p));
        f.p_ = p_minus;
        f.name_ = name.empty() ? "variable_exponent[" + format(p_minus) + "," + format(p_plus) + "]" : std::move(name);
        return f;
    }

    /// a(t) = t^{p-2} log(shift + t); growth indices (p, p + 1).
    static MusielakFamily log_perturbed(double p, double shift = std::numbers::e) {
        if (!(shift >= std::numbers::e)) throw SetupError("log-perturbed family requires shift >= e");
        MusielakFamily f(FamilyKind::LogPerturbed, GrowthIndices{p, p + 1.0});
        f.p_ = p;
        f.shift_ = shift;
        f.name_ = "log_perturbed(p=" + format(p) + ")";
        return f;
    }

    /// Arbitrary kernel with user-declared growth indices; Φ is computed by quadrature.
    static MusielakFamily custom(KernelFunction kernel, GrowthIndices declared, std::string name = "custom") {
        if (!kernel) throw SetupError("custom family requires a kernel");
        MusielakFamily f(FamilyKind::Custom, declared);
        f.kernel_ = std::make_shared<KernelFunction>(std::move(kernel));
        f.name_ = std::move(name);
        return f;
    }

    FamilyKind kind() const { return kind_; }
    const GrowthIndices& declared_indices() const { return indices_; }
    const std::string& name() const { return name_; }
    /// Base exponent of power-type kinds (p for ConstantPower and LogPerturbed, p⁻ for VariableExponent).
    double base_exponent() const { return p_; }
    double shift() const { return shift_; }

    /// Whether Φ depends on the spatial arguments.
    bool spatially_varying() const { return kind_ == FamilyKind::VariableExponent || kind_ == FamilyKind::Custom; }

    /// Local exponent p(x, y) for power-type kinds; zero for Custom.
    double local_exponent(const Point& x, const Point& y) const {
        switch (kind_) {
        case FamilyKind::VariableExponent: return (*exponent_)(x, y);
        case FamilyKind::Custom: return 0.0;
        default: return p_;
        }
    }

    /// Kernel a(x, y, t) for t > 0.
    double kernel(const Point& x, const Point& y, double t) const {
        detail::require_finite_nonnegative(t, "kernel");
        return kernel_local(local_exponent(x, y), x, y, t);
    }

    /// φ(x, y, t) = a(x, y, |t|) t, odd in t.
    double phi(const Point& x, const Point& y, double t) const {
        if (!std::isfinite(t)) throw DomainError("phi: argument must be finite");
        return phi_local(local_exponent(x, y), x, y, t);
    }

    /// Φ(x, y, t) = ∫_0^t φ(x, y, τ) dτ for t >= 0.
    double Phi(const Point& x, const Point& y, double t) const {
        detail::require_finite_nonnegative(t, "Phi");
        return Phi_local(local_exponent(x, y), x, y, t);
    }

    /// Diagonal function Φ̂_x(t) = Φ(x, x, t).
    double Phi_hat(const Point& x, double t) const { return Phi(x, x, t); }

    /// Inverse of Φ̂_x: returns t with Φ̂_x(t) = v (bisection to relative 1e-13 in t).
    double Phi_inverse(const Point& x, double v) const {
        detail::require_finite_nonnegative(v, "Phi_inverse");
        if (v == 0.0) return 0.0;
        const double p = local_exponent(x, x);
        if (kind_ == FamilyKind::ConstantPower || kind_ == FamilyKind::VariableExponent) return std::pow(p * v, 1.0 / p);
        return invert_increasing([&](double t) { return Phi_local(p, x, x, t); }, v);
    }

    /// Inverse of t ↦ φ(x, y, t) on [0, ∞), the derivative of the complementary function.
    double conjugate_phi(const Point& x, const Point& y, double s) const {
        detail::require_finite_nonnegative(s, "conjugate_phi");
        if (s == 0.0) return 0.0;
        const double p = local_exponent(x, y);
        if (kind_ == FamilyKind::ConstantPower || kind_ == FamilyKind::VariableExponent) return std::pow(s, 1.0 / (p - 1.0));
        return invert_increasing([&](double t) { return phi_local(p, x, y, t); }, s);
    }

    /// Complementary function Φ̄(x, y, s) = ∫_0^s φ⁻¹(x, y, σ) dσ.
    double conjugate_Phi(const Point& x, const Point& y, double s) const {
        detail::require_finite_nonnegative(s, "conjugate_Phi");
        if (s == 0.0) return 0.0;
        const double p = local_exponent(x, y);
        if (kind_ == FamilyKind::ConstantPower || kind_ == FamilyKind::VariableExponent) {
            const double q = p / (p - 1.0);
            return std::pow(s, q) / q;
        }
        auto f = [&](double sigma) { return conjugate_phi(x, y, sigma); };
        boost::math::quadrature::tanh_sinh<double> integrator;
        double error = 0.0;
        const double value = integrator.integrate(f, 0.0, s, 1e-11, &error);
        if (!std::isfinite(value) || error > 1e-8 * std::max(1.0, std::abs(value)))
            throw NumericError("conjugate_Phi: quadrature did not converge at s = " + format(s));
        return value;
    }

    /// Kernel with a precomputed local exponent.
    double kernel_local(double p, const Point& x, const Point& y, double t) const {
        switch (kind_) {
        case FamilyKind::ConstantPower:
        case FamilyKind::VariableExponent: return detail::power(t, p - 2.0);
        case FamilyKind::LogPerturbed: return detail::power(t, p - 2.0) * std::log(shift_ + t);
        case FamilyKind::Custom: return (*kernel_)(x, y, t);
        }
        return 0.0;
    }

    /// φ with a precomputed local exponent; odd in t.
    double phi_local(double p, const Point& x, const Point& y, double t) const {
        const double a = std::abs(t);
        if (a == 0.0) return 0.0;
        double v = 0.0;
        switch (kind_) {
        case FamilyKind::ConstantPower:
        case FamilyKind::VariableExponent: v = detail::power(a, p - 1.0); break;
        case FamilyKind::LogPerturbed: v = detail::power(a, p - 1.0) * std::log(shift_ + a); break;
        case FamilyKind::Custom: v = (*kernel_)(x, y, a) * a; break;
        }
        return t < 0.0 ? -v : v;
    }

    /// Φ with a precomputed local exponent, t >= 0.
    double Phi_local(double p, const Point& x, const Point& y, double t) const {
        switch (kind_) {
        case FamilyKind::ConstantPower:
        case FamilyKind::VariableExponent: return detail::power(t, p) / p;
        case FamilyKind::LogPerturbed: {
            if (t == 0.0) return 0.0;
            return detail::power(t, p) * (std::log(shift_) / p + detail::log_moment(p, t / shift_));
        }
        case FamilyKind::Custom: {
            auto f = [&](double tau) { return tau > 0.0 ? (*kernel_)(x, y, tau) * tau : 0.0; };
            return detail::integrate_to(f, t, "Phi");
        }
        }
        return 0.0;
    }

private:
    MusielakFamily(FamilyKind kind, GrowthIndices indices) : kind_(kind), indices_(indices) { indices_.validate(); }

    static std::string format(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    template <class F>
    static double invert_increasing(F&& f, double v) {
        double lo = 0.0, hi = 1.0;
        int guard = 0;
        while (f(hi) < v) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 2000) throw NumericError("inverse: bracket search failed");
        }
        if (lo == 0.0) {
            while (f(hi * 0.5) >= v && hi > std::numeric_limits<double>::min()) hi *= 0.5;
            lo = hi * 0.5;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < v ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    FamilyKind kind_;
    GrowthIndices indices_;
    double p_ = 2.0;
    double shift_ = std::numbers::e;
    std::shared_ptr<ExponentFunction> exponent_;
    std::shared_ptr<KernelFunction> kernel_;
    std::string name_;
};

} // namespace fams
