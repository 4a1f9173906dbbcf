#pragma once

#include <fams/core/errors.hpp>

#include <cmath>
#include <string>

namespace fams {

/// Kirchhoff coefficient M(t) = m0 + b t with primitive M̂(t) = m0 t + b t² / 2.
class Kirchhoff {
public:
    /// M ≡ m0, θ = 1.
    static Kirchhoff constant(double m0 = 1.0) { return Kirchhoff(m0, 0.0, 1.0); }
    /// M(t) = m0 + b t, θ = 2 by default.
    static Kirchhoff linear(double m0, double b, double theta = 2.0) { return Kirchhoff(m0, b, theta); }

    double m0() const { return m0_; }
    double slope() const { return b_; }
    double theta() const { return theta_; }
    bool is_constant() const { return b_ == 0.0; }

    double M(double t) const { return m0_ + b_ * t; }
    double M_hat(double t) const { return m0_ * t + 0.5 * b_ * t * t; }

    /// Whether M̂(t) <= M̂(1) t^{1/θ} holds for t >= 1 on a sample grid. False for any nonconstant M with θ > 1.
    bool growth_bound_holds() const {
        for (double t = 1.0; t <= 1e6; t *= 1.5)
            if (M_hat(t) > M_hat(1.0) * std::pow(t, 1.0 / theta_) * (1.0 + 1e-12)) return false;
        return true;
    }

    std::string describe() const {
        return is_constant() ? "constant(m0=" + std::to_string(m0_) + ")"
                             : "linear(m0=" + std::to_string(m0_) + ", b=" + std::to_string(b_) + ", theta=" + std::to_string(theta_) + ")";
    }

private:
    Kirchhoff(double m0, double b, double theta) : m0_(m0), b_(b), theta_(theta) {
        if (!(m0 > 0.0) || !std::isfinite(m0)) throw SetupError("Kirchhoff coefficient requires m0 > 0");
        if (!(b >= 0.0) || !std::isfinite(b)) throw SetupError("Kirchhoff slope must be nonnegative");
        if (!(theta >= 1.0) || !std::isfinite(theta)) throw SetupError("Kirchhoff exponent θ must be at least 1");
        for (double t = 1e-6; t <= 1e6; t *= 1.5) {
            if (M(t) < m0_) throw SetupError("Kirchhoff coefficient violates M >= m0");
            if (t * M(t) > theta_ * M_hat(t) * (1.0 + 1e-12))
                throw SetupError("Kirchhoff coefficient violates t M(t) <= θ M̂(t); θ must be at least 2 when b > 0");
        }
    }

    double m0_;
    double b_;
    double theta_;
};

} // namespace fams
