#pragma once

#include <fams/core/errors.hpp>

#include <cmath>
#include <sstream>

namespace fams {

/// Bracketing and bisection settings of a Luxemburg norm computation.
struct LuxemburgOptions {
    double relative_tolerance = 1e-10;
    int max_bisections = 200;
};

/// inf{λ > 0 : m(λ) <= 1} for a modular profile λ ↦ m(λ) = ρ(u / λ) that is nonincreasing in λ.
/// The returned value satisfies m(value) <= 1.
template <class Profile>
double luxemburg_norm(Profile&& m, LuxemburgOptions opts = {}) {
    const double at_one = m(1.0);
    if (!std::isfinite(at_one)) throw NumericError("luxemburg_norm: modular is not finite at λ = 1");
    if (at_one == 0.0) return 0.0;
    double lo = 1.0, hi = 1.0;
    if (at_one > 1.0) {
        for (int k = 0; m(hi) > 1.0; ++k) {
            lo = hi;
            hi *= 2.0;
            if (k > 1100) throw NumericError("luxemburg_norm: upper bracket not found");
        }
    } else {
        for (int k = 0; m(lo) <= 1.0; ++k) {
            hi = lo;
            lo *= 0.5;
            if (k > 1100) throw NumericError("luxemburg_norm: lower bracket not found");
        }
    }
    for (int it = 0; it < opts.max_bisections; ++it) {
        if (hi - lo <= opts.relative_tolerance * hi) return hi;
        const double mid = 0.5 * (lo + hi);
        (m(mid) > 1.0 ? lo : hi) = mid;
    }
    std::ostringstream os;
    os << "luxemburg_norm: bisection stopped with relative width " << (hi - lo) / hi;
    throw NumericError(os.str());
}

} // namespace fams
