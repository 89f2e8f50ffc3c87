#include "ase/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace ase {

void AseParams::validate() const {
    if (!(std::isfinite(c) && c > 0.0)) {
        throw std::invalid_argument("AseParams: c must be a positive finite number");
    }
    if (!(std::isfinite(zeta) && zeta > 0.0)) {
        throw std::invalid_argument("AseParams: zeta must be a positive finite number");
    }
}

double ase_cost(double e, const AseParams& p) noexcept {
    if (std::abs(e) > p.cutoff()) {
        return 4.0;
    }
    const double s = std::sin(e / (2.0 * p.c));
    return 4.0 * s * s;
}

double ase_score(double e, const AseParams& p) noexcept {
    if (std::abs(e) > p.cutoff()) {
        return 0.0;
    }
    return (2.0 / p.c) * std::sin(e / p.c);
}

double ase_weight(double e, const AseParams& p) noexcept {
    if (std::abs(e) > p.cutoff()) {
        return 0.0;
    }
    // sin(e/c) and e share a sign on [-pi c, pi c]; the signed regularizer
    // keeps the denominator the same sign as e.
    const double den = e + std::copysign(p.zeta, e == 0.0 ? 1.0 : e);
    const double phi = (2.0 / p.c) * std::sin(e / p.c) / den;
    return phi < 0.0 ? 0.0 : phi;
}

}  // namespace ase
